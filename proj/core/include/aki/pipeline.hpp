#pragma once

#include <string>

#include "aki/config.hpp"
#include "aki/dataset.hpp"

namespace aki {

// FNV-1a over bytes; used for stage input/output content hashes.
std::uint64_t content_hash(const std::string& bytes);

std::string dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const std::string& text);

// Synth spec with its seed derived from the master seed, as stage_cohort
// uses it; lets the synth subcommand emit the identical CSV.
SynthSpec resolved_synth_spec(const PipelineConfig& cfg);

// Stage entry points. Each consumes the previous stage's artifacts from
// cfg.out_dir and skips work when its recorded input hash is unchanged.
void stage_cohort(const PipelineConfig& cfg);     // runs synth first if enabled
void stage_split(const PipelineConfig& cfg);
void stage_preprocess(const PipelineConfig& cfg);
void stage_select(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg, const std::string& only_family = "");
void stage_evaluate(const PipelineConfig& cfg);
void stage_explain(const PipelineConfig& cfg);
void stage_ablate(const PipelineConfig& cfg);
void stage_report(const PipelineConfig& cfg);

// cohort -> split -> preprocess -> select -> train -> evaluate -> explain -> ablate
void run_pipeline(const PipelineConfig& cfg);

} // namespace aki
