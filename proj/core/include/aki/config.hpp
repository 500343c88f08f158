#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aki/cohort.hpp"
#include "aki/models.hpp"
#include "aki/synth.hpp"
#include "aki/tune.hpp"

namespace aki {

struct CohortConfig {
    FunnelConfig funnel;
    bool prefer_label_column = true;
    double label_window_hours = 48.0;
    double label_delta_mg_dl = 0.3;
};

struct PreprocessConfig {
    double missingness_threshold = 0.20;
    int knn_k = 5;
};

struct SelectConfig {
    int folds = 5;
    int grid_size = 100;
    double min_lambda_ratio = 1e-3;
    std::optional<std::vector<std::string>> allowlist;
};

struct SmoteSection {
    int k_neighbors = 5;
    double target_ratio = 1.0;
};

struct ModelsConfig {
    std::vector<ModelFamily> families = {ModelFamily::Gbdt, ModelFamily::Logistic,
                                         ModelFamily::GaussianNb, ModelFamily::ShallowNn};
    double split_ratio = 0.70;
    int cv_folds = 5;
    std::map<std::string, HyperGrid> grids; // family name -> grid override
};

struct EvalConfig {
    int bootstrap_replicates = 2000;
    double ci_level = 0.95;
    double target_sensitivity = 0.80;
    int ablation_replicates = 20;
    ModelFamily ablation_family = ModelFamily::Logistic;
};

struct ExplainConfig {
    int ale_bins = 20;
    std::size_t background_cap = 256;
    int max_features = 20;
    std::size_t shap_rows = 20;
};

struct SynthSection {
    bool enabled = false;
    SynthSpec spec;
};

// Declarative form of the whole pipeline. A single master seed derives all
// stage seeds; unknown config keys are rejected.
struct PipelineConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string input_csv;
    std::string out_dir = "artifacts";

    SynthSection synth;
    CohortConfig cohort;
    PreprocessConfig preprocess;
    SelectConfig select;
    SmoteSection smote;
    ModelsConfig models;
    EvalConfig eval;
    ExplainConfig explain;
};

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);
std::string config_to_json(const PipelineConfig& cfg);

} // namespace aki
