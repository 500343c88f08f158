#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aki/dataset.hpp"
#include "aki/models.hpp"

namespace aki {

// Any scoring function over a feature row; lets explanations run on raw
// margins or hand-built functions as well as trained models.
using ScoreFn = std::function<double(const double*)>;

struct ShapExplanation {
    std::size_t record_index = 0;
    double base_value = 0.0;             // mean background score, v(empty)
    std::vector<double> attributions;    // per feature
    double prediction = 0.0;
};

struct ShapSummary {
    std::vector<ShapExplanation> explanations;
    // features sorted by descending mean |phi|
    std::vector<std::pair<std::string, double>> global_ranking;
};

struct AleCurve {
    std::string feature;
    std::vector<double> bin_edges;        // strictly increasing, size bins+1
    std::vector<double> centered_effects; // per edge
    std::vector<std::size_t> bin_counts;  // per bin
};

// Exact Shapley attributions by full coalition enumeration with the
// interventional value function: features outside the coalition are
// replaced by background-row values and scores averaged.
ShapExplanation shapley_exact(const ScoreFn& f, std::size_t n_features, const double* record,
                              const Dataset& background, int max_features = 20,
                              int threads = 1);

ShapExplanation shapley_exact(const TrainedModel& model, const double* record,
                              const Dataset& background, int max_features = 20,
                              int threads = 1);

ShapSummary shapley_batch(const TrainedModel& model, const Dataset& rows,
                          const Dataset& background, int max_features = 20, int threads = 1);

// Stratified subsample used as the default Shapley background.
Dataset stratified_background(const Dataset& ds, std::size_t cap, std::uint64_t seed);

// First-order ALE with quantile bins (duplicate edges merged).
AleCurve ale_curve(const ScoreFn& f, const Dataset& ds, const std::string& feature,
                   int n_bins = 20);

AleCurve ale_curve(const TrainedModel& model, const Dataset& ds, const std::string& feature,
                   int n_bins = 20);

} // namespace aki
