#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aki/cohort.hpp"
#include "aki/dataset.hpp"

namespace aki {

struct SynthSpec {
    std::size_t n_rows = 1000;
    double prevalence = 0.27;
    std::vector<double> true_coefficients; // per feature, on the latent scale
    std::vector<double> correlation;       // row-major square matrix; empty = identity
    std::vector<double> missing_rates;     // per feature; empty = none
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> feature_names; // empty = standard Table-4 columns
};

struct SynthResult {
    CohortTable cohort;
    double intercept = 0.0;                // calibrated to hit the prevalence
    std::vector<double> true_coefficients;
    std::vector<std::string> feature_names;
    // latent risk score (beta . x) per row, for Bayes-optimal checks
    std::vector<double> true_scores;
    std::vector<int> labels;
};

SynthResult generate(const SynthSpec& spec);

// Writes the same CSV schema load_cohort reads.
void write_cohort_csv(const SynthResult& result, const std::string& path);

} // namespace aki
