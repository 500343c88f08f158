#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aki/dataset.hpp"
#include "aki/models.hpp"

namespace aki {

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points; // descending threshold, (0,0) .. (1,1)
    double auroc = 0.0;
};

// Mann-Whitney AUROC, ties counted half, O(n log n).
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

struct BootstrapCi {
    double low = 0.0;
    double high = 1.0;
    int replicates = 0;
    int redraws = 0; // single-class resamples that were redrawn
    std::uint64_t seed = 0;
};

BootstrapCi bootstrap_auroc_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                               int replicates, double level, std::uint64_t seed, int threads = 1);

// Largest threshold with tpr >= target (minimal fpr among qualifying).
double threshold_at_sensitivity(const RocCurve& curve, double target);

struct MetricRow {
    std::string model;
    double auroc = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double accuracy = 0.0;
    std::optional<double> f1;
    double sensitivity = 0.0;
    double specificity = 0.0;
    std::optional<double> ppv; // absent when the denominator is zero
    std::optional<double> npv;
    double chosen_threshold = 0.0;
};

// Positive decision rule is score >= threshold.
MetricRow confusion_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                            double threshold);

struct MetricsReport {
    std::vector<MetricRow> rows;
    int bootstrap_replicates = 0;
    std::uint64_t bootstrap_seed = 0;
    double target_sensitivity = 0.8;

    std::string to_json() const;
    std::string to_csv() const; // Table-7 shaped
};

struct AblationEntry {
    std::string feature;
    double auc_without = 0.0;
    double delta_auc = 0.0;
    std::optional<std::string> error;
};

struct AblationResult {
    double auc_full = 0.0;
    std::vector<AblationEntry> per_feature;
};

// Retrains with each feature removed; fits average AUROC over
// bootstrap-resampled training sets with derived per-replicate seeds.
// `ds` must carry train/test split tags.
AblationResult ablation_study(const Dataset& ds, ModelFamily family, const Hyperparams& hp,
                              std::uint64_t seed, int replicates = 20, int threads = 1);

} // namespace aki
