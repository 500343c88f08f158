#pragma once

#include <string>
#include <vector>

#include "aki/dataset.hpp"

namespace aki {

// Everything needed to transform new records the same way: emitted as the
// preprocessing manifest and consumed by the scoring path.
struct PreprocessManifest {
    double missingness_threshold = 0.20;
    int knn_k = 5;
    std::vector<std::string> dropped_features;
    std::vector<FeatureMeta> feature_meta; // post-fit mean/sd per surviving feature
    std::vector<std::string> warnings;

    std::string to_json() const;
    static PreprocessManifest from_json(const std::string& text);
};

// Drops features with missing_fraction strictly above threshold.
Dataset filter_missingness(const Dataset& ds, double threshold,
                           std::vector<std::string>* dropped = nullptr);

// Missing binary-flag cells become 0; observed values must lie in [0,1].
Dataset encode_flags(const Dataset& ds);

// Mean-of-k-nearest imputation. Neighbors come from train rows only;
// distances are Euclidean over mutually observed features, each scaled by
// the train-split sd. Rows tagged None are treated as train.
Dataset knn_impute(const Dataset& ds, int k);

// z-score on continuous features with train-fitted population mean/sd.
Dataset zscore_fit_apply(const Dataset& ds, std::vector<std::string>* warnings = nullptr);

struct PreprocessResult {
    Dataset dataset;
    PreprocessManifest manifest;
};

// filter -> encode flags -> knn impute -> z-score
PreprocessResult preprocess(const Dataset& ds, double missingness_threshold = 0.20, int knn_k = 5);

} // namespace aki
