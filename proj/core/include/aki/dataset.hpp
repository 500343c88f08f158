#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace aki {

enum class FeatureKind { Continuous, BinaryFlag };

enum class SplitTag : std::uint8_t { None = 0, Train = 1, Test = 2 };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    double missing_fraction = 0.0; // computed before imputation
    double mean = 0.0;             // fitted on train rows only
    double sd = 0.0;
};

// Row-major numeric matrix with an explicit missingness mask.
struct Dataset {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<double> values;      // n_rows * n_features
    std::vector<std::uint8_t> mask;  // 1 = missing
    std::vector<int> labels;         // 0/1
    std::vector<FeatureMeta> meta;
    std::vector<SplitTag> split;     // per row
    std::vector<std::uint8_t> synthetic; // 1 = SMOTE-generated row

    double& at(std::size_t r, std::size_t j) { return values[r * n_features + j]; }
    double at(std::size_t r, std::size_t j) const { return values[r * n_features + j]; }
    bool is_missing(std::size_t r, std::size_t j) const { return mask[r * n_features + j] != 0; }
    void set_missing(std::size_t r, std::size_t j, bool m) { mask[r * n_features + j] = m ? 1 : 0; }

    const double* row(std::size_t r) const { return values.data() + r * n_features; }

    bool any_missing() const;
    std::vector<std::string> feature_names() const;
    int feature_index(const std::string& name) const;

    std::vector<std::size_t> rows_with_tag(SplitTag tag) const;

    // Copy of the given rows (labels/split/synthetic carried along).
    Dataset subset_rows(const std::vector<std::size_t>& rows) const;
    // Copy without the given feature column.
    Dataset drop_feature(std::size_t j) const;

    static Dataset make(std::size_t rows, std::size_t features);
    void recompute_missing_fractions();
};

} // namespace aki
