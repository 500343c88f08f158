#include "aki/dataset.hpp"

#include <algorithm>

namespace aki {

bool Dataset::any_missing() const {
    return std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> out;
    out.reserve(meta.size());
    for (const auto& m : meta) out.push_back(m.name);
    return out;
}

int Dataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < meta.size(); ++j)
        if (meta[j].name == name) return static_cast<int>(j);
    return -1;
}

std::vector<std::size_t> Dataset::rows_with_tag(SplitTag tag) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < n_rows; ++r)
        if (split[r] == tag) out.push_back(r);
    return out;
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& rows) const {
    Dataset out = make(rows.size(), n_features);
    out.meta = meta;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        std::copy(values.begin() + r * n_features, values.begin() + (r + 1) * n_features,
                  out.values.begin() + i * n_features);
        std::copy(mask.begin() + r * n_features, mask.begin() + (r + 1) * n_features,
                  out.mask.begin() + i * n_features);
        out.labels[i] = labels[r];
        out.split[i] = split[r];
        out.synthetic[i] = synthetic[r];
    }
    return out;
}

Dataset Dataset::drop_feature(std::size_t jdrop) const {
    Dataset out = make(n_rows, n_features - 1);
    out.labels = labels;
    out.split = split;
    out.synthetic = synthetic;
    out.meta.clear();
    for (std::size_t j = 0; j < n_features; ++j)
        if (j != jdrop) out.meta.push_back(meta[j]);
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n_features; ++j) {
            if (j == jdrop) continue;
            out.values[r * out.n_features + c] = at(r, j);
            out.mask[r * out.n_features + c] = mask[r * n_features + j];
            ++c;
        }
    }
    return out;
}

Dataset Dataset::make(std::size_t rows, std::size_t features) {
    Dataset d;
    d.n_rows = rows;
    d.n_features = features;
    d.values.assign(rows * features, 0.0);
    d.mask.assign(rows * features, 0);
    d.labels.assign(rows, 0);
    d.meta.assign(features, FeatureMeta{});
    d.split.assign(rows, SplitTag::None);
    d.synthetic.assign(rows, 0);
    return d;
}

void Dataset::recompute_missing_fractions() {
    for (std::size_t j = 0; j < n_features; ++j) {
        std::size_t miss = 0;
        for (std::size_t r = 0; r < n_rows; ++r)
            if (is_missing(r, j)) ++miss;
        meta[j].missing_fraction = n_rows ? static_cast<double>(miss) / n_rows : 0.0;
    }
}

} // namespace aki
