#include "aki/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "aki/errors.hpp"
#include "aki/rng.hpp"

namespace aki {

namespace {

std::array<std::vector<std::size_t>, 2> by_class(const std::vector<int>& labels) {
    std::array<std::vector<std::size_t>, 2> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) idx[labels[i] ? 1 : 0].push_back(i);
    return idx;
}

} // namespace

SplitSpec stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
    auto idx = by_class(labels);
    if (idx[0].size() < 2 || idx[1].size() < 2)
        throw DataError("stratified split needs at least 2 members per class");

    Rng master(seed);
    for (int c = 0; c < 2; ++c) {
        Rng r = master.derive(static_cast<std::uint64_t>(c));
        r.shuffle(idx[c].begin(), idx[c].end());
    }

    // Largest-remainder rounding of per-class train counts against the
    // rounded global target.
    const auto total_target =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(labels.size())));
    std::size_t take[2];
    double rem[2];
    std::size_t base_sum = 0;
    for (int c = 0; c < 2; ++c) {
        const double t = ratio * static_cast<double>(idx[c].size());
        take[c] = static_cast<std::size_t>(std::floor(t));
        rem[c] = t - static_cast<double>(take[c]);
        base_sum += take[c];
    }
    std::size_t extras = total_target > base_sum ? total_target - base_sum : 0;
    while (extras-- > 0) {
        const int c = rem[1] > rem[0] ? 1 : 0;
        ++take[c];
        rem[c] = -1.0;
    }

    SplitSpec spec;
    spec.seed = seed;
    spec.ratio = ratio;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < idx[c].size(); ++i) {
            (i < take[c] ? spec.train_indices : spec.test_indices).push_back(idx[c][i]);
        }
    }
    std::sort(spec.train_indices.begin(), spec.train_indices.end());
    std::sort(spec.test_indices.begin(), spec.test_indices.end());
    return spec;
}

std::vector<SplitSpec> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold needs k >= 2");
    auto idx = by_class(labels);
    if (idx[0].size() < static_cast<std::size_t>(k) || idx[1].size() < static_cast<std::size_t>(k))
        throw DataError("stratified k-fold needs at least k members per class");

    Rng master(seed);
    for (int c = 0; c < 2; ++c) {
        Rng r = master.derive(100 + static_cast<std::uint64_t>(c));
        r.shuffle(idx[c].begin(), idx[c].end());
    }

    std::vector<std::vector<std::size_t>> folds(k);
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < idx[c].size(); ++i)
            folds[i % k].push_back(idx[c][i]);

    std::vector<SplitSpec> out(k);
    for (int f = 0; f < k; ++f) {
        out[f].seed = seed;
        out[f].test_indices = folds[f];
        for (int g = 0; g < k; ++g)
            if (g != f)
                out[f].train_indices.insert(out[f].train_indices.end(), folds[g].begin(), folds[g].end());
        std::sort(out[f].train_indices.begin(), out[f].train_indices.end());
        std::sort(out[f].test_indices.begin(), out[f].test_indices.end());
    }
    return out;
}

} // namespace aki
