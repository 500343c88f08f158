#pragma once

#include <cstdint>
#include <vector>

namespace aki {

struct SplitSpec {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    double ratio = 0.70;
};

SplitSpec stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed);

// k folds; SplitSpec i has fold i as test_indices and the rest as train.
std::vector<SplitSpec> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

} // namespace aki
