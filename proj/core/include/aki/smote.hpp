#pragma once

#include <cstdint>

#include "aki/dataset.hpp"

namespace aki {

struct SmoteConfig {
    int k_neighbors = 5;
    double target_ratio = 1.0; // 1.0 = class parity
    std::uint64_t seed = 0;
};

// Appends synthetic minority rows interpolated between a minority sample
// and one of its k nearest minority neighbors. Operates on (and reads)
// train-tagged rows only; when no rows are tagged all rows count as train.
// Synthetic rows carry the synthetic provenance flag and the Train tag.
Dataset smote(const Dataset& ds, const SmoteConfig& cfg);

} // namespace aki
