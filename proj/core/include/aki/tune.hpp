#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aki/models.hpp"
#include "aki/smote.hpp"

namespace aki {

// Hyperparameter axes in declared order; ties in CV score resolve toward
// the first grid point in this enumeration order.
using HyperGrid = std::vector<std::pair<std::string, std::vector<double>>>;

struct TuneRow {
    Hyperparams hp;
    double mean_val_auroc = 0.0;
};

struct TuneResult {
    Hyperparams best;
    double best_auroc = 0.0;
    std::vector<TuneRow> table;
};

HyperGrid default_grid(ModelFamily family);

// Stratified k-fold CV over the train rows with SMOTE applied inside each
// fold's training part; scores are mean validation AUROC.
TuneResult tune(const Dataset& train, ModelFamily family, const HyperGrid& grid, int k,
                std::uint64_t seed, const SmoteConfig& smote_cfg = {}, int threads = 1);

} // namespace aki
