#include "aki/tune.hpp"

#include <stdexcept>

#include "aki/errors.hpp"
#include "aki/eval.hpp"
#include "aki/parallel.hpp"
#include "aki/rng.hpp"
#include "aki/split.hpp"

namespace aki {

HyperGrid default_grid(ModelFamily family) {
    switch (family) {
        case ModelFamily::Gbdt:
            return {{"n_trees", {100, 300}}, {"learning_rate", {0.05, 0.1}}, {"max_leaves", {15, 31}}};
        case ModelFamily::Logistic:
            return {{"penalty", {2}}, {"strength", {0.01, 0.1, 1.0}}};
        case ModelFamily::GaussianNb:
            return {};
        case ModelFamily::ShallowNn:
            return {{"hidden_units", {8, 16}}};
    }
    throw ConfigError("unknown model family");
}

namespace {

std::vector<Hyperparams> expand_grid(const HyperGrid& grid, ModelFamily family) {
    std::vector<Hyperparams> points;
    points.push_back(default_hyperparams(family));
    for (const auto& [key, values] : grid) {
        if (values.empty()) throw ConfigError("empty grid axis: " + key);
        std::vector<Hyperparams> next;
        for (const auto& base : points)
            for (double v : values) {
                Hyperparams hp = base;
                hp[key] = v;
                next.push_back(std::move(hp));
            }
        points = std::move(next);
    }
    return points;
}

} // namespace

TuneResult tune(const Dataset& train, ModelFamily family, const HyperGrid& grid, int k,
                std::uint64_t seed, const SmoteConfig& smote_cfg, int threads) {
    auto rows = train.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(train.n_rows);
        for (std::size_t r = 0; r < train.n_rows; ++r) rows[r] = r;
    }
    Dataset d = train.subset_rows(rows);
    for (auto& tag : d.split) tag = SplitTag::None;

    const auto folds = stratified_kfold(d.labels, k, seed);
    const auto points = expand_grid(grid, family);

    TuneResult result;
    result.table.resize(points.size());
    Rng master(seed);

    const std::size_t tasks = points.size() * folds.size();
    std::vector<double> fold_auc(tasks, 0.0);
    std::vector<std::string> task_error(tasks);
    parallel_for(tasks, threads, [&](std::size_t t) {
        const std::size_t g = t / folds.size();
        const std::size_t f = t % folds.size();
        try {
            Dataset tr = d.subset_rows(folds[f].train_indices);
            Dataset va = d.subset_rows(folds[f].test_indices);
            for (auto& tag : tr.split) tag = SplitTag::Train;
            SmoteConfig sc = smote_cfg;
            sc.seed = master.derive(1000 + f).seed();
            tr = smote(tr, sc);
            TrainedModel model = fit_family(tr, family, points[g]);
            fold_auc[t] = auroc(model.score(va), va.labels);
        } catch (const std::exception& e) {
            task_error[t] = std::string("grid point ") + std::to_string(g) + ", fold " +
                            std::to_string(f) + ": " + e.what();
        }
    });
    for (const auto& err : task_error)
        if (!err.empty()) throw NumericError("tune failed at " + err);

    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t g = 0; g < points.size(); ++g) {
        double mean = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) mean += fold_auc[g * folds.size() + f];
        mean /= static_cast<double>(folds.size());
        result.table[g] = {points[g], mean};
        if (mean > best_score) { // strict: ties keep the earlier grid point
            best_score = mean;
            best = g;
        }
    }
    result.best = points[best];
    result.best_auroc = best_score;
    return result;
}

} // namespace aki
