#include <cmath>

#include "aki/errors.hpp"
#include "aki/eval.hpp"
#include "aki/parallel.hpp"
#include "aki/rng.hpp"

namespace aki {

namespace {

// Mean test AUROC over refits on bootstrap-resampled training sets.
// Replicate r always draws from master.derive(r), so the full model and
// every ablated model see identical resampling streams.
double bootstrap_refit_auc(const Dataset& ds, ModelFamily family, const Hyperparams& hp,
                           const Rng& master, int replicates) {
    const auto train_rows = ds.rows_with_tag(SplitTag::Train);
    const auto test_rows = ds.rows_with_tag(SplitTag::Test);
    if (train_rows.empty() || test_rows.empty())
        throw DataError("ablation requires train/test split tags");
    Dataset test = ds.subset_rows(test_rows);

    double sum = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        Rng rng = master.derive(static_cast<std::uint64_t>(rep));
        std::vector<std::size_t> resampled(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i)
            resampled[i] = train_rows[rng.below(train_rows.size())];
        Dataset boot = ds.subset_rows(resampled);
        for (auto& tag : boot.split) tag = SplitTag::Train;
        TrainedModel model = fit_family(boot, family, hp);
        sum += auroc(model.score(test), test.labels);
    }
    return sum / replicates;
}

} // namespace

AblationResult ablation_study(const Dataset& ds, ModelFamily family, const Hyperparams& hp,
                              std::uint64_t seed, int replicates, int threads) {
    if (ds.n_features < 2) throw DataError("ablation needs at least 2 features");
    Rng master(seed);

    AblationResult result;
    result.auc_full = bootstrap_refit_auc(ds, family, hp, master, replicates);

    result.per_feature.resize(ds.n_features);
    parallel_for(ds.n_features, threads, [&](std::size_t j) {
        AblationEntry& entry = result.per_feature[j];
        entry.feature = ds.meta[j].name;
        try {
            Dataset without = ds.drop_feature(j);
            entry.auc_without = bootstrap_refit_auc(without, family, hp, master, replicates);
            entry.delta_auc = result.auc_full - entry.auc_without;
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
    });
    return result;
}

} // namespace aki
