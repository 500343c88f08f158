#include "aki/smote.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aki/errors.hpp"
#include "aki/rng.hpp"

namespace aki {

Dataset smote(const Dataset& ds, const SmoteConfig& cfg) {
    if (cfg.k_neighbors < 1) throw ConfigError("smote k_neighbors must be >= 1");
    if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0))
        throw ConfigError("smote target_ratio must be in (0, 1]");
    if (ds.any_missing()) throw DataError("smote requires a fully preprocessed dataset");

    auto train = ds.rows_with_tag(SplitTag::Train);
    if (train.empty()) {
        train.resize(ds.n_rows);
        for (std::size_t r = 0; r < ds.n_rows; ++r) train[r] = r;
    }

    std::vector<std::size_t> cls[2];
    for (std::size_t r : train) cls[ds.labels[r] ? 1 : 0].push_back(r);
    const int minority_label = cls[1].size() <= cls[0].size() ? 1 : 0;
    const auto& minority = cls[minority_label];
    const auto& majority = cls[1 - minority_label];

    if (minority.size() <= static_cast<std::size_t>(cfg.k_neighbors))
        throw DataError("smote: minority class has " + std::to_string(minority.size()) +
                        " members, need more than k=" + std::to_string(cfg.k_neighbors) +
                        "; use a smaller k");

    const auto target =
        static_cast<std::size_t>(std::ceil(cfg.target_ratio * static_cast<double>(majority.size())));
    if (target <= minority.size()) return ds; // already balanced

    const std::size_t n_new = target - minority.size();
    const std::size_t p = ds.n_features;

    // k nearest same-class neighbors per minority row, tie-break by index.
    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    for (std::size_t m = 0; m < minority.size(); ++m) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(minority.size() - 1);
        for (std::size_t o = 0; o < minority.size(); ++o) {
            if (o == m) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = ds.at(minority[m], j) - ds.at(minority[o], j);
                s += d * d;
            }
            dist.emplace_back(s, minority[o]);
        }
        std::sort(dist.begin(), dist.end());
        for (int i = 0; i < cfg.k_neighbors; ++i) neighbors[m].push_back(dist[i].second);
    }

    Dataset out = ds;
    out.values.reserve((ds.n_rows + n_new) * p);
    Rng rng(cfg.seed);
    for (std::size_t s = 0; s < n_new; ++s) {
        const std::size_t m = s % minority.size(); // round-robin parent coverage
        const std::size_t parent = minority[m];
        const std::size_t nb = neighbors[m][rng.below(cfg.k_neighbors)];
        const double delta = rng.uniform();
        for (std::size_t j = 0; j < p; ++j) {
            const double v = ds.at(parent, j) + delta * (ds.at(nb, j) - ds.at(parent, j));
            out.values.push_back(v);
            out.mask.push_back(0);
        }
        out.labels.push_back(minority_label);
        out.split.push_back(SplitTag::Train);
        out.synthetic.push_back(1);
        ++out.n_rows;
    }
    return out;
}

} // namespace aki
