#include "aki/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "aki/errors.hpp"
#include "aki/parallel.hpp"
#include "aki/rng.hpp"

namespace aki {

ShapExplanation shapley_exact(const ScoreFn& f, std::size_t n_features, const double* record,
                              const Dataset& background, int max_features, int threads) {
    const std::size_t n = n_features;
    if (n > static_cast<std::size_t>(max_features))
        throw ConfigError("shapley_exact: " + std::to_string(n) + " features exceed max_features=" +
                          std::to_string(max_features) + "; 2^n enumeration is infeasible");
    if (background.n_features != n)
        throw DataError("shapley background feature count does not match");
    if (background.n_rows == 0) throw DataError("shapley background is empty");

    const std::size_t n_coalitions = std::size_t{1} << n;
    std::vector<double> v(n_coalitions);

    parallel_for(n_coalitions, threads, [&](std::size_t mask) {
        std::vector<double> hybrid(n);
        double sum = 0.0;
        for (std::size_t b = 0; b < background.n_rows; ++b) {
            const double* bg = background.row(b);
            for (std::size_t j = 0; j < n; ++j)
                hybrid[j] = (mask >> j) & 1 ? record[j] : bg[j];
            sum += f(hybrid.data());
        }
        v[mask] = sum / static_cast<double>(background.n_rows);
    });

    // w[s] = s! (n-1-s)! / n! = 1 / (n * C(n-1, s))
    std::vector<double> weight(n);
    for (std::size_t s = 0; s < n; ++s) {
        double binom = 1.0;
        for (std::size_t i = 1; i <= s; ++i)
            binom *= static_cast<double>(n - 1 - s + i) / static_cast<double>(i);
        weight[s] = 1.0 / (static_cast<double>(n) * binom);
    }

    ShapExplanation exp;
    exp.base_value = v[0];
    exp.prediction = f(record);
    exp.attributions.assign(n, 0.0);
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) continue;
            exp.attributions[i] += weight[size] * (v[mask | (std::size_t{1} << i)] - v[mask]);
        }
    }
    return exp;
}

ShapExplanation shapley_exact(const TrainedModel& model, const double* record,
                              const Dataset& background, int max_features, int threads) {
    if (background.feature_names() != model.feature_names)
        throw DataError("shapley background features do not match the model");
    return shapley_exact([&](const double* x) { return model.score_one(x); },
                         model.feature_names.size(), record, background, max_features, threads);
}

ShapSummary shapley_batch(const TrainedModel& model, const Dataset& rows,
                          const Dataset& background, int max_features, int threads) {
    if (rows.feature_names() != model.feature_names)
        throw DataError("shapley rows features do not match the model");
    ShapSummary summary;
    summary.explanations.reserve(rows.n_rows);
    for (std::size_t r = 0; r < rows.n_rows; ++r) {
        auto exp = shapley_exact(model, rows.row(r), background, max_features, threads);
        exp.record_index = r;
        summary.explanations.push_back(std::move(exp));
    }
    const std::size_t n = model.feature_names.size();
    std::vector<double> mean_abs(n, 0.0);
    for (const auto& e : summary.explanations)
        for (std::size_t j = 0; j < n; ++j) mean_abs[j] += std::fabs(e.attributions[j]);
    for (std::size_t j = 0; j < n; ++j) {
        mean_abs[j] /= rows.n_rows ? static_cast<double>(rows.n_rows) : 1.0;
        summary.global_ranking.emplace_back(model.feature_names[j], mean_abs[j]);
    }
    std::stable_sort(summary.global_ranking.begin(), summary.global_ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return summary;
}

Dataset stratified_background(const Dataset& ds, std::size_t cap, std::uint64_t seed) {
    if (ds.n_rows <= cap) return ds;
    std::vector<std::size_t> cls[2];
    for (std::size_t r = 0; r < ds.n_rows; ++r) cls[ds.labels[r] ? 1 : 0].push_back(r);
    Rng master(seed);
    std::vector<std::size_t> keep;
    for (int c = 0; c < 2; ++c) {
        const std::size_t want =
            std::min(cls[c].size(), (cap * cls[c].size() + ds.n_rows - 1) / ds.n_rows);
        Rng rng = master.derive(static_cast<std::uint64_t>(c));
        rng.shuffle(cls[c].begin(), cls[c].end());
        keep.insert(keep.end(), cls[c].begin(), cls[c].begin() + want);
    }
    std::sort(keep.begin(), keep.end());
    if (keep.size() > cap) keep.resize(cap);
    return ds.subset_rows(keep);
}

AleCurve ale_curve(const ScoreFn& f, const Dataset& ds, const std::string& feature,
                   int n_bins) {
    if (n_bins < 1) throw ConfigError("ale needs n_bins >= 1");
    const int j = ds.feature_index(feature);
    if (j < 0) throw DataError("ale: unknown feature '" + feature + "'");

    std::vector<double> col(ds.n_rows);
    for (std::size_t r = 0; r < ds.n_rows; ++r) col[r] = ds.at(r, j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw DataError("ale: feature '" + feature + "' is constant");

    // quantile edges, duplicates merged
    std::vector<double> edges;
    edges.push_back(sorted.front());
    for (int b = 1; b < n_bins; ++b) {
        const std::size_t pos = (static_cast<std::size_t>(b) * ds.n_rows) / n_bins;
        const double e = sorted[std::min(pos, ds.n_rows - 1)];
        if (e > edges.back() && e < sorted.back()) edges.push_back(e);
    }
    edges.push_back(sorted.back());
    const std::size_t bins = edges.size() - 1;

    std::vector<double> diff_sum(bins, 0.0);
    std::vector<std::size_t> counts(bins, 0);
    std::vector<double> x(ds.n_features);
    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        // bin k covers (edges[k], edges[k+1]]; the minimum joins bin 0
        std::size_t k =
            std::upper_bound(edges.begin() + 1, edges.end() - 1, col[r]) - (edges.begin() + 1);
        if (col[r] <= edges.front()) k = 0;
        std::copy(ds.row(r), ds.row(r) + ds.n_features, x.begin());
        x[j] = edges[k + 1];
        const double upper = f(x.data());
        x[j] = edges[k];
        const double lower = f(x.data());
        diff_sum[k] += upper - lower;
        ++counts[k];
    }

    AleCurve curve;
    curve.feature = feature;
    curve.bin_edges = edges;
    curve.bin_counts = counts;
    std::vector<double> accum(bins + 1, 0.0);
    for (std::size_t k = 0; k < bins; ++k)
        accum[k + 1] = accum[k] + (counts[k] ? diff_sum[k] / static_cast<double>(counts[k]) : 0.0);

    // center so the count-weighted mean over upper edges is zero
    double center = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < bins; ++k) {
        center += static_cast<double>(counts[k]) * accum[k + 1];
        total += counts[k];
    }
    center /= static_cast<double>(total);
    curve.centered_effects.resize(bins + 1);
    for (std::size_t e = 0; e <= bins; ++e) curve.centered_effects[e] = accum[e] - center;
    return curve;
}

AleCurve ale_curve(const TrainedModel& model, const Dataset& ds, const std::string& feature,
                   int n_bins) {
    if (ds.feature_names() != model.feature_names)
        throw DataError("ale dataset features do not match the model");
    return ale_curve([&](const double* x) { return model.score_one(x); }, ds, feature, n_bins);
}

} // namespace aki
