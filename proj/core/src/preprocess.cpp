#include "aki/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aki/errors.hpp"
#include "json.hpp"

namespace aki {

namespace {

// Rows statistics are fitted on. Falls back to all rows when no split has
// been assigned yet (unit-level use before any train/test tagging).
std::vector<std::size_t> fit_rows(const Dataset& ds) {
    auto train = ds.rows_with_tag(SplitTag::Train);
    if (!train.empty()) return train;
    std::vector<std::size_t> all(ds.n_rows);
    for (std::size_t r = 0; r < ds.n_rows; ++r) all[r] = r;
    return all;
}

} // namespace

Dataset filter_missingness(const Dataset& ds, double threshold,
                           std::vector<std::string>* dropped) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ConfigError("missingness threshold must be in (0, 1]");
    Dataset work = ds;
    work.recompute_missing_fractions();

    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < work.n_features; ++j) {
        if (work.meta[j].missing_fraction > threshold) {
            if (dropped) dropped->push_back(work.meta[j].name);
        } else {
            keep.push_back(j);
        }
    }
    if (keep.empty()) throw ConfigError("missingness filter dropped every feature");

    Dataset out = Dataset::make(work.n_rows, keep.size());
    out.labels = work.labels;
    out.split = work.split;
    out.synthetic = work.synthetic;
    for (std::size_t c = 0; c < keep.size(); ++c) out.meta[c] = work.meta[keep[c]];
    for (std::size_t r = 0; r < work.n_rows; ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) {
            out.at(r, c) = work.at(r, keep[c]);
            out.mask[r * out.n_features + c] = work.mask[r * work.n_features + keep[c]];
        }
    return out;
}

Dataset encode_flags(const Dataset& ds) {
    Dataset out = ds;
    for (std::size_t j = 0; j < out.n_features; ++j) {
        if (out.meta[j].kind != FeatureKind::BinaryFlag) continue;
        for (std::size_t r = 0; r < out.n_rows; ++r) {
            if (out.is_missing(r, j)) {
                out.at(r, j) = 0.0; // absence
                out.set_missing(r, j, false);
            } else {
                const double v = out.at(r, j);
                if (v < 0.0 || v > 1.0)
                    throw DataError("flag feature '" + out.meta[j].name + "' has value " +
                                    std::to_string(v) + " outside [0,1] at row " + std::to_string(r));
            }
        }
    }
    return out;
}

Dataset knn_impute(const Dataset& ds, int k) {
    if (k < 1) throw ConfigError("knn k must be >= 1");
    Dataset out = ds;
    const auto train = fit_rows(ds);

    // Per-feature train sd (population), for distance scaling.
    std::vector<double> scale(ds.n_features, 1.0);
    for (std::size_t j = 0; j < ds.n_features; ++j) {
        double sum = 0.0, sum2 = 0.0;
        std::size_t n = 0;
        for (std::size_t r : train)
            if (!ds.is_missing(r, j)) {
                sum += ds.at(r, j);
                sum2 += ds.at(r, j) * ds.at(r, j);
                ++n;
            }
        if (n > 0) {
            const double mean = sum / n;
            const double var = std::max(0.0, sum2 / n - mean * mean);
            scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
        }
    }

    // Train rows observing each feature, in ascending index order.
    std::vector<std::vector<std::size_t>> donors(ds.n_features);
    for (std::size_t j = 0; j < ds.n_features; ++j)
        for (std::size_t r : train)
            if (!ds.is_missing(r, j)) donors[j].push_back(r);

    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            if (!ds.is_missing(r, j)) continue;
            std::vector<std::size_t> cands;
            for (std::size_t d : donors[j])
                if (d != r) cands.push_back(d);
            if (cands.size() < static_cast<std::size_t>(k))
                throw DataError("feature '" + ds.meta[j].name + "' observed in fewer than k=" +
                                std::to_string(k) + " train rows, cannot impute");

            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(cands.size());
            for (std::size_t d : cands) {
                double s = 0.0;
                std::size_t shared = 0;
                for (std::size_t f = 0; f < ds.n_features; ++f) {
                    if (ds.is_missing(r, f) || ds.is_missing(d, f)) continue;
                    const double diff = (ds.at(r, f) - ds.at(d, f)) / scale[f];
                    s += diff * diff;
                    ++shared;
                }
                dist.emplace_back(shared ? s : std::numeric_limits<double>::infinity(), d);
            }
            std::sort(dist.begin(), dist.end()); // distance, then ascending index
            double mean = 0.0;
            for (int i = 0; i < k; ++i) mean += ds.at(dist[i].second, j);
            out.at(r, j) = mean / k;
            out.set_missing(r, j, false);
        }
    }
    return out;
}

Dataset zscore_fit_apply(const Dataset& ds, std::vector<std::string>* warnings) {
    if (ds.any_missing()) throw DataError("z-score requires a fully imputed dataset");
    Dataset out = ds;
    const auto train = fit_rows(ds);
    if (train.empty()) throw DataError("z-score requires a non-empty train split");

    for (std::size_t j = 0; j < ds.n_features; ++j) {
        if (ds.meta[j].kind != FeatureKind::Continuous) continue;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t r : train) {
            sum += ds.at(r, j);
            sum2 += ds.at(r, j) * ds.at(r, j);
        }
        const double mean = sum / train.size();
        const double var = std::max(0.0, sum2 / train.size() - mean * mean);
        const double sd = std::sqrt(var); // population sd
        out.meta[j].mean = mean;
        out.meta[j].sd = sd;
        if (sd == 0.0) {
            if (warnings)
                warnings->push_back("feature '" + ds.meta[j].name + "' is constant on train; output zeroed");
            for (std::size_t r = 0; r < ds.n_rows; ++r) out.at(r, j) = 0.0;
        } else {
            for (std::size_t r = 0; r < ds.n_rows; ++r) out.at(r, j) = (ds.at(r, j) - mean) / sd;
        }
    }
    return out;
}

PreprocessResult preprocess(const Dataset& ds, double missingness_threshold, int knn_k) {
    PreprocessResult res;
    res.manifest.missingness_threshold = missingness_threshold;
    res.manifest.knn_k = knn_k;
    Dataset d = filter_missingness(ds, missingness_threshold, &res.manifest.dropped_features);
    d = encode_flags(d);
    d = knn_impute(d, knn_k);
    d = zscore_fit_apply(d, &res.manifest.warnings);
    res.manifest.feature_meta = d.meta;
    res.dataset = std::move(d);
    return res;
}

std::string PreprocessManifest::to_json() const {
    nlohmann::ordered_json j;
    j["missingness_threshold"] = missingness_threshold;
    j["knn_k"] = knn_k;
    j["dropped_features"] = dropped_features;
    j["warnings"] = warnings;
    auto feats = nlohmann::ordered_json::array();
    for (const auto& m : feature_meta) {
        feats.push_back({{"name", m.name},
                         {"kind", m.kind == FeatureKind::BinaryFlag ? "binary_flag" : "continuous"},
                         {"missing_fraction", m.missing_fraction},
                         {"mean", m.mean},
                         {"sd", m.sd}});
    }
    j["features"] = feats;
    return j.dump(2);
}

PreprocessManifest PreprocessManifest::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    PreprocessManifest m;
    m.missingness_threshold = j.at("missingness_threshold").get<double>();
    m.knn_k = j.at("knn_k").get<int>();
    m.dropped_features = j.at("dropped_features").get<std::vector<std::string>>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& f : j.at("features")) {
        FeatureMeta fm;
        fm.name = f.at("name").get<std::string>();
        fm.kind = f.at("kind").get<std::string>() == "binary_flag" ? FeatureKind::BinaryFlag
                                                                   : FeatureKind::Continuous;
        fm.missing_fraction = f.at("missing_fraction").get<double>();
        fm.mean = f.at("mean").get<double>();
        fm.sd = f.at("sd").get<double>();
        m.feature_meta.push_back(fm);
    }
    return m;
}

} // namespace aki
