#include "aki/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aki/errors.hpp"
#include "aki/parallel.hpp"
#include "aki/rng.hpp"
#include "json.hpp"

namespace aki {

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("auroc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += y ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw DataError("auroc undefined: labels are single-class");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks; rank sums stay exact in binary (integers and halves)
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]]) rank_sum_pos += midrank;
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += y ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw DataError("roc undefined: labels are single-class");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k)
            labels[order[k]] ? ++tp : ++fp;
        curve.points.push_back({scores[order[i]], static_cast<double>(fp) / neg,
                                static_cast<double>(tp) / pos});
        i = j + 1;
    }
    curve.auroc = auroc(scores, labels);
    return curve;
}

BootstrapCi bootstrap_auroc_ci(const std::vector<double>& scores, const std::vector<int>& labels,
                               int replicates, double level, std::uint64_t seed, int threads) {
    if (replicates < 100) throw ConfigError("bootstrap needs at least 100 replicates");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("bootstrap level must be in (0,1)");
    const std::size_t n = scores.size();
    const int redraw_cap = 10 * replicates;

    std::vector<double> aucs(replicates);
    std::vector<int> redraw_counts(replicates, 0);
    Rng master(seed);
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t rep) {
        Rng rng = master.derive(rep);
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (;;) {
            int ones = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t pick = rng.below(n);
                s[i] = scores[pick];
                y[i] = labels[pick];
                ones += y[i];
            }
            if (ones != 0 && ones != static_cast<int>(n)) break;
            ++redraw_counts[rep];
            if (redraw_counts[rep] > redraw_cap)
                throw DataError("bootstrap: degenerate data, redraw cap exceeded");
        }
        aucs[rep] = auroc(s, y);
    });

    BootstrapCi ci;
    ci.replicates = replicates;
    ci.seed = seed;
    for (int c : redraw_counts) ci.redraws += c;
    if (ci.redraws > redraw_cap) throw DataError("bootstrap: degenerate data, redraw cap exceeded");

    std::sort(aucs.begin(), aucs.end());
    auto percentile = [&](double q) {
        const double pos = q * (replicates - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        const double frac = pos - static_cast<double>(lo);
        return aucs[lo] * (1.0 - frac) + aucs[hi] * frac;
    };
    const double alpha = 1.0 - level;
    ci.low = percentile(alpha / 2.0);
    ci.high = percentile(1.0 - alpha / 2.0);
    return ci;
}

double threshold_at_sensitivity(const RocCurve& curve, double target) {
    if (!(target > 0.0 && target <= 1.0))
        throw ConfigError("target sensitivity must be in (0,1]");
    for (const auto& pt : curve.points) {
        if (pt.tpr >= target) return pt.threshold;
    }
    // tpr reaches 1.0 at the final point, so this is unreachable
    return curve.points.back().threshold;
}

MetricRow confusion_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                            double threshold) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (labels[i]) {
            pred ? ++tp : ++fn;
        } else {
            pred ? ++fp : ++tn;
        }
    }
    if (tp + fn == 0 || tn + fp == 0)
        throw DataError("confusion metrics undefined: labels are single-class");

    MetricRow row;
    row.chosen_threshold = threshold;
    row.accuracy = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
    row.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    row.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    if (tp + fp > 0) row.ppv = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tn + fn > 0) row.npv = static_cast<double>(tn) / static_cast<double>(tn + fn);
    if (row.ppv && (*row.ppv + row.sensitivity) > 0.0)
        row.f1 = 2.0 * *row.ppv * row.sensitivity / (*row.ppv + row.sensitivity);
    return row;
}

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["bootstrap"] = {{"replicates", bootstrap_replicates}, {"seed", bootstrap_seed}};
    j["target_sensitivity"] = target_sensitivity;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["model"] = r.model;
        row["auroc"] = r.auroc;
        row["ci_low"] = r.ci_low;
        row["ci_high"] = r.ci_high;
        row["accuracy"] = r.accuracy;
        if (r.f1) row["f1"] = *r.f1; else row["f1"] = nullptr;
        row["sensitivity"] = r.sensitivity;
        row["specificity"] = r.specificity;
        if (r.ppv) row["ppv"] = *r.ppv; else row["ppv"] = nullptr;
        if (r.npv) row["npv"] = *r.npv; else row["npv"] = nullptr;
        row["chosen_threshold"] = r.chosen_threshold;
        arr.push_back(std::move(row));
    }
    j["models"] = std::move(arr);
    return j.dump(2);
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "model,auroc,ci_low,ci_high,accuracy,f1,sensitivity,specificity,ppv,npv,chosen_threshold\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? std::to_string(*v) : std::string("undefined");
    };
    for (const auto& r : rows) {
        out << r.model << ',' << r.auroc << ',' << r.ci_low << ',' << r.ci_high << ','
            << r.accuracy << ',' << opt(r.f1) << ',' << r.sensitivity << ',' << r.specificity
            << ',' << opt(r.ppv) << ',' << opt(r.npv) << ',' << r.chosen_threshold << '\n';
    }
    return out.str();
}

} // namespace aki
