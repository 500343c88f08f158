#include "aki/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "aki/errors.hpp"
#include "aki/rng.hpp"

namespace aki {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Lower Cholesky factor; throws on non-PSD input.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t p) {
    std::vector<double> l(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
            if (i == j) {
                if (s <= 0.0) throw ConfigError("correlation matrix is not positive definite");
                l[i * p + i] = std::sqrt(s);
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    return l;
}

} // namespace

SynthResult generate(const SynthSpec& spec) {
    if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0))
        throw ConfigError("synth prevalence must be in (0,1)");

    SynthResult result;
    result.feature_names =
        spec.feature_names.empty() ? standard_feature_columns() : spec.feature_names;
    const std::size_t p = result.feature_names.size();

    result.true_coefficients = spec.true_coefficients;
    if (result.true_coefficients.empty()) result.true_coefficients.assign(p, 0.0);
    if (result.true_coefficients.size() != p)
        throw ConfigError("synth true_coefficients length does not match feature count");
    if (!spec.missing_rates.empty() && spec.missing_rates.size() != p)
        throw ConfigError("synth missing_rates length does not match feature count");
    for (double m : spec.missing_rates)
        if (m < 0.0 || m >= 1.0) throw ConfigError("synth missing rates must be in [0,1)");

    std::vector<double> chol;
    if (!spec.correlation.empty()) {
        if (spec.correlation.size() != p * p)
            throw ConfigError("synth correlation matrix must be p x p");
        chol = cholesky(spec.correlation, p);
    }

    Rng master(spec.seed);
    Rng feat_rng = master.derive(1);
    Rng label_rng = master.derive(2);
    Rng miss_rng = master.derive(3);
    Rng noise_rng = master.derive(4);

    const std::size_t n = spec.n_rows;
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    std::vector<double> g(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) g[j] = feat_rng.normal();
        if (chol.empty()) {
            x[i] = g;
        } else {
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k <= j; ++k) s += chol[j * p + k] * g[k];
                x[i][j] = s;
            }
        }
        // keep flag columns inside [0,1] and age physiologic
        for (std::size_t j = 0; j < p; ++j) {
            if (is_flag_feature(result.feature_names[j])) {
                x[i][j] = sigmoid(x[i][j]);
            } else if (result.feature_names[j] == "age") {
                x[i][j] = std::clamp(50.0 + 10.0 * x[i][j], 18.0, 80.0);
            }
        }
    }

    // center emitted columns so beta acts on mean-zero signals
    std::vector<double> mean(p, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);

    result.true_scores.resize(n);
    std::vector<double> latent(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            s += result.true_coefficients[j] * (x[i][j] - mean[j]);
        result.true_scores[i] = s;
        latent[i] = s + (spec.noise_sd > 0.0 ? spec.noise_sd * noise_rng.normal() : 0.0);
    }

    // bisection on the intercept so mean event probability hits the target
    double lo = -30.0, hi = 30.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double m = 0.0;
        for (double l : latent) m += sigmoid(mid + l);
        (m / static_cast<double>(n) < spec.prevalence ? lo : hi) = mid;
    }
    result.intercept = 0.5 * (lo + hi);

    result.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        result.labels[i] = label_rng.uniform() < sigmoid(result.intercept + latent[i]) ? 1 : 0;

    result.cohort.funnel_stages = {"ingested"};
    result.cohort.funnel_counts = {n};
    result.cohort.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        StayRecord& rec = result.cohort.records[i];
        rec.stay_id = "S" + std::to_string(100000 + i);
        rec.subject_id = "P" + std::to_string(100000 + i);
        const int age_idx = [&] {
            for (std::size_t j = 0; j < p; ++j)
                if (result.feature_names[j] == "age") return static_cast<int>(j);
            return -1;
        }();
        rec.age_years = age_idx >= 0 ? x[i][age_idx] : 50.0;
        rec.icu_los_hours = 72.0;
        rec.admission_seq = 1;
        rec.icd_codes = {"K7030"};
        rec.explicit_label = result.labels[i];
        for (std::size_t j = 0; j < p; ++j) {
            const bool missing =
                !spec.missing_rates.empty() && miss_rng.uniform() < spec.missing_rates[j];
            rec.raw_features[result.feature_names[j]] =
                missing ? std::optional<double>{} : std::optional<double>{x[i][j]};
        }
    }
    return result;
}

void write_cohort_csv(const SynthResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out.precision(17);
    out << "stay_id,subject_id,age,icu_los_hours,admission_seq,icd_codes,label";
    for (const auto& name : result.feature_names) out << ',' << name;
    out << '\n';
    for (const auto& rec : result.cohort.records) {
        out << rec.stay_id << ',' << rec.subject_id << ',' << rec.age_years << ','
            << rec.icu_los_hours << ',' << rec.admission_seq << ',';
        for (std::size_t c = 0; c < rec.icd_codes.size(); ++c)
            out << (c ? ";" : "") << rec.icd_codes[c];
        out << ',' << (rec.explicit_label ? *rec.explicit_label : 0);
        for (const auto& name : result.feature_names) {
            out << ',';
            const auto& v = rec.raw_features.at(name);
            if (v) out << *v;
        }
        out << '\n';
    }
}

} // namespace aki
