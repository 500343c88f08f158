#include "aki/lasso.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <set>

#include "aki/errors.hpp"
#include "aki/parallel.hpp"
#include "aki/split.hpp"

namespace aki {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double soft_threshold(double u, double lambda) {
    // relative slack keeps coordinates exactly zero when |u| sits on the
    // penalty boundary (e.g. lambda = lambda_max) up to rounding noise
    const double thr = lambda * (1.0 + 1e-10);
    if (u > thr) return u - lambda;
    if (u < -thr) return u + lambda;
    return 0.0;
}

double prevalence_log_odds(const LogisticDesign& d) {
    double pos = 0;
    for (std::size_t i = 0; i < d.n; ++i) pos += d.y[i];
    const double p = pos / static_cast<double>(d.n);
    if (p <= 0.0 || p >= 1.0) throw DataError("lasso: training labels are single-class");
    return std::log(p / (1.0 - p));
}

double mean_log_loss(const LogisticDesign& d, double intercept, const std::vector<double>& beta) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        double z = intercept;
        for (std::size_t j = 0; j < d.p; ++j) z += d.x[i * d.p + j] * beta[j];
        // numerically stable -log-likelihood
        loss += d.y[i] ? std::log1p(std::exp(-z)) : std::log1p(std::exp(-z)) + z;
    }
    return loss / static_cast<double>(d.n);
}

} // namespace

double lasso_lambda_max(const LogisticDesign& d) {
    double pos = 0;
    for (std::size_t i = 0; i < d.n; ++i) pos += d.y[i];
    const double pbar = pos / static_cast<double>(d.n);
    double lmax = 0.0;
    for (std::size_t j = 0; j < d.p; ++j) {
        double g = 0.0;
        for (std::size_t i = 0; i < d.n; ++i) g += d.x[i * d.p + j] * (d.y[i] - pbar);
        lmax = std::max(lmax, std::fabs(g) / static_cast<double>(d.n));
    }
    return lmax;
}

std::vector<double> lasso_lambda_grid(const LogisticDesign& d, int grid_size, double min_ratio) {
    if (grid_size < 2) throw ConfigError("lambda grid needs at least 2 points");
    const double lmax = lasso_lambda_max(d);
    std::vector<double> grid(grid_size);
    const double lmin = lmax * min_ratio;
    for (int g = 0; g < grid_size; ++g) {
        const double t = static_cast<double>(g) / (grid_size - 1);
        grid[g] = lmax * std::pow(lmin / lmax, t);
    }
    return grid;
}

void logistic_gradient(const LogisticDesign& d, double intercept, const std::vector<double>& beta,
                       double& g0, std::vector<double>& g) {
    g.assign(d.p, 0.0);
    g0 = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        double z = intercept;
        for (std::size_t j = 0; j < d.p; ++j) z += d.x[i * d.p + j] * beta[j];
        const double resid = sigmoid(z) - d.y[i];
        g0 += resid;
        for (std::size_t j = 0; j < d.p; ++j) g[j] += d.x[i * d.p + j] * resid;
    }
    g0 /= static_cast<double>(d.n);
    for (std::size_t j = 0; j < d.p; ++j) g[j] /= static_cast<double>(d.n);
}

void lasso_fit_at(const LogisticDesign& d, double lambda, double& intercept,
                  std::vector<double>& beta, double tol, int max_iter) {
    if (beta.size() != d.p) beta.assign(d.p, 0.0);
    const double n = static_cast<double>(d.n);

    // Majorizer curvature per coordinate: (1/4n) sum x_ij^2.
    std::vector<double> curv(d.p, 0.0);
    for (std::size_t j = 0; j < d.p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.n; ++i) s += d.x[i * d.p + j] * d.x[i * d.p + j];
        curv[j] = s / (4.0 * n);
    }

    std::vector<double> z(d.n, intercept);
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.p; ++j) z[i] += d.x[i * d.p + j] * beta[j];

    double delta = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        delta = 0.0;

        double g0 = 0.0;
        for (std::size_t i = 0; i < d.n; ++i) g0 += sigmoid(z[i]) - d.y[i];
        g0 /= n;
        const double d0 = -g0 / 0.25;
        if (d0 != 0.0) {
            intercept += d0;
            for (std::size_t i = 0; i < d.n; ++i) z[i] += d0;
            delta = std::max(delta, std::fabs(d0));
        }

        for (std::size_t j = 0; j < d.p; ++j) {
            if (curv[j] == 0.0) continue; // all-zero column
            double gj = 0.0;
            for (std::size_t i = 0; i < d.n; ++i) gj += d.x[i * d.p + j] * (sigmoid(z[i]) - d.y[i]);
            gj /= n;
            const double u = curv[j] * beta[j] - gj;
            const double bnew = soft_threshold(u, lambda) / curv[j];
            const double dj = bnew - beta[j];
            if (dj != 0.0) {
                beta[j] = bnew;
                for (std::size_t i = 0; i < d.n; ++i) z[i] += d.x[i * d.p + j] * dj;
                delta = std::max(delta, std::fabs(dj));
            }
        }
        if (delta < tol) return;
    }
    throw NumericError("lasso did not converge at lambda=" + std::to_string(lambda) +
                       " (final max coefficient change " + std::to_string(delta) + ")");
}

LassoFit fit_lasso_path(const Dataset& ds, const std::vector<double>& lambdas, int folds,
                        std::uint64_t seed, int threads) {
    if (ds.any_missing()) throw DataError("lasso requires a fully preprocessed dataset");
    if (folds < 2) throw ConfigError("lasso CV needs at least 2 folds");
    for (std::size_t g = 1; g < lambdas.size(); ++g)
        if (!(lambdas[g] < lambdas[g - 1]))
            throw ConfigError("lambda grid must be strictly decreasing");

    auto rows = ds.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(ds.n_rows);
        for (std::size_t r = 0; r < ds.n_rows; ++r) rows[r] = r;
    }
    Dataset train = ds.subset_rows(rows);
    const LogisticDesign full{train.values.data(), train.n_rows, train.n_features,
                              train.labels.data()};

    auto fold_specs = stratified_kfold(train.labels, folds, seed);

    // Per-fold validation loss along the path, fitted warm-started.
    std::vector<std::vector<double>> fold_loss(folds, std::vector<double>(lambdas.size(), 0.0));
    parallel_for(folds, threads, [&](std::size_t f) {
        const auto& spec = fold_specs[f];
        Dataset tr = train.subset_rows(spec.train_indices);
        Dataset va = train.subset_rows(spec.test_indices);
        const LogisticDesign dtr{tr.values.data(), tr.n_rows, tr.n_features, tr.labels.data()};
        const LogisticDesign dva{va.values.data(), va.n_rows, va.n_features, va.labels.data()};

        double b0 = prevalence_log_odds(dtr);
        std::vector<double> beta(dtr.p, 0.0);
        for (std::size_t g = 0; g < lambdas.size(); ++g) {
            lasso_fit_at(dtr, lambdas[g], b0, beta);
            fold_loss[f][g] = mean_log_loss(dva, b0, beta);
        }
    });

    LassoFit fit;
    fit.feature_names = train.feature_names();
    fit.cv_curve.reserve(lambdas.size());
    std::size_t best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        double mean = 0.0;
        for (int f = 0; f < folds; ++f) mean += fold_loss[f][g];
        mean /= folds;
        fit.cv_curve.emplace_back(lambdas[g], mean);
        if (mean < best_loss) { // strict: ties keep the larger (earlier) lambda
            best_loss = mean;
            best = g;
        }
    }

    // Final fit on all train rows, warm-started down the path to the winner.
    double b0 = prevalence_log_odds(full);
    std::vector<double> beta(full.p, 0.0);
    for (std::size_t g = 0; g <= best; ++g) lasso_fit_at(full, lambdas[g], b0, beta);

    fit.lambda = lambdas[best];
    fit.intercept = b0;
    fit.coefficients = beta;
    for (std::size_t j = 0; j < full.p; ++j)
        if (beta[j] != 0.0) fit.selected.push_back(fit.feature_names[j]);
    return fit;
}

std::vector<std::string> select_features(const LassoFit& fit,
                                         const std::optional<std::vector<std::string>>& expert_allowlist) {
    std::vector<std::string> out;
    if (expert_allowlist) {
        const std::set<std::string> allow(expert_allowlist->begin(), expert_allowlist->end());
        for (const auto& name : fit.selected)
            if (allow.count(name)) out.push_back(name);
    } else {
        out = fit.selected;
    }
    if (out.empty()) throw DataError("feature selection produced an empty set");
    return out;
}

} // namespace aki
