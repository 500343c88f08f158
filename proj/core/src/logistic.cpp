#include <cmath>
#include <limits>
#include <vector>

#include "aki/errors.hpp"
#include "aki/models.hpp"

namespace aki {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Cholesky solve of A x = b for symmetric positive definite A.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
            if (i == j) {
                if (s <= 0.0) throw NumericError("logistic fit: Hessian not positive definite");
                a[i * m + i] = std::sqrt(s);
            } else {
                a[i * m + j] = s / a[j * m + j];
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * m + k] * b[k];
        b[i] = s / a[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= a[k * m + i] * b[k];
        b[i] = s / a[i * m + i];
    }
    return b;
}

double objective(const LogisticDesign& d, double b0, const std::vector<double>& beta,
                 double l2_strength) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        double z = b0;
        for (std::size_t j = 0; j < d.p; ++j) z += d.x[i * d.p + j] * beta[j];
        loss += d.y[i] ? std::log1p(std::exp(-z)) : std::log1p(std::exp(-z)) + z;
    }
    loss /= static_cast<double>(d.n);
    for (double b : beta) loss += l2_strength * b * b;
    return loss;
}

void newton_fit(const LogisticDesign& d, double l2_strength, double& b0,
                std::vector<double>& beta) {
    const std::size_t p = d.p;
    const std::size_t m = p + 1; // intercept last
    const double n = static_cast<double>(d.n);
    beta.assign(p, 0.0);
    b0 = 0.0;

    constexpr double grad_tol = 1e-8;
    constexpr int max_iter = 100;

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<double> grad(m, 0.0);
        std::vector<double> hess(m * m, 0.0);
        for (std::size_t i = 0; i < d.n; ++i) {
            double z = b0;
            for (std::size_t j = 0; j < p; ++j) z += d.x[i * p + j] * beta[j];
            const double pi = sigmoid(z);
            const double resid = pi - d.y[i];
            const double w = pi * (1.0 - pi);
            for (std::size_t j = 0; j < p; ++j) grad[j] += d.x[i * p + j] * resid;
            grad[p] += resid;
            for (std::size_t j = 0; j < p; ++j) {
                for (std::size_t k = 0; k <= j; ++k)
                    hess[j * m + k] += w * d.x[i * p + j] * d.x[i * p + k];
                hess[j * m + p] += w * d.x[i * p + j];
            }
            hess[p * m + p] += w;
        }
        for (std::size_t j = 0; j < m; ++j) grad[j] /= n;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k <= j; ++k) hess[j * m + k] /= n;
        for (std::size_t j = 0; j < p; ++j) {
            grad[j] += 2.0 * l2_strength * beta[j];
            hess[j * m + j] += 2.0 * l2_strength;
        }
        // mirror lower triangle, mild ridge for conditioning
        for (std::size_t j = 0; j < m; ++j) {
            hess[j * m + j] += 1e-12;
            for (std::size_t k = j + 1; k < m; ++k) hess[j * m + k] = hess[k * m + j];
        }

        double gnorm = 0.0;
        for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm <= grad_tol) return;

        const std::vector<double> step = solve_spd(hess, grad, m);

        // backtracking on the penalized objective
        const double f0 = objective(d, b0, beta, l2_strength);
        double scale = 1.0;
        for (int ls = 0; ls < 50; ++ls) {
            std::vector<double> cand = beta;
            for (std::size_t j = 0; j < p; ++j) cand[j] -= scale * step[j];
            const double cand0 = b0 - scale * step[p];
            const double f1 = objective(d, cand0, cand, l2_strength);
            if (f1 <= f0) {
                beta = std::move(cand);
                b0 = cand0;
                // objective is at floating-point resolution: further Newton
                // steps cannot improve, so accept the current iterate
                if (f0 - f1 <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(f0))
                    return;
                break;
            }
            scale *= 0.5;
            if (ls == 49) throw NumericError("logistic fit: line search failed");
        }
    }
    throw NumericError(
        "logistic fit did not reach gradient tolerance in 100 Newton iterations; "
        "data may be perfectly separable, consider adding regularization");
}

} // namespace

TrainedModel fit_logistic(const Dataset& train, const Hyperparams& hp) {
    auto rows = train.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(train.n_rows);
        for (std::size_t r = 0; r < train.n_rows; ++r) rows[r] = r;
    }
    Dataset d = train.subset_rows(rows);
    if (d.any_missing()) throw DataError("logistic fit requires a fully imputed dataset");
    const LogisticDesign design{d.values.data(), d.n_rows, d.n_features, d.labels.data()};

    // penalty: 0 = none, 1 = l1, 2 = l2
    int penalty = 0;
    if (auto it = hp.find("penalty"); it != hp.end()) penalty = static_cast<int>(it->second);
    double strength = 0.0;
    if (auto it = hp.find("strength"); it != hp.end()) strength = it->second;

    TrainedModel model;
    model.family = ModelFamily::Logistic;
    model.hyperparams = hp;
    model.feature_names = d.feature_names();

    if (penalty == 1) {
        double pos = 0;
        for (std::size_t i = 0; i < d.n_rows; ++i) pos += d.labels[i];
        if (pos == 0 || pos == static_cast<double>(d.n_rows))
            throw DataError("logistic fit: training labels are single-class");
        model.logistic.intercept = std::log(pos / (d.n_rows - pos));
        model.logistic.weights.assign(d.n_features, 0.0);
        lasso_fit_at(design, strength, model.logistic.intercept, model.logistic.weights);
    } else {
        newton_fit(design, penalty == 2 ? strength : 0.0, model.logistic.intercept,
                   model.logistic.weights);
    }
    return model;
}

} // namespace aki
