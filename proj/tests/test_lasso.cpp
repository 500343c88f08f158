#include <cmath>
#include <vector>

#include "aki/errors.hpp"
#include "aki/lasso.hpp"
#include "aki/rng.hpp"
#include "doctest.h"

using namespace aki;

namespace {

struct Toy {
    std::vector<double> x;
    std::vector<int> y;
    std::size_t n = 0, p = 0;
    LogisticDesign design() const { return {x.data(), n, p, y.data()}; }
};

// Logistic data with the given coefficients on standard-normal features.
Toy make_toy(std::size_t n, std::size_t p, const std::vector<double>& beta, double intercept,
             std::uint64_t seed) {
    Toy t;
    t.n = n;
    t.p = p;
    t.x.resize(n * p);
    t.y.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double z = intercept;
        for (std::size_t j = 0; j < p; ++j) {
            t.x[i * p + j] = rng.normal();
            z += beta[j] * t.x[i * p + j];
        }
        t.y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    }
    return t;
}

Dataset toy_dataset(const Toy& t) {
    Dataset ds = Dataset::make(t.n, t.p);
    ds.values = t.x;
    ds.labels = t.y;
    for (std::size_t j = 0; j < t.p; ++j) ds.meta[j].name = "f" + std::to_string(j);
    return ds;
}

// Unregularized logistic fit by plain gradient descent, the independent
// oracle for the lambda = 0 case.
void gd_oracle(const LogisticDesign& d, double& b0, std::vector<double>& beta) {
    b0 = 0.0;
    beta.assign(d.p, 0.0);
    double lr = 1.0;
    for (int it = 0; it < 2000000; ++it) {
        double g0;
        std::vector<double> g;
        logistic_gradient(d, b0, beta, g0, g);
        double gn = std::fabs(g0);
        for (double v : g) gn = std::max(gn, std::fabs(v));
        if (gn < 1e-10) return;
        b0 -= lr * g0;
        for (std::size_t j = 0; j < d.p; ++j) beta[j] -= lr * g[j];
    }
}

} // namespace

TEST_CASE("lambda >= lambda_max fully shrinks the coefficients") {
    const auto t = make_toy(120, 4, {0.8, -0.5, 0.3, 0.0}, -0.4, 3);
    const auto d = t.design();
    const double lmax = lasso_lambda_max(d);

    double pos = 0;
    for (int y : t.y) pos += y;
    const double prior = std::log(pos / (t.n - pos));

    double b0 = prior;
    std::vector<double> beta(4, 0.0);
    lasso_fit_at(d, lmax, b0, beta);
    for (double b : beta) CHECK(b == 0.0);
    CHECK(b0 == doctest::Approx(prior).epsilon(1e-8));

    b0 = prior;
    beta.assign(4, 0.0);
    lasso_fit_at(d, lmax * 2.0, b0, beta);
    for (double b : beta) CHECK(b == 0.0);

    // just below lambda_max at least one coefficient activates
    b0 = prior;
    beta.assign(4, 0.0);
    lasso_fit_at(d, lmax * 0.9, b0, beta);
    double nonzero = 0;
    for (double b : beta) nonzero += (b != 0.0);
    CHECK(nonzero >= 1);
}

TEST_CASE("lambda = 0 matches a gradient-descent oracle per coefficient") {
    const auto t = make_toy(200, 3, {0.7, -0.4, 0.2}, 0.1, 5);
    const auto d = t.design();
    double b0 = 0.0;
    std::vector<double> beta(3, 0.0);
    lasso_fit_at(d, 0.0, b0, beta, 1e-9, 100000);

    double ob0;
    std::vector<double> obeta;
    gd_oracle(d, ob0, obeta);
    CHECK(std::fabs(b0 - ob0) < 1e-4);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(beta[j] - obeta[j]) < 1e-4);
}

TEST_CASE("KKT conditions hold at the fitted point") {
    const auto t = make_toy(300, 6, {1.0, -0.8, 0.5, 0.0, 0.0, 0.0}, -0.2, 7);
    const auto d = t.design();
    const double lambda = 0.02;
    double b0 = 0.0;
    std::vector<double> beta(6, 0.0);
    lasso_fit_at(d, lambda, b0, beta);

    double g0;
    std::vector<double> g;
    logistic_gradient(d, b0, beta, g0, g);
    CHECK(std::fabs(g0) <= 1e-6); // intercept unpenalized
    for (std::size_t j = 0; j < 6; ++j) {
        if (beta[j] != 0.0) {
            CHECK(std::fabs(g[j] + lambda * (beta[j] > 0 ? 1.0 : -1.0)) <= 1e-6);
        } else {
            CHECK(std::fabs(g[j]) <= lambda + 1e-6);
        }
    }
}

TEST_CASE("cv path: lambda grid is geometric and the curve is recorded") {
    const auto t = make_toy(150, 4, {1.0, 0.0, -0.7, 0.0}, 0.0, 9);
    const auto lambdas = lasso_lambda_grid(t.design(), 20, 1e-3);
    REQUIRE(lambdas.size() == 20);
    CHECK(lambdas.front() == doctest::Approx(lasso_lambda_max(t.design())));
    CHECK(lambdas.back() == doctest::Approx(lambdas.front() * 1e-3).epsilon(1e-9));
    for (std::size_t i = 1; i < lambdas.size(); ++i) CHECK(lambdas[i] < lambdas[i - 1]);

    const auto fit = fit_lasso_path(toy_dataset(t), lambdas, 3, 11, 2);
    CHECK(fit.cv_curve.size() == 20);
    CHECK(fit.coefficients.size() == 4);
    CHECK(fit.feature_names.size() == 4);
    // the selected lambda is on the grid
    bool on_grid = false;
    for (double l : lambdas) on_grid |= (l == fit.lambda);
    CHECK(on_grid);
}

TEST_CASE("planted informative features are recovered") {
    // 20 features, 5 informative; a single-seed version of the 50-seed
    // acceptance sweep
    std::vector<double> beta(20, 0.0);
    beta[0] = 1.5;
    beta[3] = -1.2;
    beta[7] = 1.0;
    beta[11] = -1.4;
    beta[15] = 1.1;
    const auto t = make_toy(500, 20, beta, 0.0, 13);
    const auto lambdas = lasso_lambda_grid(t.design(), 40, 1e-3);
    const auto fit = fit_lasso_path(toy_dataset(t), lambdas, 5, 13, 4);

    int informative = 0, noise = 0;
    for (std::size_t j = 0; j < 20; ++j) {
        if (fit.coefficients[j] == 0.0) continue;
        (beta[j] != 0.0 ? informative : noise) += 1;
    }
    CHECK(informative >= 4);
}

TEST_CASE("selection: all-zero fit without allowlist is an error") {
    LassoFit fit;
    fit.feature_names = {"a", "b"};
    fit.coefficients = {0.0, 0.0};
    CHECK_THROWS_AS(select_features(fit), DataError);
}

TEST_CASE("selection intersects nonzero features with the allowlist") {
    LassoFit fit;
    fit.feature_names = {"a", "b", "c"};
    fit.coefficients = {0.5, -0.2, 0.1};
    fit.selected = {"a", "b", "c"};
    const std::vector<std::string> allow = {"b", "c", "d"};
    CHECK(select_features(fit, allow) == std::vector<std::string>{"b", "c"});
}

TEST_CASE("the 16 standard clinical features survive as a selection fixture") {
    LassoFit fit;
    fit.feature_names = {"alt", "hematocrit", "hemoglobin", "wbc", "anion_gap",
                         "admission_weight", "albumin", "ptt", "po2", "ph",
                         "bilirubin_total", "calcium_total", "iodine", "age", "cci",
                         "gauge20_outside"};
    fit.coefficients.assign(16, 0.1);
    fit.selected = fit.feature_names;
    CHECK(select_features(fit) == fit.feature_names);
}

TEST_CASE("lambda_max zeroes the gradient bound exactly") {
    const auto t = make_toy(80, 3, {0.5, 0.2, -0.9}, 0.0, 17);
    const auto d = t.design();
    const double lmax = lasso_lambda_max(d);
    double ybar = 0;
    for (int y : t.y) ybar += y;
    ybar /= t.n;
    double expect = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.n; ++i) s += t.x[i * 3 + j] * (t.y[i] - ybar);
        expect = std::max(expect, std::fabs(s) / t.n);
    }
    CHECK(lmax == doctest::Approx(expect).epsilon(1e-12));
}
