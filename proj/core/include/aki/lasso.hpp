#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aki/dataset.hpp"

namespace aki {

struct LassoFit {
    double lambda = 0.0;
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
    std::vector<std::string> selected; // nonzero-coefficient features
    // (lambda, mean validation log-loss), lambdas strictly decreasing
    std::vector<std::pair<double, double>> cv_curve;
};

// Penalized objective is mean negative log-likelihood + lambda * ||beta||_1;
// the intercept is unpenalized.
struct LogisticDesign {
    const double* x = nullptr; // row-major n x p
    std::size_t n = 0;
    std::size_t p = 0;
    const int* y = nullptr;
};

// Smallest lambda at which every coefficient is zero.
double lasso_lambda_max(const LogisticDesign& d);

// Geometric grid from lambda_max down to lambda_max * min_ratio.
std::vector<double> lasso_lambda_grid(const LogisticDesign& d, int grid_size = 100,
                                      double min_ratio = 1e-3);

// Cyclic coordinate descent with quadratic majorization at one lambda.
// Warm-start state is updated in place.
void lasso_fit_at(const LogisticDesign& d, double lambda, double& intercept,
                  std::vector<double>& beta, double tol = 1e-7, int max_iter = 10000);

// Mean-NLL gradient with respect to (intercept, beta); used for KKT checks.
void logistic_gradient(const LogisticDesign& d, double intercept,
                       const std::vector<double>& beta, double& g0, std::vector<double>& g);

// Cross-validated path fit over the train rows of `ds` (all rows when no
// split has been tagged). Ties in CV loss resolve toward larger lambda.
LassoFit fit_lasso_path(const Dataset& ds, const std::vector<double>& lambdas, int folds,
                        std::uint64_t seed, int threads = 1);

std::vector<std::string> select_features(const LassoFit& fit,
                                         const std::optional<std::vector<std::string>>& expert_allowlist =
                                             std::nullopt);

} // namespace aki
