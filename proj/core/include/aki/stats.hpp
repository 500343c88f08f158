#pragma once

#include <string>
#include <vector>

namespace aki {

struct TTestResult {
    std::string feature;
    double mean_a = 0, sd_a = 0;
    std::size_t n_a = 0;
    double mean_b = 0, sd_b = 0;
    std::size_t n_b = 0;
    double t_stat = 0;
    double dof = 0;     // Welch-Satterthwaite
    double p_value = 1; // two-sided
    bool degenerate = false;
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

TTestResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

TTestResult welch_t_summary(double mean_a, double sd_a, std::size_t n_a,
                            double mean_b, double sd_b, std::size_t n_b);

} // namespace aki
