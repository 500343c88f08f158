#include "aki/stats.hpp"

#include <cmath>
#include <limits>

#include "aki/errors.hpp"

namespace aki {

namespace {

// Modified Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw NumericError("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (dof <= 0.0) throw NumericError("student_t_cdf: dof must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = dof / (dof + t * t);
    const double tail = incomplete_beta(dof / 2.0, 0.5, x); // P(|T| > |t|)
    return t >= 0.0 ? 1.0 - 0.5 * tail : 0.5 * tail;
}

namespace {

TTestResult welch_from_summary(double mean_a, double sd_a, std::size_t n_a,
                               double mean_b, double sd_b, std::size_t n_b) {
    if (n_a < 2 || n_b < 2) throw DataError("welch_t: each group needs at least 2 observations");
    TTestResult res;
    res.mean_a = mean_a;
    res.sd_a = sd_a;
    res.n_a = n_a;
    res.mean_b = mean_b;
    res.sd_b = sd_b;
    res.n_b = n_b;

    const double va = sd_a * sd_a / static_cast<double>(n_a);
    const double vb = sd_b * sd_b / static_cast<double>(n_b);
    const double se2 = va + vb;
    if (se2 == 0.0) {
        // zero variance in both groups
        if (mean_a == mean_b) {
            res.t_stat = 0.0;
            res.p_value = 1.0;
            res.dof = static_cast<double>(n_a + n_b - 2);
        } else {
            res.t_stat = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
            res.dof = static_cast<double>(n_a + n_b - 2);
            res.degenerate = true;
        }
        return res;
    }
    res.t_stat = (mean_a - mean_b) / std::sqrt(se2);
    res.dof = se2 * se2 / (va * va / (n_a - 1) + vb * vb / (n_b - 1));
    res.p_value = res.t_stat == 0.0
                      ? 1.0
                      : incomplete_beta(res.dof / 2.0, 0.5, res.dof / (res.dof + res.t_stat * res.t_stat));
    return res;
}

} // namespace

TTestResult welch_t_summary(double mean_a, double sd_a, std::size_t n_a,
                            double mean_b, double sd_b, std::size_t n_b) {
    return welch_from_summary(mean_a, sd_a, n_a, mean_b, sd_b, n_b);
}

TTestResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
    auto stats = [](const std::vector<double>& s, double& mean, double& sd) {
        double sum = 0.0;
        for (double v : s) sum += v;
        mean = sum / s.size();
        double ss = 0.0;
        for (double v : s) ss += (v - mean) * (v - mean);
        sd = std::sqrt(ss / (s.size() - 1)); // sample sd
    };
    if (sample_a.size() < 2 || sample_b.size() < 2)
        throw DataError("welch_t: each group needs at least 2 observations");
    double ma, sa, mb, sb;
    stats(sample_a, ma, sa);
    stats(sample_b, mb, sb);
    return welch_from_summary(ma, sa, sample_a.size(), mb, sb, sample_b.size());
}

} // namespace aki
