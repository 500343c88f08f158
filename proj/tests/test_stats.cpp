#include <cmath>
#include <vector>

#include "aki/rng.hpp"
#include "aki/stats.hpp"
#include "doctest.h"

using namespace aki;

TEST_CASE("identical samples give t = 0, p = 1") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const auto r = welch_t(x, x);
    CHECK(r.t_stat == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("summary form reproduces published pH comparison") {
    // pH 7.11 (0.36) in 868 train stays vs 7.09 (0.32) in 372 test stays
    const auto r = welch_t_summary(7.11, 0.36, 868, 7.09, 0.32, 372);
    CHECK(std::fabs(r.p_value - 0.314) < 0.02);
}

TEST_CASE("summary form reproduces published PTT comparison") {
    const auto r = welch_t_summary(43.15, 16.42, 868, 42.83, 16.58, 372);
    CHECK(std::fabs(r.p_value - 0.757) < 0.02);
}

TEST_CASE("equal summaries give t = 0, p = 1") {
    const auto r = welch_t_summary(0.0, 1.0, 10, 0.0, 1.0, 10);
    CHECK(r.t_stat == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("unit mean difference with sd 1, n 100 gives t near 7.071") {
    const auto r = welch_t_summary(1.0, 1.0, 100, 0.0, 1.0, 100);
    CHECK(r.t_stat == doctest::Approx(std::sqrt(100.0 / 2.0)).epsilon(1e-9));
}

TEST_CASE("large pH gap across outcome groups is highly significant") {
    // group sizes consistent with ~27% prevalence in 1240 stays
    const auto r = welch_t_summary(7.04, 0.33, 335, 7.14, 0.36, 905);
    CHECK(r.p_value < 0.001);
}

TEST_CASE("welch dof lies between min(n)-1 and n_a+n_b-2") {
    const auto r = welch_t_summary(5.0, 2.0, 30, 4.0, 1.0, 50);
    CHECK(r.dof >= 29.0);
    CHECK(r.dof <= 78.0);
}

TEST_CASE("zero-variance degenerate cases") {
    const auto same = welch_t_summary(3.0, 0.0, 10, 3.0, 0.0, 10);
    CHECK(same.p_value == doctest::Approx(1.0));
    const auto diff = welch_t_summary(3.0, 0.0, 10, 4.0, 0.0, 10);
    CHECK(diff.p_value == doctest::Approx(0.0));
    CHECK(diff.degenerate);
}

TEST_CASE("incomplete beta basic identities") {
    CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    // symmetry: I_x(a,b) = 1 - I_{1-x}(b,a)
    const double a = 2.5, b = 4.0, x = 0.37;
    CHECK(incomplete_beta(a, b, x) ==
          doctest::Approx(1.0 - incomplete_beta(b, a, 1.0 - x)).epsilon(1e-12));
}

TEST_CASE("student t cdf matches closed forms") {
    // dof = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi
    for (double t : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(student_t_cdf(t, 1.0) ==
              doctest::Approx(0.5 + std::atan(t) / 3.14159265358979323846).epsilon(1e-10));
    // dof = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
    for (double t : {-1.0, 0.25, 2.0})
        CHECK(student_t_cdf(t, 2.0) ==
              doctest::Approx(0.5 + t / (2.0 * std::sqrt(2.0 + t * t))).epsilon(1e-10));
}

TEST_CASE("sample form agrees with summary form computed from its own moments") {
    Rng rng(21);
    std::vector<double> a(40), b(55);
    for (auto& v : a) v = rng.normal() * 2.0 + 1.0;
    for (auto& v : b) v = rng.normal() * 1.5;
    const auto rs = welch_t(a, b);

    auto moments = [](const std::vector<double>& x, double& m, double& sd) {
        m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - m) * (v - m);
        sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    };
    double ma, sa, mb, sb;
    moments(a, ma, sa);
    moments(b, mb, sb);
    const auto rm = welch_t_summary(ma, sa, a.size(), mb, sb, b.size());
    CHECK(rs.t_stat == doctest::Approx(rm.t_stat).epsilon(1e-12));
    CHECK(rs.p_value == doctest::Approx(rm.p_value).epsilon(1e-12));
}

TEST_CASE("p is symmetric in group order") {
    const auto r1 = welch_t_summary(7.11, 0.36, 868, 7.09, 0.32, 372);
    const auto r2 = welch_t_summary(7.09, 0.32, 372, 7.11, 0.36, 868);
    CHECK(r1.p_value == doctest::Approx(r2.p_value).epsilon(1e-12));
    CHECK(r1.t_stat == doctest::Approx(-r2.t_stat).epsilon(1e-12));
}
