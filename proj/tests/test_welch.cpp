#include "doctest.h"
#include "oracles.hpp"

#include "seedpower/errors.hpp"
#include "seedpower/welch_test.hpp"

#include <algorithm>
#include <cmath>

using namespace seedpower;

namespace {

SummaryStats stats(std::size_t n, double mean, double sd) { return SummaryStats::checked(n, mean, sd); }

// Pilot (N=5) and final (N=10) summary statistics of two algorithms.
const SummaryStats kPilotParam = SummaryStats{5, 4905, 990};
const SummaryStats kPilotAction = SummaryStats{5, 3523, 1341};
const SummaryStats kFinalParam = SummaryStats{10, 5323, 1454};
const SummaryStats kFinalAction = SummaryStats{10, 3690, 1086};

SummaryStats random_stats(oracle::SplitMix& rng) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 40));
    return stats(n, rng.uniform(-100, 100), rng.uniform(0.05, 60));
}

} // namespace

TEST_CASE("config validation and names") {
    CHECK_THROWS_AS((TestConfig{0.0}).validate(), DomainError);
    CHECK_THROWS_AS((TestConfig{1.0}).validate(), DomainError);
    CHECK_NOTHROW((TestConfig{0.01}).validate());
    CHECK(to_string(Tail::two) == "two-tail");
    CHECK(to_string(Tail::one_positive) == "one-tail-positive");
    CHECK(to_string(Tail::one_negative) == "one-tail-negative");
    CHECK(to_string(Variant::welch) == "welch");
    CHECK(to_string(Variant::pooled) == "pooled");
    const TestConfig defaults;
    CHECK(defaults.alpha == 0.05);
    CHECK(defaults.tail == Tail::two);
    CHECK(defaults.variant == Variant::welch);
}

TEST_CASE("welch_statistic examples") {
    const auto same = welch_statistic(stats(5, 3, 1), stats(7, 3, 2));
    CHECK(same.t == 0.0);
    const auto ex = welch_statistic(kPilotParam, kPilotAction);
    CHECK(std::fabs(ex.t - 1.854) < 0.001);
    CHECK(std::fabs(ex.nu - 7.36) < 0.01);
    CHECK(std::fabs(ex.standard_error - 745.437) < 0.001);
    for (int n = 2; n < 40; ++n) {
        const auto eq = welch_statistic(stats(n, 1, 2.5), stats(n, 0, 2.5));
        CHECK(std::fabs(eq.nu - 2.0 * (n - 1)) < 1e-12 * n);
    }
}

TEST_CASE("degenerate and insufficient inputs") {
    CHECK_THROWS_AS(welch_statistic(stats(5, 1, 0), stats(5, 2, 0)), DegenerateSampleError);
    CHECK_THROWS_AS(pooled_statistic(stats(5, 1, 0), stats(5, 2, 0)), DegenerateSampleError);
    CHECK_THROWS_AS(run_welch(stats(3, 1, 0), stats(3, 1, 0)), DegenerateSampleError);
    CHECK_THROWS_AS(welch_statistic(SummaryStats{1, 1, 1}, stats(5, 2, 1)), InsufficientDataError);
    // One zero-variance group is fine.
    CHECK_NOTHROW(welch_statistic(stats(5, 1, 0), stats(5, 2, 1)));
}

TEST_CASE("p_value conventions") {
    const DegreesOfFreedom nu(7.36);
    CHECK(p_value(0.0, nu, Tail::two) == 1.0);
    CHECK(p_value(0.0, nu, Tail::one_positive) == 0.5);
    const double t = 1.854;
    CHECK(std::fabs(p_value(t, nu, Tail::two) - 0.10) < 0.01);
    CHECK(std::fabs(p_value(t, nu, Tail::two) - 2.0 * p_value(t, nu, Tail::one_positive)) < 1e-15);
    CHECK(std::fabs(p_value(t, nu, Tail::one_positive) + p_value(t, nu, Tail::one_negative) - 1.0) < 1e-15);
    CHECK(p_value(-t, nu, Tail::two) == p_value(t, nu, Tail::two));
}

TEST_CASE("pilot summary: p close to 0.1, no rejection") {
    const auto r = run_welch(kPilotParam, kPilotAction);
    CHECK(std::fabs(r.p_value - 0.10) < 0.015);
    CHECK_FALSE(r.reject_h0);
    CHECK(std::fabs(r.t_alpha - 2.34) < 0.01);
    CHECK(std::fabs(r.ci1.lo - (1382 - 1745)) < 2.0);
    CHECK(std::fabs(r.ci1.hi - (1382 + 1745)) < 2.0);
    CHECK(r.ci1.contains(0.0));
    CHECK(r.mean_diff == 1382.0);
}

TEST_CASE("final summary: both tails reject") {
    TestConfig two;
    TestConfig one{0.05, Tail::one_positive};
    const auto r2 = run_welch(kFinalParam, kFinalAction, two);
    const auto r1 = run_welch(kFinalParam, kFinalAction, one);
    CHECK(r2.reject_h0);
    CHECK(r1.reject_h0);
    CHECK(r2.p_value > 0.005);
    CHECK(r2.p_value < 0.012);
    CHECK(std::fabs(r1.p_value - 0.00567) < 1e-4);
    CHECK(std::fabs(r2.p_value - 0.0113) < 1e-4);
    CHECK(std::isinf(r1.ci1.hi));
    CHECK(r1.ci1.lo > 0.0);
}

TEST_CASE("identical samples do not reject") {
    const PerformanceSample a("a", {10.5, 11, 11.5, 12, 12.5});
    const auto r = run_welch(a, a);
    CHECK(r.t_stat == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.reject_h0);
    CHECK(r.ci1.contains(0.0));
}

TEST_CASE("confidence interval examples") {
    const auto d0 = difference_stats(stats(5, 2, 1), stats(5, 2, 1.5));
    const auto ci = confidence_intervals(d0, DegreesOfFreedom(8), 0.05, Tail::two);
    CHECK(ci.ci1.lo == -ci.ci1.hi);
    CHECK(ci.ci1.contains(0.0));
    CHECK(ci.ci2.lo == -ci.ci2.hi);
    // alpha -> 1: the quantile goes to 0 and the interval collapses.
    double prev_width = INFINITY;
    for (double alpha : {0.5, 0.9, 0.99, 0.999999}) {
        const auto c = confidence_intervals(d0, DegreesOfFreedom(8), alpha, Tail::two);
        const double width = c.ci1.hi - c.ci1.lo;
        CHECK(width < prev_width);
        prev_width = width;
    }
    CHECK(prev_width < 1e-5);
    const auto degenerate = difference_stats(stats(5, 2, 0), stats(5, 3, 0));
    CHECK_THROWS_AS(confidence_intervals(degenerate, DegreesOfFreedom(8), 0.05, Tail::two), DegenerateSampleError);
    CHECK_THROWS_AS(confidence_intervals(d0, DegreesOfFreedom(8), 1.0, Tail::two), DomainError);
}

TEST_CASE("decision equivalences on randomized inputs") {
    oracle::SplitMix rng(2718);
    int violations = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const auto a = random_stats(rng);
        const auto b = random_stats(rng);
        const double alpha = rng.uniform(0.001, 0.3);
        const Tail tail = std::array{Tail::two, Tail::one_positive, Tail::one_negative}[rng.integer(0, 2)];
        const Variant variant = rng.integer(0, 3) == 0 ? Variant::pooled : Variant::welch;
        const auto r = run_welch(a, b, TestConfig{alpha, tail, variant});
        const bool by_p = r.p_value < alpha;
        const bool by_ci1 = !r.ci1.contains(0.0);
        const bool by_ci2 = !r.ci2.contains(r.mean_diff);
        violations += (r.reject_h0 != by_p) + (by_p != by_ci1) + (by_ci1 != by_ci2);
        CHECK(r.ci1.lo <= r.ci1.hi);
        if (tail == Tail::two) CHECK(r.ci2.lo == -r.ci2.hi);
    }
    CHECK(violations == 0);
}

TEST_CASE("antisymmetry under swapping") {
    oracle::SplitMix rng(31);
    for (int rep = 0; rep < 2000; ++rep) {
        const auto a = random_stats(rng);
        const auto b = random_stats(rng);
        const auto ab = run_welch(a, b);
        const auto ba = run_welch(b, a);
        CHECK(ab.t_stat == -ba.t_stat);
        CHECK(ab.nu == ba.nu);
        CHECK(ab.p_value == ba.p_value);
        const auto pos = run_welch(a, b, TestConfig{0.05, Tail::one_positive});
        const auto neg = run_welch(b, a, TestConfig{0.05, Tail::one_negative});
        CHECK(std::fabs(pos.p_value - neg.p_value) < 1e-15);
    }
}

TEST_CASE("scale invariance") {
    oracle::SplitMix rng(32);
    for (int rep = 0; rep < 2000; ++rep) {
        const auto a = random_stats(rng);
        const auto b = random_stats(rng);
        const double c = std::exp(rng.uniform(-8, 8));
        const auto base = run_welch(a, b);
        const auto scaled = run_welch(stats(a.n, c * a.mean, c * a.std), stats(b.n, c * b.mean, c * b.std));
        CHECK(std::fabs(scaled.t_stat - base.t_stat) < 1e-11 * (1 + std::fabs(base.t_stat)));
        CHECK(std::fabs(scaled.nu - base.nu) < 1e-11 * base.nu);
        CHECK(std::fabs(scaled.p_value - base.p_value) < 1e-11);
        CHECK(std::fabs(scaled.ci1.lo - c * base.ci1.lo) < 1e-10 * c * (1 + std::fabs(base.ci1.lo)));
        CHECK(std::fabs(scaled.ci1.hi - c * base.ci1.hi) < 1e-10 * c * (1 + std::fabs(base.ci1.hi)));
    }
}

TEST_CASE("welch degrees of freedom bounds") {
    oracle::SplitMix rng(33);
    for (int rep = 0; rep < 20000; ++rep) {
        const auto a = random_stats(rng);
        const auto b = random_stats(rng);
        const double nu = welch_statistic(a, b).nu;
        const double lo = static_cast<double>(std::min(a.n, b.n)) - 1.0;
        const double hi = static_cast<double>(a.n + b.n) - 2.0;
        CHECK(nu >= lo * (1 - 1e-12));
        CHECK(nu <= hi * (1 + 1e-12));
    }
}

TEST_CASE("pooled variant") {
    const auto p = pooled_statistic(stats(4, 5, 2), stats(6, 3, 2));
    CHECK(p.nu == 8.0);
    // Equal stds and sizes: pooled and Welch statistics coincide.
    const auto w = welch_statistic(stats(6, 5, 2), stats(6, 3, 2));
    const auto q = pooled_statistic(stats(6, 5, 2), stats(6, 3, 2));
    CHECK(std::fabs(w.t - q.t) < 1e-14);
    const auto r = run_welch(stats(6, 5, 2), stats(6, 3, 2), TestConfig{0.05, Tail::two, Variant::pooled});
    CHECK(r.nu == 10.0);
}

TEST_CASE("brute-force oracle for small integer samples") {
    oracle::SplitMix rng(34);
    int checked = 0;
    while (checked < 150) {
        std::vector<double> x(rng.integer(2, 4)), y(rng.integer(2, 4));
        for (auto& v : x) v = rng.integer(0, 9);
        for (auto& v : y) v = rng.integer(0, 9);
        const auto mx = oracle::two_pass(x), my = oracle::two_pass(y);
        const double vx = mx.std * mx.std / x.size(), vy = my.std * my.std / y.size();
        if (vx + vy == 0.0) continue;
        const double t = (mx.mean - my.mean) / std::sqrt(vx + vy);
        const double nu = (vx + vy) * (vx + vy) / (vx * vx / (x.size() - 1) + vy * vy / (y.size() - 1));
        if (std::fabs(t) > 60.0) continue;
        const double p_ref = 2.0 * (1.0 - oracle::t_cdf_quadrature(std::fabs(t), nu));
        const auto r = run_welch(PerformanceSample("x", x), PerformanceSample("y", y));
        CHECK(std::fabs(r.t_stat - t) < 1e-12 * (1 + std::fabs(t)));
        CHECK(std::fabs(r.nu - nu) < 1e-12 * nu);
        CHECK(std::fabs(r.p_value - p_ref) < 1e-8);
        ++checked;
    }
}

TEST_CASE("bonferroni") {
    CHECK(bonferroni(0.05, 1) == 0.05);
    CHECK(std::fabs(bonferroni(0.05, 5) - 0.01) < 1e-18);
    CHECK(bonferroni(0.05, 10) == 0.005);
    CHECK_THROWS_AS(bonferroni(0.05, 0), DomainError);
    CHECK_THROWS_AS(bonferroni(1.5, 2), DomainError);
}
