#include "seedpower/distributions.hpp"

#include "seedpower/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace seedpower {

namespace {

constexpr double kBetaEps = 1e-12;
constexpr int kBetaMaxIter = 300;
constexpr double kQuantileTol = 1e-10;
constexpr double kQuantileBracket = 1e8;
constexpr int kQuantileMaxIter = 200;

// Lanczos approximation, g = 7, nine terms (Godfrey).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
    // Valid for x >= 0.5.
    const double z = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i)
        sum += kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double stirling_log_gamma(double x) {
    // Asymptotic series; truncation error below 1e-14 relative for x >= 10.
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
               inv2 * (1.0 / 360.0 -
                       inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIter; ++m) {
        const double dm = static_cast<double>(m);
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kBetaEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge in " +
                         std::to_string(kBetaMaxIter) + " iterations (a=" + std::to_string(a) +
                         ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

// I_x(a,b) given both x and y = 1 - x, so callers can avoid cancellation.
double incomplete_beta_pair(double x, double y, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front =
        a * std::log(x) + b * std::log(y) - (log_gamma(a) + log_gamma(b) - log_gamma(a + b));
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

} // namespace

DegreesOfFreedom::DegreesOfFreedom(double nu) : nu_(nu) {
    if (!std::isfinite(nu) || nu <= 0.0)
        throw DomainError("degrees of freedom must be finite and positive, got " + std::to_string(nu));
}

Probability::Probability(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(p));
}

double log_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError("log_gamma requires a finite positive argument, got " + std::to_string(x));
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
    }
    if (x >= 10.0) return stirling_log_gamma(x);
    return lanczos_log_gamma(x);
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("incomplete beta requires 0 <= x <= 1, got " + std::to_string(x));
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0)
        throw DomainError("incomplete beta requires a > 0 and b > 0");
    return incomplete_beta_pair(x, 1.0 - x, a, b);
}

double t_pdf(double tau, DegreesOfFreedom nu) {
    const double v = nu.value();
    const double log_norm =
        log_gamma(0.5 * (v + 1.0)) - log_gamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi);
    return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(tau * tau / v));
}

double t_cdf(double t, DegreesOfFreedom nu) {
    if (std::isnan(t)) throw DomainError("t_cdf of NaN");
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    const double v = nu.value();
    const double t2 = t * t;
    const double x = v / (v + t2);
    const double y = t2 / (v + t2);
    // P(T < -|t|)
    const double tail = 0.5 * incomplete_beta_pair(x, y, 0.5 * v, 0.5);
    return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, DegreesOfFreedom nu) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("t_quantile requires 0 < p < 1, got " + std::to_string(p));
    if (p == 0.5) return 0.0;

    double lo = -kQuantileBracket;
    double hi = kQuantileBracket;
    if (t_cdf(lo, nu) > p || t_cdf(hi, nu) < p)
        throw NumericalError("t quantile lies outside [-1e8, 1e8]");

    double x = 0.0;
    for (int iter = 0; iter < kQuantileMaxIter; ++iter) {
        const double f = t_cdf(x, nu) - p;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        const double density = t_pdf(x, nu);
        double next = density > 0.0 ? x - f / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - x);
        if (std::fabs(f) <= kQuantileTol && step <= 1e-12 * (1.0 + std::fabs(x))) return next;
        if (lo == hi || next == x) return x;
        x = next;
    }
    if (std::fabs(t_cdf(x, nu) - p) <= kQuantileTol) return x;
    throw NumericalError("t quantile iteration did not converge");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace seedpower
