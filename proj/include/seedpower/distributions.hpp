#pragma once

// Student-t kernel: log-gamma, regularized incomplete beta, t density,
// distribution function and quantile. All functions are pure.

namespace seedpower {

/// Degrees of freedom of a t distribution. Non-integer values are allowed.
class DegreesOfFreedom {
public:
    /// Throws DomainError unless nu is finite and positive.
    explicit DegreesOfFreedom(double nu);

    double value() const noexcept { return nu_; }

private:
    double nu_;
};

/// A value in [0, 1]: p-values, significance levels, error rates.
class Probability {
public:
    /// Throws DomainError unless 0 <= p <= 1.
    explicit Probability(double p);

    double value() const noexcept { return p_; }

private:
    double p_;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// I_x(a, b). Continued fraction with a 1e-12 convergence threshold and a
/// 300-iteration cap; NumericalError when the cap is hit.
double regularized_incomplete_beta(double x, double a, double b);

double t_pdf(double tau, DegreesOfFreedom nu);

double t_cdf(double t, DegreesOfFreedom nu);

/// Inverse of t_cdf. Requires 0 < p < 1.
double t_quantile(double p, DegreesOfFreedom nu);

/// Standard normal distribution function.
double normal_cdf(double z);

} // namespace seedpower
