#include "seedpower/power_analysis.hpp"

#include "seedpower/distributions.hpp"
#include "seedpower/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace seedpower {

void PowerQuery::validate() const {
    if (!std::isfinite(s1) || !std::isfinite(s2) || s1 < 0.0 || s2 < 0.0)
        throw DomainError("standard deviations must be finite and nonnegative");
    if (!(s1 * s1 + s2 * s2 > 0.0)) throw DegenerateSampleError("s1 and s2 are both zero");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (!std::isfinite(effect_size) || !(effect_size > 0.0)) throw DomainError("effect size must be positive");
}

double beta_error(const PowerQuery& q, int n) {
    q.validate();
    if (n < 2) throw DomainError("beta_error needs n >= 2, got " + std::to_string(n));
    const double nd = static_cast<double>(n);
    const double v1 = q.s1 * q.s1 / nd;
    const double v2 = q.s2 * q.s2 / nd;
    const double se = std::sqrt(v1 + v2);
    const double nu = (v1 + v2) * (v1 + v2) / ((v1 * v1 + v2 * v2) / (nd - 1.0));
    const DegreesOfFreedom dof(nu);
    const double t_alpha = t_quantile(1.0 - q.alpha, dof);
    const double t_eps = q.effect_size / se;
    return t_cdf(t_alpha - t_eps, dof);
}

PowerCurve power_curve(const PowerQuery& base, int n_min, int n_max, const std::vector<double>& effect_sizes,
                       Execution exec) {
    if (n_min < 2) throw DomainError("power curve needs n_min >= 2");
    if (n_max < n_min) throw DomainError("power curve needs n_max >= n_min");
    if (effect_sizes.empty()) throw DomainError("power curve needs at least one effect size");

    std::vector<double> sorted_effects = effect_sizes;
    std::sort(sorted_effects.begin(), sorted_effects.end());
    for (double eps : sorted_effects) {
        PowerQuery q = base;
        q.effect_size = eps;
        q.validate();
    }

    const auto n_count = static_cast<std::size_t>(n_max - n_min + 1);
    const auto cell = [&](std::size_t i) {
        PowerQuery q = base;
        q.effect_size = sorted_effects[i / n_count];
        return beta_error(q, n_min + static_cast<int>(i % n_count));
    };
    const auto betas = kernels::map_index(exec, n_count * sorted_effects.size(), cell);

    PowerCurve curve;
    curve.entries.reserve(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i)
        curve.entries.push_back({n_min + static_cast<int>(i % n_count), sorted_effects[i / n_count], betas[i]});
    return curve;
}

SampleSizePlan required_sample_size(const PowerQuery& q, double beta_target, int n_max) {
    q.validate();
    if (!(beta_target > 0.0 && beta_target < 1.0)) throw DomainError("beta target must lie in (0, 1)");
    if (n_max < 2) throw DomainError("n_max must be >= 2");
    double beta = 1.0;
    for (int n = 2; n <= n_max; ++n) {
        beta = beta_error(q, n);
        if (beta <= beta_target) return {n, beta};
    }
    std::ostringstream msg;
    msg << "no sample size up to " << n_max << " reaches beta <= " << beta_target << " (beta(" << n_max
        << ") = " << beta << ")";
    throw UnattainableError(msg.str(), n_max, beta);
}

int safety_margin(int n, double factor) {
    if (!(factor >= 1.0) || !std::isfinite(factor)) throw DomainError("safety factor must be >= 1");
    if (n < 0) throw DomainError("sample size must be nonnegative");
    // Absorb representation error so that 7 * (17/7) gives 17.
    const double scaled = static_cast<double>(n) * factor;
    return static_cast<int>(std::ceil(scaled - 1e-9 * scaled));
}

} // namespace seedpower
