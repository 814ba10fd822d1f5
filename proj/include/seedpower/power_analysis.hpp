#pragma once

#include "seedpower/kernels.hpp"

#include <vector>

namespace seedpower {

/// Inputs to a one-tailed Welch power calculation with equal group sizes.
struct PowerQuery {
    double s1;
    double s2;
    double alpha = 0.05;
    double effect_size; ///< epsilon > 0, the true mean difference to detect

    void validate() const;
};

struct PowerCurveEntry {
    int n;
    double effect_size;
    double beta;
};

/// Rows sorted by (effect_size, n).
struct PowerCurve {
    std::vector<PowerCurveEntry> entries;
};

/// beta = CDF_nu(t_alpha - t_eps), with nu recomputed from (s1, s2, n).
double beta_error(const PowerQuery& q, int n);

/// Cartesian grid n in [n_min, n_max] x effect_sizes; `base` supplies s1, s2, alpha.
PowerCurve power_curve(const PowerQuery& base, int n_min, int n_max, const std::vector<double>& effect_sizes,
                       Execution exec = Execution::parallel);

struct SampleSizePlan {
    int n;
    double beta;
};

/// Smallest n in [2, n_max] with beta_error(q, n) <= beta_target.
/// UnattainableError (carrying beta(n_max)) when none qualifies.
SampleSizePlan required_sample_size(const PowerQuery& q, double beta_target, int n_max);

inline constexpr double kDefaultSafetyFactor = 1.5;

/// ceil(n * factor); factor >= 1.
int safety_margin(int n, double factor = kDefaultSafetyFactor);

} // namespace seedpower
