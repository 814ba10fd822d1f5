#pragma once

#include "seedpower/kernels.hpp"
#include "seedpower/rng.hpp"
#include "seedpower/sample_model.hpp"
#include "seedpower/welch_test.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seedpower {

/// Population used to generate synthetic measurements.
class SyntheticDistribution {
public:
    enum class Kind { normal, bimodal_mixture, lognormal };

    static SyntheticDistribution normal(double mean, double sigma);
    /// weight is the probability of the first component.
    static SyntheticDistribution bimodal(double mean1, double sigma1, double mean2, double sigma2,
                                         double weight = 0.5);
    /// exp(N(log_mean, log_sigma^2)).
    static SyntheticDistribution lognormal(double log_mean, double log_sigma);

    Kind kind() const noexcept { return kind_; }
    double draw(PhiloxStream& stream) const noexcept;
    double mean() const noexcept;
    /// Shifted copy; lognormal shifts are applied after exponentiation.
    SyntheticDistribution shifted(double delta) const;
    std::string describe() const;

private:
    SyntheticDistribution(Kind kind, double m1, double s1, double m2, double s2, double w, double shift);

    Kind kind_;
    double m1_, s1_, m2_, s2_, weight_, shift_;
};

enum class CalibrationTest { welch, bootstrap };
std::string_view to_string(CalibrationTest test) noexcept;

struct CalibrationConfig {
    std::uint64_t trials = 1000;
    std::size_t group_size = 5;
    CalibrationTest test = CalibrationTest::welch;
    double alpha = 0.05;
    std::uint64_t rng_seed = 0;
    std::size_t bootstrap_b = 1000;
    Tail tail = Tail::two; ///< type-I runs only; type-II runs are one-tailed

    void validate() const;
};

enum class ErrorKind { type1, type2, familywise };

struct CalibrationReport {
    ErrorKind kind;
    double rate;                  ///< rejections / trials (type-I, FWER) or non-rejections / trials (type-II)
    std::uint64_t events;
    std::uint64_t trials;
    std::uint64_t degenerate_trials; ///< welch trials with zero standard error, counted as non-rejections
    Interval wilson_ci;
    CalibrationConfig config;
};

/// 95% Wilson score interval for `events` out of `trials`.
Interval wilson_interval(std::uint64_t events, std::uint64_t trials, double z = 1.959963984540054);

/// H0 holds by construction: each trial draws 2N pool values without
/// replacement and splits them into two groups of N.
CalibrationReport empirical_type1_from_pool(const PerformanceSample& pool, const CalibrationConfig& cfg,
                                            Execution exec = Execution::parallel);

/// Each trial draws two independent N-samples from `dist`.
CalibrationReport empirical_type1_synthetic(const SyntheticDistribution& dist, const CalibrationConfig& cfg,
                                            Execution exec = Execution::parallel);

/// Failure rate of the one-tailed Welch test of H_a: mean(b) > mean(a).
CalibrationReport empirical_type2_synthetic(const SyntheticDistribution& dist_a,
                                            const SyntheticDistribution& dist_b, const CalibrationConfig& cfg,
                                            Execution exec = Execution::parallel);

/// Probability that any of `n_experiments` independent true-H0 Welch tests,
/// each at the Bonferroni level cfg.alpha / n_experiments, rejects.
CalibrationReport empirical_fwer_synthetic(const SyntheticDistribution& dist, int n_experiments,
                                           const CalibrationConfig& cfg, Execution exec = Execution::parallel);

struct StdStudyRow {
    std::size_t n;
    double mean_s;
    double std_s;
};

/// For each n in [n_min, n_max], `draws` N(0,1) samples of size n; mean and
/// std of the unbiased s across draws.
std::vector<StdStudyRow> std_estimation_study(std::size_t n_min, std::size_t n_max, std::uint64_t draws,
                                              std::uint64_t rng_seed, Execution exec = Execution::parallel);

/// `size` draws of `dist` from substream 0 of `seed`, labelled `label`.
PerformanceSample draw_pool(const SyntheticDistribution& dist, std::size_t size, std::uint64_t seed,
                            std::string label = "pool");

} // namespace seedpower
