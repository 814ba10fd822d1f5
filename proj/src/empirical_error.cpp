#include "seedpower/empirical_error.hpp"

#include "seedpower/bootstrap_test.hpp"
#include "seedpower/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace seedpower {

SyntheticDistribution::SyntheticDistribution(Kind kind, double m1, double s1, double m2, double s2, double w,
                                             double shift)
    : kind_(kind), m1_(m1), s1_(s1), m2_(m2), s2_(s2), weight_(w), shift_(shift) {
    if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(shift))
        throw DomainError("distribution parameters must be finite");
    if (!(s1 > 0.0) || !std::isfinite(s1) || !(s2 > 0.0) || !std::isfinite(s2))
        throw DomainError("distribution sigma must be positive");
    if (!(w > 0.0 && w < 1.0) && kind == Kind::bimodal_mixture)
        throw DomainError("mixture weight must lie in (0, 1)");
}

SyntheticDistribution SyntheticDistribution::normal(double mean, double sigma) {
    return {Kind::normal, mean, sigma, mean, sigma, 1.0, 0.0};
}

SyntheticDistribution SyntheticDistribution::bimodal(double mean1, double sigma1, double mean2, double sigma2,
                                                     double weight) {
    return {Kind::bimodal_mixture, mean1, sigma1, mean2, sigma2, weight, 0.0};
}

SyntheticDistribution SyntheticDistribution::lognormal(double log_mean, double log_sigma) {
    return {Kind::lognormal, log_mean, log_sigma, log_mean, log_sigma, 1.0, 0.0};
}

double SyntheticDistribution::draw(PhiloxStream& stream) const noexcept {
    switch (kind_) {
    case Kind::normal: return shift_ + m1_ + s1_ * stream.normal();
    case Kind::bimodal_mixture:
        if (stream.uniform01() < weight_) return shift_ + m1_ + s1_ * stream.normal();
        return shift_ + m2_ + s2_ * stream.normal();
    case Kind::lognormal: return shift_ + std::exp(m1_ + s1_ * stream.normal());
    }
    return 0.0;
}

double SyntheticDistribution::mean() const noexcept {
    switch (kind_) {
    case Kind::normal: return shift_ + m1_;
    case Kind::bimodal_mixture: return shift_ + weight_ * m1_ + (1.0 - weight_) * m2_;
    case Kind::lognormal: return shift_ + std::exp(m1_ + 0.5 * s1_ * s1_);
    }
    return 0.0;
}

SyntheticDistribution SyntheticDistribution::shifted(double delta) const {
    SyntheticDistribution copy = *this;
    copy.shift_ += delta;
    return copy;
}

std::string SyntheticDistribution::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case Kind::normal: os << "normal(mean=" << m1_ << ",sigma=" << s1_ << ")"; break;
    case Kind::bimodal_mixture:
        os << "bimodal(weight=" << weight_ << ",mean1=" << m1_ << ",sigma1=" << s1_ << ",mean2=" << m2_
           << ",sigma2=" << s2_ << ")";
        break;
    case Kind::lognormal: os << "lognormal(log_mean=" << m1_ << ",log_sigma=" << s1_ << ")"; break;
    }
    if (shift_ != 0.0) os << "+" << shift_;
    return os.str();
}

std::string_view to_string(CalibrationTest test) noexcept {
    return test == CalibrationTest::welch ? "welch" : "bootstrap";
}

void CalibrationConfig::validate() const {
    if (trials < 1) throw DomainError("calibration needs at least one trial");
    if (group_size < 1) throw DomainError("calibration group size must be >= 1");
    if (test == CalibrationTest::welch && group_size < 2)
        throw InsufficientDataError("welch calibration needs group size >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (test == CalibrationTest::bootstrap && bootstrap_b < 1) throw DomainError("bootstrap needs B >= 1");
}

Interval wilson_interval(std::uint64_t events, std::uint64_t trials, double z) {
    if (trials == 0) throw DomainError("Wilson interval needs at least one trial");
    if (events > trials) throw DomainError("more events than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(events) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::fmax(0.0, std::fmin(p, centre - half)), std::fmin(1.0, std::fmax(p, centre + half))};
}

namespace {

// Runs the configured test on one fictive pair.
TrialOutcome decide(std::span<const double> a, std::span<const double> b, const CalibrationConfig& cfg,
                    Tail tail, double alpha, PhiloxStream& stream) {
    if (cfg.test == CalibrationTest::welch) {
        try {
            const TestConfig test{alpha, tail, Variant::welch};
            return run_welch(summarize(a), summarize(b), test).reject_h0 ? TrialOutcome::reject
                                                                          : TrialOutcome::accept;
        } catch (const DegenerateSampleError&) {
            return TrialOutcome::degenerate;
        }
    }
    const BootstrapConfig boot{cfg.bootstrap_b, alpha, stream.next_u64()};
    return bootstrap_diff_ci(a, b, boot, Execution::serial).reject_h0 ? TrialOutcome::reject
                                                                      : TrialOutcome::accept;
}

CalibrationReport make_report(ErrorKind kind, std::uint64_t events, const TrialCounts& counts,
                              const CalibrationConfig& cfg) {
    return {kind,
            static_cast<double>(events) / static_cast<double>(cfg.trials),
            events,
            cfg.trials,
            counts.degenerate,
            wilson_interval(events, cfg.trials),
            cfg};
}

std::uint32_t lane_for(std::size_t group_size) { return static_cast<std::uint32_t>(group_size); }

} // namespace

CalibrationReport empirical_type1_from_pool(const PerformanceSample& pool, const CalibrationConfig& cfg,
                                            Execution exec) {
    cfg.validate();
    const std::size_t n = cfg.group_size;
    const std::size_t m = pool.size();
    if (m < 2 * n)
        throw InsufficientDataError("pool has " + std::to_string(m) + " values; splitting into two groups of " +
                                    std::to_string(n) + " needs " + std::to_string(2 * n));
    const auto values = pool.values();

    const auto trial = [&](std::uint64_t t) {
        PhiloxStream stream(cfg.rng_seed, t, lane_for(n));
        std::vector<std::size_t> index(m);
        std::iota(index.begin(), index.end(), std::size_t{0});
        std::vector<double> drawn(2 * n);
        // Partial Fisher-Yates: the first 2N slots are a uniform draw without replacement.
        for (std::size_t i = 0; i < 2 * n; ++i) {
            const std::size_t j = i + stream.uniform_below(static_cast<std::uint32_t>(m - i));
            std::swap(index[i], index[j]);
            drawn[i] = values[index[i]];
        }
        const std::span<const double> all(drawn);
        return decide(all.first(n), all.subspan(n), cfg, cfg.tail, cfg.alpha, stream);
    };
    const TrialCounts counts = kernels::count_outcomes(exec, cfg.trials, trial);
    return make_report(ErrorKind::type1, counts.rejections, counts, cfg);
}

CalibrationReport empirical_type1_synthetic(const SyntheticDistribution& dist, const CalibrationConfig& cfg,
                                            Execution exec) {
    cfg.validate();
    const std::size_t n = cfg.group_size;
    const auto trial = [&](std::uint64_t t) {
        PhiloxStream stream(cfg.rng_seed, t, lane_for(n));
        std::vector<double> drawn(2 * n);
        for (auto& v : drawn) v = dist.draw(stream);
        const std::span<const double> all(drawn);
        return decide(all.first(n), all.subspan(n), cfg, cfg.tail, cfg.alpha, stream);
    };
    const TrialCounts counts = kernels::count_outcomes(exec, cfg.trials, trial);
    return make_report(ErrorKind::type1, counts.rejections, counts, cfg);
}

CalibrationReport empirical_type2_synthetic(const SyntheticDistribution& dist_a,
                                            const SyntheticDistribution& dist_b, const CalibrationConfig& cfg,
                                            Execution exec) {
    cfg.validate();
    const std::size_t n = cfg.group_size;
    const auto trial = [&](std::uint64_t t) {
        PhiloxStream stream(cfg.rng_seed, t, lane_for(n));
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = dist_a.draw(stream);
        for (auto& v : b) v = dist_b.draw(stream);
        return decide(b, a, cfg, Tail::one_positive, cfg.alpha, stream);
    };
    CalibrationConfig echoed = cfg;
    echoed.tail = Tail::one_positive;
    const TrialCounts counts = kernels::count_outcomes(exec, cfg.trials, trial);
    return make_report(ErrorKind::type2, cfg.trials - counts.rejections, counts, echoed);
}

CalibrationReport empirical_fwer_synthetic(const SyntheticDistribution& dist, int n_experiments,
                                           const CalibrationConfig& cfg, Execution exec) {
    cfg.validate();
    const double alpha_bon = bonferroni(cfg.alpha, n_experiments);
    const std::size_t n = cfg.group_size;
    const auto trial = [&](std::uint64_t t) {
        PhiloxStream stream(cfg.rng_seed, t, lane_for(n));
        std::vector<double> drawn(2 * n);
        bool any_reject = false;
        bool any_degenerate = false;
        for (int e = 0; e < n_experiments; ++e) {
            for (auto& v : drawn) v = dist.draw(stream);
            const std::span<const double> all(drawn);
            const auto outcome = decide(all.first(n), all.subspan(n), cfg, cfg.tail, alpha_bon, stream);
            any_reject |= outcome == TrialOutcome::reject;
            any_degenerate |= outcome == TrialOutcome::degenerate;
        }
        if (any_reject) return TrialOutcome::reject;
        return any_degenerate ? TrialOutcome::degenerate : TrialOutcome::accept;
    };
    const TrialCounts counts = kernels::count_outcomes(exec, cfg.trials, trial);
    return make_report(ErrorKind::familywise, counts.rejections, counts, cfg);
}

std::vector<StdStudyRow> std_estimation_study(std::size_t n_min, std::size_t n_max, std::uint64_t draws,
                                              std::uint64_t rng_seed, Execution exec) {
    if (n_min < 2) throw DomainError("std study needs n >= 2");
    if (n_max < n_min) throw DomainError("std study needs n_max >= n_min");
    if (draws < 1) throw DomainError("std study needs at least one draw");

    std::vector<StdStudyRow> rows;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        const auto s_values = kernels::map_index(exec, draws, [&](std::size_t d) {
            PhiloxStream stream(rng_seed, d, lane_for(n));
            std::vector<double> sample(n);
            for (auto& v : sample) v = stream.normal();
            return summarize(sample).std;
        });
        if (s_values.size() < 2) {
            rows.push_back({n, s_values.front(), 0.0});
        } else {
            const auto stats = summarize(s_values);
            rows.push_back({n, stats.mean, stats.std});
        }
    }
    return rows;
}

PerformanceSample draw_pool(const SyntheticDistribution& dist, std::size_t size, std::uint64_t seed,
                            std::string label) {
    PhiloxStream stream(seed, 0, 0xFFFFFFFFu);
    std::vector<double> values(size);
    for (auto& v : values) v = dist.draw(stream);
    return {std::move(label), std::move(values)};
}

} // namespace seedpower
