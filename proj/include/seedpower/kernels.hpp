#pragma once

// Data-parallel loops behind the Monte-Carlo and grid workloads.
//
// Every kernel exists twice: `serial` is the reference implementation kept
// for testing, `parallel` is the OpenMP version. Each iteration derives its
// randomness from its own index, so both produce bit-identical output for
// any thread count.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seedpower {

enum class Execution { serial, parallel };

/// Outcome of one Monte-Carlo trial.
enum class TrialOutcome : std::uint8_t { accept, reject, degenerate };

struct TrialCounts {
    std::uint64_t rejections = 0;
    std::uint64_t degenerate = 0;
};

namespace kernels {

/// 0 restores the OpenMP default.
void set_thread_count(int threads);
int thread_count();

namespace serial {

/// out[i] = fn(i) for i in [0, n).
template <class Fn>
std::vector<double> map_index(std::size_t n, Fn&& fn) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

template <class Fn>
TrialCounts count_outcomes(std::uint64_t trials, Fn&& fn) {
    TrialCounts counts;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const TrialOutcome outcome = fn(t);
        counts.rejections += outcome == TrialOutcome::reject;
        counts.degenerate += outcome == TrialOutcome::degenerate;
    }
    return counts;
}

/// B replicate differences mean(a*) - mean(b*); replicate r draws from
/// substream r of `seed`.
std::vector<double> bootstrap_mean_diffs(std::span<const double> a, std::span<const double> b,
                                         std::uint64_t seed, std::size_t replicates);

} // namespace serial

namespace detail {

// Exceptions may not cross an OpenMP region boundary; keep the first one.
class FirstError {
public:
    void capture() noexcept {
#pragma omp critical(seedpower_first_error)
        if (!error_) error_ = std::current_exception();
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::exception_ptr error_;
};

} // namespace detail

namespace parallel {

template <class Fn>
std::vector<double> map_index(std::size_t n, Fn&& fn) {
    std::vector<double> out(n);
    const auto count = static_cast<std::int64_t>(n);
    detail::FirstError error;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
            error.capture();
        }
    }
    error.rethrow();
    return out;
}

template <class Fn>
TrialCounts count_outcomes(std::uint64_t trials, Fn&& fn) {
    std::uint64_t rejections = 0;
    std::uint64_t degenerate = 0;
    const auto count = static_cast<std::int64_t>(trials);
    detail::FirstError error;
#pragma omp parallel for schedule(static) reduction(+ : rejections, degenerate)
    for (std::int64_t t = 0; t < count; ++t) {
        try {
            const TrialOutcome outcome = fn(static_cast<std::uint64_t>(t));
            rejections += outcome == TrialOutcome::reject;
            degenerate += outcome == TrialOutcome::degenerate;
        } catch (...) {
            error.capture();
        }
    }
    error.rethrow();
    return {rejections, degenerate};
}

std::vector<double> bootstrap_mean_diffs(std::span<const double> a, std::span<const double> b,
                                         std::uint64_t seed, std::size_t replicates);

} // namespace parallel

template <class Fn>
std::vector<double> map_index(Execution exec, std::size_t n, Fn&& fn) {
    return exec == Execution::serial ? serial::map_index(n, fn) : parallel::map_index(n, fn);
}

template <class Fn>
TrialCounts count_outcomes(Execution exec, std::uint64_t trials, Fn&& fn) {
    return exec == Execution::serial ? serial::count_outcomes(trials, fn)
                                     : parallel::count_outcomes(trials, fn);
}

} // namespace kernels
} // namespace seedpower
