#include "seedpower/kernels.hpp"

#include "seedpower/rng.hpp"

namespace seedpower::kernels {

namespace {

double resampled_mean(std::span<const double> values, PhiloxStream& stream) {
    const auto n = static_cast<std::uint32_t>(values.size());
    double sum = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) sum += values[stream.uniform_below(n)];
    return sum / static_cast<double>(n);
}

double replicate_diff(std::span<const double> a, std::span<const double> b, std::uint64_t seed,
                      std::size_t replicate) {
    PhiloxStream stream(seed, replicate);
    const double mean_a = resampled_mean(a, stream);
    const double mean_b = resampled_mean(b, stream);
    return mean_a - mean_b;
}

} // namespace

void set_thread_count(int threads) {
#ifdef _OPENMP
    static const int default_threads = omp_get_max_threads();
    omp_set_num_threads(threads > 0 ? threads : default_threads);
#else
    (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<double> serial::bootstrap_mean_diffs(std::span<const double> a, std::span<const double> b,
                                                 std::uint64_t seed, std::size_t replicates) {
    return serial::map_index(replicates, [&](std::size_t r) { return replicate_diff(a, b, seed, r); });
}

std::vector<double> parallel::bootstrap_mean_diffs(std::span<const double> a,
                                                   std::span<const double> b, std::uint64_t seed,
                                                   std::size_t replicates) {
    return parallel::map_index(replicates, [&](std::size_t r) { return replicate_diff(a, b, seed, r); });
}

} // namespace seedpower::kernels
