#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace seedpower {

/// Recorded in every report that consumes randomness.
inline constexpr std::string_view kGeneratorId = "philox4x32-10/substream-v1";

/// Philox4x32-10 block cipher (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. The key is the master seed; the counter
/// carries (block, lane, substream), so a stream is a pure function of
/// (seed, substream, lane) and independent of the thread that consumes it.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t substream, std::uint32_t lane = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Uniform integer in [0, n); n must be positive. Lemire's method with rejection.
    std::uint32_t uniform_below(std::uint32_t n) noexcept;

    /// Standard normal deviate (Box-Muller, second value cached).
    double normal() noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    unsigned used_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace seedpower
