#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace seedpower {

struct CurvePoint {
    std::uint64_t step;
    double value;
};

/// One seed's learning curve. Steps strictly increasing, values finite.
class LearningCurve {
public:
    LearningCurve(std::string seed_id, std::vector<CurvePoint> points);

    const std::string& seed_id() const noexcept { return seed_id_; }
    std::span<const CurvePoint> points() const noexcept { return points_; }

private:
    std::string seed_id_;
    std::vector<CurvePoint> points_;
};

/// Per-seed scalar performance of one algorithm. N >= 1, all finite.
class PerformanceSample {
public:
    PerformanceSample(std::string label, std::vector<double> values);

    const std::string& label() const noexcept { return label_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::string label_;
    std::vector<double> values_;
};

/// (N, mean, unbiased std).
struct SummaryStats {
    std::size_t n;
    double mean;
    double std;

    /// Validates n >= 2, finite mean, finite std >= 0.
    static SummaryStats checked(std::size_t n, double mean, double std);
};

struct DifferenceStats {
    double mean_diff; ///< first.mean - second.mean
    double std_diff;  ///< sqrt(s1^2 + s2^2)
    SummaryStats first;
    SummaryStats second;
};

enum class MetricMode { strict, lenient };

struct FinalPerformance {
    double value;
    bool used_fewer_points; ///< lenient mode averaged all points because the curve had fewer than k
};

/// Mean of the last k curve values.
FinalPerformance final_performance(const LearningCurve& curve, std::size_t k,
                                   MetricMode mode = MetricMode::strict);

SummaryStats summarize(std::span<const double> values);
inline SummaryStats summarize(const PerformanceSample& sample) { return summarize(sample.values()); }

DifferenceStats difference_stats(const SummaryStats& first, const SummaryStats& second);

// ---------------------------------------------------------------------------
// Ingestion

enum class InputFormat { curves_csv, scores_csv, summary_json };

struct MetricConfig {
    std::size_t last_k = 10;
    MetricMode mode = MetricMode::strict;
};

struct SummaryGroup {
    std::string label;
    SummaryStats stats;
};

/// Result of reading one input. Exactly one of `samples` / `summaries` is
/// populated. Labels keep first-appearance order; values within a label are
/// ordered by seed id.
struct LoadedData {
    InputFormat format;
    std::vector<PerformanceSample> samples;
    std::vector<SummaryGroup> summaries;
    std::vector<std::string> warnings;
};

/// Reads `label,seed,step,value` rows and reduces each curve with `metric`.
LoadedData load_curves_csv(std::istream& in, const MetricConfig& metric = {});
/// Reads `label,seed,score` rows.
LoadedData load_scores_csv(std::istream& in);
/// Reads `{"groups":[{"label":..,"n":..,"mean":..,"std":..}]}`.
LoadedData load_summary_json(std::istream& in);

/// Picks the format from the file extension (.json) or the CSV header.
LoadedData load_samples(const std::filesystem::path& path, const MetricConfig& metric = {});
LoadedData load_samples(std::istream& in, InputFormat format, const MetricConfig& metric = {});

/// Header-sniffing without consuming a stream.
InputFormat detect_format(const std::filesystem::path& path);

} // namespace seedpower
