#pragma once

// JSON and CSV serialization for every report the CLI emits. Output is a
// pure function of its inputs so equal manifests give byte-identical files.

#include "seedpower/bootstrap_test.hpp"
#include "seedpower/empirical_error.hpp"
#include "seedpower/power_analysis.hpp"
#include "seedpower/welch_test.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace seedpower {

using Json = nlohmann::ordered_json;

struct InputDigest {
    std::string path;
    std::string sha256;
};

/// Everything needed to reproduce a report.
struct RunManifest {
    std::string command;
    Json config = Json::object();
    std::vector<std::uint64_t> seeds;
    bool uses_randomness = false;
    std::vector<InputDigest> inputs;
    std::string tool_version;
};

struct Recommendation {
    std::string id;
    std::string message;
};

/// Hex SHA-256 of a file's bytes. IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_number(double value);

Json to_json(const RunManifest& manifest);
Json to_json(const Interval& interval); ///< [lo, hi]; unbounded ends are null
Json to_json(const WelchResult& result, const std::string& orientation);
Json to_json(const BootstrapResult& result, const std::string& orientation);
Json to_json(const CalibrationReport& report);
Json to_json(const SampleSizePlan& plan, const PowerQuery& query, double beta_target, int n_max,
             double safety_factor);
Json to_json(const std::vector<Recommendation>& recommendations);

/// `effect_size,n,beta`
std::string power_curve_csv(const PowerCurve& curve);
/// `n,mean_s,std_s`
std::string std_study_csv(const std::vector<StdStudyRow>& rows);

/// One row of the calibration plot table.
struct CalibrationRow {
    std::size_t n;
    std::string test;
    CalibrationReport report;
};
/// `n,test,rejection_rate,wilson_lo,wilson_hi` (type-II rows use `failure_rate`).
std::string calibration_csv(const std::vector<CalibrationRow>& rows);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& doc);

} // namespace seedpower
