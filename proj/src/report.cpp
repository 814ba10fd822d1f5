#include "seedpower/report.hpp"

#include "seedpower/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

namespace seedpower {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw IoError("read error on '" + path.string() + "'");
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

namespace {

Json bound(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string_view kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::type1: return "type-I";
    case ErrorKind::type2: return "type-II";
    case ErrorKind::familywise: return "familywise";
    }
    return "?";
}

} // namespace

Json to_json(const Interval& interval) { return Json::array({bound(interval.lo), bound(interval.hi)}); }

Json to_json(const RunManifest& m) {
    Json doc = Json::object();
    doc["command"] = m.command;
    doc["config"] = m.config;
    if (m.uses_randomness) {
        doc["rng_seeds"] = m.seeds;
        doc["generator_id"] = std::string(kGeneratorId);
    }
    Json inputs = Json::array();
    for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
    doc["inputs"] = inputs;
    doc["tool_version"] = m.tool_version;
    return doc;
}

Json to_json(const WelchResult& r, const std::string& orientation) {
    Json doc = Json::object();
    doc["test"] = std::string(to_string(r.config.variant));
    doc["t"] = r.t_stat;
    doc["nu"] = r.nu;
    doc["p_value"] = r.p_value;
    doc["alpha"] = r.config.alpha;
    doc["tail"] = std::string(to_string(r.config.tail));
    doc["t_alpha"] = r.t_alpha;
    doc["mean_diff"] = r.mean_diff;
    doc["standard_error"] = r.standard_error;
    doc["ci1"] = to_json(r.ci1);
    doc["ci2"] = to_json(r.ci2);
    doc["reject_h0"] = r.reject_h0;
    doc["orientation"] = orientation;
    return doc;
}

Json to_json(const BootstrapResult& r, const std::string& orientation) {
    Json doc = Json::object();
    doc["test"] = "bootstrap";
    doc["ci"] = Json::array({r.ci_lo, r.ci_hi});
    doc["mean_diff"] = r.mean_diff;
    doc["alpha"] = r.config.alpha;
    doc["tail"] = "two-tail";
    doc["b_samples"] = r.b_samples;
    doc["rng_seed"] = r.config.rng_seed;
    doc["generator_id"] = std::string(kGeneratorId);
    doc["reject_h0"] = r.reject_h0;
    doc["small_sample_warning"] = r.small_sample_warning;
    doc["few_replicates_warning"] = r.few_replicates_warning;
    doc["orientation"] = orientation;
    return doc;
}

Json to_json(const CalibrationReport& r) {
    Json doc = Json::object();
    doc["error_type"] = std::string(kind_name(r.kind));
    doc[r.kind == ErrorKind::type2 ? "failure_rate" : "rejection_rate"] = r.rate;
    doc["events"] = r.events;
    doc["trials"] = r.trials;
    doc["degenerate_trials"] = r.degenerate_trials;
    doc["wilson_ci"] = to_json(r.wilson_ci);
    Json cfg = Json::object();
    cfg["test"] = std::string(to_string(r.config.test));
    cfg["group_size"] = r.config.group_size;
    cfg["alpha"] = r.config.alpha;
    cfg["tail"] = std::string(to_string(r.config.tail));
    cfg["trials"] = r.config.trials;
    cfg["rng_seed"] = r.config.rng_seed;
    if (r.config.test == CalibrationTest::bootstrap) cfg["bootstrap_b"] = r.config.bootstrap_b;
    cfg["generator_id"] = std::string(kGeneratorId);
    doc["config"] = cfg;
    return doc;
}

Json to_json(const SampleSizePlan& plan, const PowerQuery& q, double beta_target, int n_max,
             double safety_factor) {
    Json query = Json::object();
    query["s1"] = q.s1;
    query["s2"] = q.s2;
    query["alpha"] = q.alpha;
    query["tail"] = "one-tail-positive";
    query["effect_size"] = q.effect_size;
    query["beta_target"] = beta_target;
    query["n_max"] = n_max;
    query["safety_factor"] = safety_factor;

    Json doc = Json::object();
    doc["query"] = query;
    doc["required_n"] = plan.n;
    doc["beta_at_n"] = plan.beta;
    doc["power_at_n"] = 1.0 - plan.beta;
    doc["safety_n"] = safety_margin(plan.n, safety_factor);
    return doc;
}

Json to_json(const std::vector<Recommendation>& recommendations) {
    Json arr = Json::array();
    for (const auto& r : recommendations) arr.push_back({{"id", r.id}, {"message", r.message}});
    return arr;
}

std::string power_curve_csv(const PowerCurve& curve) {
    std::string out = "effect_size,n,beta\n";
    for (const auto& e : curve.entries)
        out += format_number(e.effect_size) + "," + std::to_string(e.n) + "," + format_number(e.beta) + "\n";
    return out;
}

std::string std_study_csv(const std::vector<StdStudyRow>& rows) {
    std::string out = "n,mean_s,std_s\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + format_number(r.mean_s) + "," + format_number(r.std_s) + "\n";
    return out;
}

std::string calibration_csv(const std::vector<CalibrationRow>& rows) {
    const bool type2 = !rows.empty() && rows.front().report.kind == ErrorKind::type2;
    std::string out = type2 ? "n,test,failure_rate,wilson_lo,wilson_hi\n" : "n,test,rejection_rate,wilson_lo,wilson_hi\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + r.test + "," + format_number(r.report.rate) + "," +
               format_number(r.report.wilson_ci.lo) + "," + format_number(r.report.wilson_ci.hi) + "\n";
    return out;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

} // namespace seedpower
