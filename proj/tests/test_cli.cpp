#include "doctest.h"

#include "seedpower/cli.hpp"
#include "seedpower/kernels.hpp"
#include "seedpower/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace seedpower;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(SEEDPOWER_FIXTURES) + "/" + name; }

Json json_of(const Run& r) { return Json::parse(r.out); }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("seedpower_cli_" + name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

constexpr int kOk = 0, kUsage = 2, kData = 3, kNumerical = 4, kUnattainable = 5, kIo = 6;

} // namespace

TEST_CASE("compare: pilot summary gives p about 0.1 and no rejection") {
    const auto r = run({"compare", fixture("pilot_summary.json"), "--quiet"});
    REQUIRE(r.code == kOk);
    CHECK(r.err.empty());
    const auto doc = json_of(r);
    const auto& w = doc["results"][0];
    CHECK(w["test"] == "welch");
    CHECK(std::fabs(w["p_value"].get<double>() - 0.10) < 0.015);
    CHECK(w["reject_h0"] == false);
    CHECK(w["alpha"] == 0.05);
    CHECK(w["tail"] == "two-tail");
    CHECK(w["orientation"] == "param_noise - action_noise");
    CHECK(doc["manifest"]["command"] == "compare");
    CHECK(doc["manifest"]["tool_version"] == "0.1.0");
    CHECK(doc["manifest"]["inputs"][0]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("compare: final summary rejects for both tails") {
    for (const char* tail : {"one", "two"}) {
        const auto r = run({"compare", fixture("final_summary.json"), "--tail", tail, "--quiet"});
        REQUIRE(r.code == kOk);
        CHECK(json_of(r)["results"][0]["reject_h0"] == true);
    }
    const auto one = json_of(run({"compare", fixture("final_summary.json"), "--tail", "one", "--quiet"}));
    CHECK(one["results"][0]["tail"] == "one-tail-positive");
    CHECK(one["results"][0]["ci1"][1].is_null());
}

TEST_CASE("compare: identical data fails to reject with both tests") {
    const auto r = run({"compare", fixture("identical_scores.csv"), "--test", "both", "--bootstrap-b", "2000", "--quiet"});
    REQUIRE(r.code == kOk);
    const auto doc = json_of(r);
    REQUIRE(doc["results"].size() == 2);
    CHECK(doc["results"][0]["test"] == "welch");
    CHECK(doc["results"][1]["test"] == "bootstrap");
    for (const auto& res : doc["results"]) CHECK(res["reject_h0"] == false);
    CHECK(doc["manifest"]["generator_id"] == "philox4x32-10/substream-v1");
}

TEST_CASE("compare: decision is data, exit code stays 0") {
    CHECK(run({"compare", fixture("final_summary.json"), "--quiet"}).code == kOk);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--quiet"}).code == kOk);
}

TEST_CASE("compare: curves CSV with metric flags") {
    CHECK(run({"compare", fixture("curves_2x5x3.csv"), "--quiet"}).code == kData);
    const auto strict = run({"compare", fixture("curves_2x5x3.csv"), "--metric-last-k", "2", "--quiet"});
    REQUIRE(strict.code == kOk);
    const auto doc = json_of(strict);
    CHECK(doc["groups"][0]["mean"] == 107.0);
    CHECK(doc["results"][0]["mean_diff"] == 10.0);
    const auto lenient = run({"compare", fixture("curves_2x5x3.csv"), "--lenient", "--quiet"});
    REQUIRE(lenient.code == kOk);
    CHECK_FALSE(json_of(lenient)["warnings"].empty());
}

TEST_CASE("compare: labels choose the orientation") {
    const auto r = run({"compare", fixture("pilot_summary.json"), "--labels", "action_noise,param_noise", "--quiet"});
    REQUIRE(r.code == kOk);
    const auto doc = json_of(r);
    CHECK(doc["orientation"] == "action_noise - param_noise");
    CHECK(doc["results"][0]["mean_diff"] == -1382.0);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--labels", "x,y", "--quiet"}).code != kOk);
}

TEST_CASE("compare: CSV output") {
    const auto r = run({"compare", fixture("pilot_summary.json"), "--format", "csv", "--test", "both", "--quiet",
                        "--bootstrap-b", "100"});
    // Bootstrap on summary statistics is impossible.
    CHECK(r.code != kOk);
    const auto csv = run({"compare", fixture("identical_scores.csv"), "--format", "csv", "--test", "both", "--quiet",
                          "--bootstrap-b", "500"});
    REQUIRE(csv.code == kOk);
    CHECK(csv.out.rfind("test,orientation,alpha,tail,mean_diff,statistic,nu,p_value,ci_lo,ci_hi,reject_h0\n", 0) == 0);
    CHECK(count_lines(csv.out) == 3);
}

TEST_CASE("compare: Bonferroni correction") {
    const auto r = run({"compare", fixture("final_summary.json"), "--n-experiments", "5", "--quiet"});
    REQUIRE(r.code == kOk);
    const auto doc = json_of(r);
    CHECK(doc["manifest"]["config"]["alpha_effective"] == 0.01);
    CHECK(doc["results"][0]["alpha"] == 0.01);
    CHECK(doc["results"][0]["reject_h0"] == false);
}

TEST_CASE("compare: errors map to exit codes") {
    const auto missing = run({"compare", "/no/such/input.csv"});
    CHECK(missing.code == kIo);
    CHECK(missing.err.find("/no/such/input.csv") != std::string::npos);

    const auto empty = temp_file("empty.csv", "");
    const auto e = run({"compare", empty.string()});
    CHECK(e.code == kData);
    CHECK(e.err.find("no records") != std::string::npos);

    const auto dup = temp_file("dup.csv", "label,seed,score\na,1,1\na,2,2\nb,1,1\nb,1,3\n");
    const auto d = run({"compare", dup.string()});
    CHECK(d.code == kData);
    CHECK(d.err.find("seed '1'") != std::string::npos);

    const auto flat = temp_file("flat.csv", "label,seed,score\na,1,1\na,2,1\nb,1,5\nb,2,5\n");
    CHECK(run({"compare", flat.string()}).code == kNumerical);

    const auto one = temp_file("one_label.csv", "label,seed,score\na,1,1\na,2,2\n");
    CHECK(run({"compare", one.string()}).code == kData);

    fs::remove(empty);
    fs::remove(dup);
    fs::remove(flat);
    fs::remove(one);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == kUsage);
    CHECK(run({"frobnicate"}).code == kUsage);
    CHECK(run({"compare"}).code == kUsage);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--alpha", "1.5"}).code == kUsage);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--alpha", "0"}).code == kUsage);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--tail", "three"}).code == kUsage);
    CHECK(run({"compare", fixture("pilot_summary.json"), "--test", "ks"}).code == kUsage);
    CHECK(run({"plan", "--s1", "1"}).code == kUsage);
    CHECK(run({"curve", "--s1", "1", "--s2", "1", "--effect-size", "1", "--n-min", "10", "--n-max", "5"}).code ==
          kUsage);
    CHECK(run({"--help"}).code == kOk);
}

TEST_CASE("plan examples") {
    auto plan_n = [](std::vector<std::string> args) {
        args.insert(args.begin(), "plan");
        args.push_back("--quiet");
        const auto r = run(args);
        REQUIRE(r.code == kOk);
        return json_of(r)["plan"];
    };
    const auto pilot = plan_n({"--s1", "1341", "--s2", "990", "--alpha", "0.05", "--effect-size", "1382",
                             "--beta-target", "0.2", "--n-max", "50", "--safety-factor", "1.0"});
    CHECK(pilot["required_n"] == 10);
    CHECK(pilot["safety_n"] == 10);
    CHECK(std::fabs(pilot["beta_at_n"].get<double>() - 0.19) < 0.01);
    CHECK(plan_n({"--s1", "1", "--s2", "1", "--effect-size", "0.9", "--safety-factor", "1.0"})["required_n"] == 17);
    CHECK(plan_n({"--s1", "0.6", "--s2", "0.6", "--effect-size", "0.9"})["required_n"] == 7);
    CHECK(plan_n({"--s1", "0.6", "--s2", "0.6", "--effect-size", "0.9"})["safety_n"] == 11);
    CHECK(plan_n({"--s1", "1341", "--s2", "990", "--effect-size", "1382", "--beta-target", "0.9999"})["required_n"] ==
          2);
}

TEST_CASE("plan from pilot data") {
    const auto r = run({"plan", "--input", fixture("pilot_summary.json"), "--quiet"});
    REQUIRE(r.code == kOk);
    const auto doc = json_of(r);
    CHECK(doc["plan"]["required_n"] == 10);
    bool small_pilot = false;
    for (const auto& rec : doc["recommendations"]) small_pilot |= rec["id"] == "pilot_n_small";
    CHECK(small_pilot);
}

TEST_CASE("plan: unattainable target") {
    const auto r = run({"plan", "--s1", "1341", "--s2", "990", "--effect-size", "1382", "--n-max", "8"});
    CHECK(r.code == kUnattainable);
    CHECK(r.err.find("beta(8)") != std::string::npos);
}

TEST_CASE("plan: CSV output") {
    const auto r = run({"plan", "--s1", "1", "--s2", "1", "--effect-size", "0.9", "--format", "csv", "--quiet"});
    REQUIRE(r.code == kOk);
    CHECK(r.out.rfind("required_n,beta_at_n,safety_n\n17,", 0) == 0);
}

TEST_CASE("curve: single cell and full grid") {
    const auto one = run({"curve", "--s1", "1341", "--s2", "990", "--effect-size", "1382", "--n-min", "5", "--n-max",
                          "5", "--quiet"});
    REQUIRE(one.code == kOk);
    CHECK(one.out.rfind("effect_size,n,beta\n1382,5,", 0) == 0);
    CHECK(count_lines(one.out) == 2);

    const auto grid = run({"curve", "--s1", "1341", "--s2", "990", "--effect-grid", "3523", "--quiet"});
    REQUIRE(grid.code == kOk);
    CHECK(count_lines(grid.out) == 1 + 49 * 10);

    const auto col = run({"curve", "--s1", "1341", "--s2", "990", "--effect-size", "1382", "--n-min", "9", "--n-max",
                          "10", "--quiet"});
    std::istringstream lines(col.out);
    std::string header, row9, row10;
    std::getline(lines, header);
    std::getline(lines, row9);
    std::getline(lines, row10);
    CHECK(std::stod(row9.substr(row9.rfind(',') + 1)) > 0.2);
    CHECK(std::stod(row10.substr(row10.rfind(',') + 1)) <= 0.2);
}

TEST_CASE("curve: JSON and table-out") {
    const auto table = fs::temp_directory_path() / "seedpower_cli_curve_table.csv";
    const auto r = run({"curve", "--s1", "1", "--s2", "1", "--effect-size", "0.45,0.9", "--n-max", "20", "--format",
                        "json", "--table-out", table.string(), "--quiet"});
    REQUIRE(r.code == kOk);
    const auto doc = json_of(r);
    CHECK(doc["manifest"]["command"] == "curve");
    CHECK(count_lines(slurp(table)) == 1 + 2 * 19);
    fs::remove(table);
}

TEST_CASE("calibrate: std-study table") {
    const auto r = run({"calibrate", "--mode", "std-study", "--draws", "2000", "--format", "csv", "--quiet"});
    REQUIRE(r.code == kOk);
    CHECK(r.out.rfind("n,mean_s,std_s\n2,", 0) == 0);
    CHECK(count_lines(r.out) == 30);
}

TEST_CASE("calibrate: synthetic normal welch at N=20") {
    const auto r = run({"calibrate", "--mode", "synthetic", "--n", "20", "--trials", "4000", "--quiet"});
    REQUIRE(r.code == kOk);
    const auto rep = json_of(r)["reports"][0];
    CHECK(std::fabs(rep["rejection_rate"].get<double>() - 0.05) < 0.015);
}

TEST_CASE("calibrate: pool mode") {
    const auto csv = run({"calibrate", "--mode", "pool", "--n-min", "5", "--n-max", "6", "--test", "both", "--trials",
                          "200", "--bootstrap-b", "200", "--format", "csv", "--quiet"});
    REQUIRE(csv.code == kOk);
    CHECK(csv.out.rfind("n,test,rejection_rate,wilson_lo,wilson_hi\n", 0) == 0);
    CHECK(count_lines(csv.out) == 5);

    CHECK(run({"calibrate", "--mode", "pool", "--n", "30", "--quiet"}).code == kData);

    const auto pool = temp_file("pool.csv", "label,seed,score\np,1,1\np,2,5\np,3,2\np,4,8\np,5,3\n");
    CHECK(run({"calibrate", "--mode", "pool", "--input", pool.string(), "--n", "3", "--quiet"}).code == kData);
    CHECK(run({"calibrate", "--mode", "pool", "--input", pool.string(), "--n", "2", "--quiet"}).code == kOk);
    fs::remove(pool);
}

TEST_CASE("calibrate: type-II and familywise modes") {
    const auto t2 = run({"calibrate", "--n", "17", "--effect-size", "0.9", "--trials", "2000", "--quiet"});
    REQUIRE(t2.code == kOk);
    const auto rep = json_of(t2)["reports"][0];
    CHECK(rep["error_type"] == "type-II");
    CHECK(std::fabs(rep["failure_rate"].get<double>() - 0.18) < 0.04);

    const auto fw = run({"calibrate", "--n", "10", "--fwer-experiments", "10", "--trials", "2000", "--quiet"});
    REQUIRE(fw.code == kOk);
    CHECK(json_of(fw)["reports"][0]["error_type"] == "familywise");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const std::vector<std::vector<std::string>> commands{
        {"compare", fixture("identical_scores.csv"), "--test", "bootstrap", "--bootstrap-b", "3000", "--seed", "11"},
        {"calibrate", "--mode", "pool", "--test", "both", "--trials", "300", "--bootstrap-b", "300", "--seed", "11"},
        {"calibrate", "--mode", "std-study", "--n-max", "8", "--draws", "3000", "--seed", "11"},
    };
    for (const auto& base : commands) {
        std::string ref;
        for (const char* threads : {"1", "4", "8", "1"}) {
            auto args = base;
            args.insert(args.end(), {"--threads", threads, "--quiet"});
            const auto r = run(args);
            REQUIRE(r.code == kOk);
            if (ref.empty()) ref = r.out;
            CHECK(r.out == ref);
        }
    }
    kernels::set_thread_count(0);
}

TEST_CASE("different seeds change the report") {
    const auto a = run({"calibrate", "--trials", "500", "--seed", "1", "--quiet"});
    const auto b = run({"calibrate", "--trials", "500", "--seed", "2", "--quiet"});
    CHECK(a.out != b.out);
}

TEST_CASE("--out writes the same bytes as stdout") {
    const auto path = fs::temp_directory_path() / "seedpower_cli_out.json";
    const auto to_stdout = run({"compare", fixture("final_summary.json"), "--quiet"});
    const auto to_file = run({"compare", fixture("final_summary.json"), "--quiet", "--out", path.string()});
    REQUIRE(to_file.code == kOk);
    CHECK(to_file.out.empty());
    CHECK(slurp(path) == to_stdout.out);
    fs::remove(path);
    CHECK(run({"compare", fixture("final_summary.json"), "--out", "/no/such/dir/x.json"}).code == kIo);
}

TEST_CASE("human-readable summary goes to stderr unless quiet") {
    const auto r = run({"compare", fixture("pilot_summary.json")});
    REQUIRE(r.code == kOk);
    CHECK(r.err.find("welch") != std::string::npos);
    CHECK(r.err.find("param_noise - action_noise") != std::string::npos);
}

TEST_CASE("config file: flags > file > defaults") {
    const auto cfg = temp_file("run.conf", "# comment\nalpha = 0.01\ntail = one\n\nbootstrap-b = 123\n");
    const auto from_file = json_of(run({"compare", fixture("final_summary.json"), "--config", cfg.string(), "--quiet"}));
    CHECK(from_file["results"][0]["alpha"] == 0.01);
    CHECK(from_file["results"][0]["tail"] == "one-tail-positive");
    const auto flag_wins = json_of(
        run({"compare", fixture("final_summary.json"), "--config", cfg.string(), "--alpha", "0.1", "--quiet"}));
    CHECK(flag_wins["results"][0]["alpha"] == 0.1);
    CHECK(flag_wins["results"][0]["tail"] == "one-tail-positive");
    const auto defaults = json_of(run({"compare", fixture("final_summary.json"), "--quiet"}));
    CHECK(defaults["results"][0]["alpha"] == 0.05);

    const auto bad = temp_file("bad.conf", "alpha 0.01\n");
    CHECK(run({"compare", fixture("final_summary.json"), "--config", bad.string()}).code == kUsage);
    CHECK(run({"compare", fixture("final_summary.json"), "--config", "/no/such.conf"}).code == kIo);
    fs::remove(cfg);
    fs::remove(bad);
}

TEST_CASE("recommendations encode the checklist") {
    auto ids = [](const Json& doc) {
        std::vector<std::string> out;
        for (const auto& r : doc["recommendations"]) out.push_back(r["id"]);
        return out;
    };
    auto has = [](const std::vector<std::string>& v, const char* id) {
        return std::find(v.begin(), v.end(), id) != v.end();
    };
    const auto boot = ids(json_of(run({"compare", fixture("identical_scores.csv"), "--test", "bootstrap",
                                       "--bootstrap-b", "500", "--quiet"})));
    CHECK(has(boot, "bootstrap_small_n"));
    CHECK(has(boot, "bootstrap_few_replicates"));
    CHECK(has(boot, "alpha_at_or_above_0.05"));
    const auto strict = ids(json_of(run({"compare", fixture("final_summary.json"), "--alpha", "0.01", "--quiet"})));
    CHECK_FALSE(has(strict, "alpha_at_or_above_0.05"));
}

TEST_CASE("report helpers") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1382.0) == "1382");
    CHECK(format_number(-2.5e-7) == "-2.5e-07");
    CHECK(dump(Json::object()) == "{}\n");
    CHECK(to_json(Interval{-INFINITY, 2.0})[0].is_null());
    CHECK(to_json(Interval{-1.0, 2.0})[1] == 2.0);
    // SHA-256 of "abc".
    const auto p = temp_file("abc.txt", "abc");
    CHECK(sha256_file(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    fs::remove(p);
}
