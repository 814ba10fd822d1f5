#include "seedpower/cli.hpp"

#include "seedpower/bootstrap_test.hpp"
#include "seedpower/empirical_error.hpp"
#include "seedpower/errors.hpp"
#include "seedpower/kernels.hpp"
#include "seedpower/power_analysis.hpp"
#include "seedpower/report.hpp"
#include "seedpower/sample_model.hpp"
#include "seedpower/welch_test.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef SEEDPOWER_VERSION
#define SEEDPOWER_VERSION "dev"
#endif

namespace seedpower::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Options shared by several subcommands. Defaults are documented in the README.
struct Options {
    double alpha = 0.05;
    std::string tail = "two";
    std::string test = "welch";
    std::size_t last_k = 10;
    bool lenient = false;
    std::size_t bootstrap_b = 10000;
    std::uint64_t seed = 0;
    std::vector<double> effect_sizes;
    double beta_target = 0.2;
    int n_max = 50;
    int n_min = 2;
    double safety_factor = kDefaultSafetyFactor;
    std::uint64_t trials = 1000;
    std::string format;
    std::string out;
    std::string table_out;
    int threads = 0;
    bool quiet = false;

    std::vector<std::string> inputs;
    std::vector<std::string> labels;
    int n_experiments = 1;

    std::optional<double> s1, s2;
    std::optional<double> effect_grid;
    std::optional<int> pilot_n;

    std::string mode = "synthetic";
    std::string dist = "normal";
    bool dist_given = false;
    std::optional<double> mu, sigma, mu2, sigma2;
    double weight = 0.5;
    std::size_t pool_size = 42;
    std::optional<std::uint64_t> pool_seed;
    std::optional<int> group_n;
    std::uint64_t draws = 10000;
    std::optional<int> fwer_experiments;
    std::string label;
};

std::string fixed(double x, int digits) {
    if (!std::isfinite(x)) return x > 0 ? "+inf" : (x < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

Tail parse_tail(const std::string& tail) { return tail == "one" ? Tail::one_positive : Tail::two; }

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + path + "'");
    file << text;
    if (!file) throw IoError("write failed on '" + path + "'");
}

RunManifest make_manifest(const std::string& command, Json config) {
    RunManifest m;
    m.command = command;
    m.config = std::move(config);
    m.tool_version = SEEDPOWER_VERSION;
    return m;
}

void add_input(RunManifest& m, const std::string& path) { m.inputs.push_back({path, sha256_file(path)}); }

void add_alpha_recommendation(std::vector<Recommendation>& recs, double alpha) {
    if (alpha >= 0.05)
        recs.push_back({"alpha_at_or_above_0.05",
                        "empirical false-positive rates can exceed the nominal level; consider alpha < 0.05"});
}

// ---------------------------------------------------------------------------
// compare

struct Group {
    std::string label;
    std::optional<PerformanceSample> sample;
    SummaryStats stats;
};

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.inputs.empty()) throw UsageError("compare needs at least one input file");
    const MetricConfig metric{o.last_k, o.lenient ? MetricMode::lenient : MetricMode::strict};

    std::vector<Group> groups;
    std::vector<std::string> warnings;
    for (const auto& path : o.inputs) {
        auto loaded = load_samples(path, metric);
        for (auto& w : loaded.warnings) warnings.push_back(path + ": " + w);
        auto add = [&](Group g) {
            for (const auto& existing : groups)
                if (existing.label == g.label) throw ParseError("label '" + g.label + "' appears in more than one input");
            groups.push_back(std::move(g));
        };
        for (auto& s : loaded.samples) {
            if (s.size() < 2)
                throw InsufficientDataError("label '" + s.label() + "' has " + std::to_string(s.size()) +
                                            " seed(s); at least 2 are needed");
            const auto stats = summarize(s);
            add({s.label(), std::move(s), stats});
        }
        for (auto& s : loaded.summaries) add({s.label, std::nullopt, s.stats});
    }

    std::vector<const Group*> chosen;
    if (!o.labels.empty()) {
        if (o.labels.size() != 2) throw UsageError("--labels takes exactly two labels");
        for (const auto& name : o.labels) {
            auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.label == name; });
            if (it == groups.end()) throw ParseError("label '" + name + "' not found in the inputs");
            chosen.push_back(&*it);
        }
    } else {
        if (groups.size() != 2)
            throw ParseError("inputs contain " + std::to_string(groups.size()) +
                             " labels; exactly two are needed (or select them with --labels)");
        chosen = {&groups[0], &groups[1]};
    }
    const Group& first = *chosen[0];
    const Group& second = *chosen[1];
    const std::string orientation = first.label + " - " + second.label;

    const bool run_t = o.test == "welch" || o.test == "pooled" || o.test == "both";
    const bool run_boot = o.test == "bootstrap" || o.test == "both";
    if (run_boot && (!first.sample || !second.sample))
        throw UsageError("the bootstrap test needs per-seed data; summary JSON only supports --test welch|pooled");

    const double alpha = bonferroni(o.alpha, o.n_experiments);
    const Tail tail = parse_tail(o.tail);

    Json config = Json::object();
    config["test"] = o.test;
    config["alpha"] = o.alpha;
    config["n_experiments"] = o.n_experiments;
    config["alpha_effective"] = alpha;
    config["tail"] = std::string(to_string(tail));
    config["metric_last_k"] = o.last_k;
    config["metric_mode"] = o.lenient ? "lenient" : "strict";
    if (run_boot) {
        config["bootstrap_b"] = o.bootstrap_b;
        config["seed"] = o.seed;
    }
    config["orientation"] = orientation;
    RunManifest manifest = make_manifest("compare", config);
    for (const auto& path : o.inputs) add_input(manifest, path);
    if (run_boot) {
        manifest.uses_randomness = true;
        manifest.seeds = {o.seed};
    }

    Json results = Json::array();
    std::vector<std::string> table;
    std::string csv = "test,orientation,alpha,tail,mean_diff,statistic,nu,p_value,ci_lo,ci_hi,reject_h0\n";
    std::vector<Recommendation> recs;
    add_alpha_recommendation(recs, alpha);

    if (run_t) {
        const TestConfig cfg{alpha, tail, o.test == "pooled" ? Variant::pooled : Variant::welch};
        const WelchResult r = run_welch(first.stats, second.stats, cfg);
        results.push_back(to_json(r, orientation));
        table.push_back(std::string(to_string(cfg.variant)) + ": t=" + fixed(r.t_stat, 4) + " nu=" +
                        fixed(r.nu, 3) + " p=" + fixed(r.p_value, 5) + " CI1=[" + fixed(r.ci1.lo, 3) + ", " +
                        fixed(r.ci1.hi, 3) + "] -> " + (r.reject_h0 ? "reject H0" : "fail to reject H0"));
        csv += std::string(to_string(cfg.variant)) + "," + orientation + "," + format_number(alpha) + "," +
               std::string(to_string(tail)) + "," + format_number(r.mean_diff) + "," + format_number(r.t_stat) +
               "," + format_number(r.nu) + "," + format_number(r.p_value) + "," + format_number(r.ci1.lo) + "," +
               format_number(r.ci1.hi) + "," + (r.reject_h0 ? "true" : "false") + "\n";
        if (!r.reject_h0)
            recs.push_back({"check_power",
                            "H0 was not rejected; run `plan` to estimate the type-II error at this sample size"});
    }
    if (run_boot) {
        const BootstrapConfig cfg{o.bootstrap_b, alpha, o.seed};
        const BootstrapResult r = bootstrap_diff_ci(*first.sample, *second.sample, cfg);
        results.push_back(to_json(r, orientation));
        table.push_back("bootstrap: CI=[" + fixed(r.ci_lo, 3) + ", " + fixed(r.ci_hi, 3) + "] B=" +
                        std::to_string(r.b_samples) + " -> " + (r.reject_h0 ? "reject H0" : "fail to reject H0"));
        csv += "bootstrap," + orientation + "," + format_number(alpha) + ",two-tail," + format_number(r.mean_diff) +
               ",,," + "," + format_number(r.ci_lo) + "," + format_number(r.ci_hi) + "," +
               (r.reject_h0 ? "true" : "false") + "\n";
        recs.push_back({"prefer_welch", "Welch's t-test is preferred over the bootstrap confidence-interval test"});
        if (r.small_sample_warning)
            recs.push_back({"bootstrap_small_n", "bootstrap test with fewer than 20 seeds per group: its type-I "
                                                 "error can be far above alpha"});
        if (r.few_replicates_warning)
            recs.push_back({"bootstrap_few_replicates", "B below 1000 makes the percentile interval noisy"});
    }
    if (o.n_experiments > 1)
        recs.push_back({"bonferroni_applied", "alpha divided by " + std::to_string(o.n_experiments) +
                                                  " experiments (Bonferroni)"});

    Json groups_json = Json::array();
    for (const Group* g : chosen)
        groups_json.push_back({{"label", g->label}, {"n", g->stats.n}, {"mean", g->stats.mean}, {"std", g->stats.std}});

    Json doc = Json::object();
    doc["manifest"] = to_json(manifest);
    doc["orientation"] = orientation;
    doc["alpha"] = alpha;
    doc["tail"] = std::string(to_string(tail));
    doc["groups"] = groups_json;
    doc["results"] = results;
    doc["warnings"] = warnings;
    doc["recommendations"] = to_json(recs);

    write_output(o.format == "csv" ? csv : dump(doc), o.out, out);
    if (!o.quiet) {
        err << "orientation: " << orientation << "  alpha=" << format_number(alpha) << "  "
            << to_string(tail) << "\n";
        for (const Group* g : chosen)
            err << "  " << g->label << ": n=" << g->stats.n << " mean=" << fixed(g->stats.mean, 3)
                << " std=" << fixed(g->stats.std, 3) << "\n";
        for (const auto& line : table) err << "  " << line << "\n";
        for (const auto& w : warnings) err << "warning: " << w << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// plan

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
    std::optional<double> s1 = o.s1, s2 = o.s2;
    std::optional<double> effect;
    if (!o.effect_sizes.empty()) effect = o.effect_sizes.front();
    std::optional<int> pilot_n = o.pilot_n;
    if (o.effect_sizes.size() > 1) throw UsageError("plan takes a single --effect-size");

    RunManifest manifest = make_manifest("plan", Json::object());
    if (!o.inputs.empty()) {
        if (o.inputs.size() != 1) throw UsageError("plan takes at most one pilot input");
        auto loaded = load_samples(o.inputs.front(), MetricConfig{o.last_k, o.lenient ? MetricMode::lenient
                                                                                     : MetricMode::strict});
        std::vector<SummaryGroup> groups = loaded.summaries;
        for (const auto& s : loaded.samples) groups.push_back({s.label(), summarize(s)});
        if (groups.size() != 2) throw ParseError("pilot input must contain exactly two labels");
        if (!s1) s1 = groups[0].stats.std;
        if (!s2) s2 = groups[1].stats.std;
        if (!effect) effect = std::fabs(groups[0].stats.mean - groups[1].stats.mean);
        if (!pilot_n) pilot_n = static_cast<int>(std::min(groups[0].stats.n, groups[1].stats.n));
        add_input(manifest, o.inputs.front());
    }
    if (!s1 || !s2) throw UsageError("plan needs --s1 and --s2 (or a pilot input)");
    if (!effect) throw UsageError("plan needs --effect-size (or a pilot input)");

    const PowerQuery query{s1.value(), s2.value(), o.alpha, effect.value()};
    Json config = Json::object();
    config["s1"] = query.s1;
    config["s2"] = query.s2;
    config["alpha"] = o.alpha;
    config["tail"] = "one-tail-positive";
    config["effect_size"] = query.effect_size;
    config["beta_target"] = o.beta_target;
    config["n_max"] = o.n_max;
    config["safety_factor"] = o.safety_factor;
    if (pilot_n) config["pilot_n"] = *pilot_n;
    manifest.config = config;

    SampleSizePlan plan{};
    try {
        plan = required_sample_size(query, o.beta_target, o.n_max);
    } catch (const UnattainableError& e) {
        err << "error: " << e.what() << "\n";
        err << "beta(" << e.n_max() << ") = " << format_number(e.beta_at_n_max()) << "\n";
        return static_cast<int>(ExitCode::unattainable);
    }

    std::vector<Recommendation> recs;
    add_alpha_recommendation(recs, o.alpha);
    recs.push_back({"use_safety_margin", "standard deviations estimated from a pilot study tend to be "
                                         "underestimated; run safety_n seeds rather than required_n"});
    if (pilot_n && *pilot_n < 20)
        recs.push_back({"pilot_n_small", "pilot study has fewer than 20 seeds per group; s1 and s2 are unreliable"});

    Json doc = Json::object();
    doc["manifest"] = to_json(manifest);
    doc["plan"] = to_json(plan, query, o.beta_target, o.n_max, o.safety_factor);
    doc["recommendations"] = to_json(recs);

    if (o.format == "csv") {
        write_output("required_n,beta_at_n,safety_n\n" + std::to_string(plan.n) + "," + format_number(plan.beta) +
                         "," + std::to_string(safety_margin(plan.n, o.safety_factor)) + "\n",
                     o.out, out);
    } else {
        write_output(dump(doc), o.out, out);
    }
    if (!o.quiet)
        err << "required N = " << plan.n << " (beta = " << fixed(plan.beta, 4) << "), with safety factor "
            << format_number(o.safety_factor) << ": N = " << safety_margin(plan.n, o.safety_factor) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// curve

int cmd_curve(const Options& o, std::ostream& out, std::ostream&) {
    if (!o.s1 || !o.s2) throw UsageError("curve needs --s1 and --s2");
    if (o.n_max < o.n_min) throw UsageError("--n-max must be >= --n-min");
    if (o.n_min < 2) throw UsageError("--n-min must be >= 2");
    std::vector<double> effects = o.effect_sizes;
    if (o.effect_grid) {
        if (!(*o.effect_grid > 0.0)) throw UsageError("--effect-grid needs a positive reference value");
        for (int k = 1; k <= 10; ++k) effects.push_back(*o.effect_grid * k / 10.0);
    }
    if (effects.empty()) throw UsageError("curve needs --effect-size or --effect-grid");

    const PowerQuery base{*o.s1, *o.s2, o.alpha, effects.front()};
    const PowerCurve curve = power_curve(base, o.n_min, o.n_max, effects);
    const std::string csv = power_curve_csv(curve);

    if (o.format == "json") {
        Json config = Json::object();
        config["s1"] = *o.s1;
        config["s2"] = *o.s2;
        config["alpha"] = o.alpha;
        config["tail"] = "one-tail-positive";
        config["n_min"] = o.n_min;
        config["n_max"] = o.n_max;
        config["effect_sizes"] = effects;
        Json entries = Json::array();
        for (const auto& e : curve.entries)
            entries.push_back({{"effect_size", e.effect_size}, {"n", e.n}, {"beta", e.beta}});
        Json doc = Json::object();
        doc["manifest"] = to_json(make_manifest("curve", config));
        doc["entries"] = entries;
        write_output(dump(doc), o.out, out);
    } else {
        write_output(csv, o.out, out);
    }
    if (!o.table_out.empty()) write_output(csv, o.table_out, out);
    return 0;
}

// ---------------------------------------------------------------------------
// calibrate

SyntheticDistribution make_distribution(const Options& o, Json& description) {
    if (o.dist == "normal") {
        const double mu = o.mu.value_or(0.0), sigma = o.sigma.value_or(1.0);
        description = {{"kind", "normal"}, {"mu", mu}, {"sigma", sigma}};
        return SyntheticDistribution::normal(mu, sigma);
    }
    if (o.dist == "lognormal") {
        const double mu = o.mu.value_or(0.0), sigma = o.sigma.value_or(1.0);
        description = {{"kind", "lognormal"}, {"mu", mu}, {"sigma", sigma}};
        return SyntheticDistribution::lognormal(mu, sigma);
    }
    // Default mixture mimics a bimodal performance distribution.
    const double mu = o.mu.value_or(3000.0), sigma = o.sigma.value_or(400.0);
    const double mu2 = o.mu2.value_or(5000.0), sigma2 = o.sigma2.value_or(400.0);
    description = {{"kind", "bimodal"}, {"mu", mu},          {"sigma", sigma},
                   {"mu2", mu2},        {"sigma2", sigma2}, {"weight", o.weight}};
    return SyntheticDistribution::bimodal(mu, sigma, mu2, sigma2, o.weight);
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
    Json config = Json::object();
    config["mode"] = o.mode;
    RunManifest manifest = make_manifest("calibrate", Json::object());
    manifest.uses_randomness = true;
    manifest.seeds = {o.seed};

    std::vector<Recommendation> recs;
    std::string csv;
    Json doc = Json::object();

    if (o.mode == "std-study") {
        const int n_min = o.group_n.value_or(o.n_min);
        const int n_max = o.group_n.value_or(o.n_max);
        if (n_max < n_min) throw UsageError("--n-max must be >= --n-min");
        if (n_min < 2) throw UsageError("std study needs n >= 2");
        config["n_min"] = n_min;
        config["n_max"] = n_max;
        config["draws"] = o.draws;
        config["seed"] = o.seed;
        manifest.config = config;
        const auto rows = std_estimation_study(static_cast<std::size_t>(n_min), static_cast<std::size_t>(n_max),
                                               o.draws, o.seed);
        csv = std_study_csv(rows);
        Json arr = Json::array();
        for (const auto& r : rows) arr.push_back({{"n", r.n}, {"mean_s", r.mean_s}, {"std_s", r.std_s}});
        recs.push_back({"pilot_n_at_least_20", "use at least 20 seeds in a pilot study to estimate s1 and s2"});
        doc["manifest"] = to_json(manifest);
        doc["rows"] = arr;
        doc["recommendations"] = to_json(recs);
    } else {
        if (o.test == "pooled") throw UsageError("calibrate supports --test welch, bootstrap or both");
        std::vector<CalibrationTest> tests;
        if (o.test == "welch" || o.test == "both") tests.push_back(CalibrationTest::welch);
        if (o.test == "bootstrap" || o.test == "both") tests.push_back(CalibrationTest::bootstrap);

        const int n_min = o.group_n.value_or(o.n_min);
        const int n_max = o.group_n.value_or(o.n_max);
        if (n_max < n_min) throw UsageError("--n-max must be >= --n-min");
        if (n_min < 1) throw UsageError("group size must be >= 1");

        Json dist_json;
        std::optional<PerformanceSample> pool;
        std::optional<SyntheticDistribution> dist;
        if (o.mode == "pool") {
            if (!o.inputs.empty()) {
                if (o.inputs.size() != 1) throw UsageError("pool mode takes one input file");
                auto loaded = load_samples(o.inputs.front(), MetricConfig{o.last_k, o.lenient ? MetricMode::lenient
                                                                                             : MetricMode::strict});
                if (!loaded.summaries.empty()) throw ParseError("pool mode needs per-seed data, not summary JSON");
                auto it = loaded.samples.begin();
                if (!o.label.empty()) {
                    it = std::find_if(loaded.samples.begin(), loaded.samples.end(),
                                      [&](const PerformanceSample& s) { return s.label() == o.label; });
                    if (it == loaded.samples.end()) throw ParseError("label '" + o.label + "' not found");
                } else if (loaded.samples.size() != 1) {
                    throw ParseError("pool input has several labels; choose one with --label");
                }
                pool = *it;
                add_input(manifest, o.inputs.front());
                config["pool_label"] = pool->label();
            } else {
                const auto source = make_distribution(o, dist_json);
                const std::uint64_t pool_seed = o.pool_seed.value_or(o.seed);
                pool = draw_pool(source, o.pool_size, pool_seed);
                config["pool_distribution"] = dist_json;
                config["pool_size"] = o.pool_size;
                config["pool_seed"] = pool_seed;
            }
            config["pool_n"] = pool->size();
        } else if (o.mode == "synthetic") {
            dist = make_distribution(o, dist_json);
            config["distribution"] = dist_json;
        } else {
            throw UsageError("unknown --mode '" + o.mode + "'");
        }

        const bool type2 = o.mode == "synthetic" && !o.effect_sizes.empty();
        if (type2 && o.test != "welch") throw UsageError("type-II calibration supports --test welch only");
        if (o.fwer_experiments && (o.mode != "synthetic" || type2 || o.test != "welch"))
            throw UsageError("--fwer-experiments needs --mode synthetic --test welch without --effect-size");

        config["test"] = o.test;
        config["alpha"] = o.alpha;
        config["tail"] = type2 ? "one-tail-positive" : std::string(to_string(parse_tail(o.tail)));
        config["trials"] = o.trials;
        config["n_min"] = n_min;
        config["n_max"] = n_max;
        if (o.test != "welch") config["bootstrap_b"] = o.bootstrap_b;
        config["seed"] = o.seed;
        if (type2) config["effect_sizes"] = o.effect_sizes;
        if (o.fwer_experiments) config["fwer_experiments"] = *o.fwer_experiments;
        manifest.config = config;

        std::vector<CalibrationRow> rows;
        const std::vector<double> effects = type2 ? o.effect_sizes : std::vector<double>{0.0};
        for (double eps : effects) {
            for (int n = n_min; n <= n_max; ++n) {
                for (CalibrationTest test : tests) {
                    CalibrationConfig cfg;
                    cfg.trials = o.trials;
                    cfg.group_size = static_cast<std::size_t>(n);
                    cfg.test = test;
                    cfg.alpha = o.alpha;
                    cfg.rng_seed = o.seed;
                    cfg.bootstrap_b = o.bootstrap_b;
                    cfg.tail = parse_tail(o.tail);
                    CalibrationReport report{};
                    if (pool) {
                        report = empirical_type1_from_pool(*pool, cfg);
                    } else if (type2) {
                        report = empirical_type2_synthetic(*dist, dist->shifted(eps), cfg);
                    } else if (o.fwer_experiments) {
                        report = empirical_fwer_synthetic(*dist, *o.fwer_experiments, cfg);
                    } else {
                        report = empirical_type1_synthetic(*dist, cfg);
                    }
                    rows.push_back({static_cast<std::size_t>(n), std::string(to_string(test)), report});
                    const double nominal = report.kind == ErrorKind::type2 ? 1.0 : o.alpha;
                    if (report.kind != ErrorKind::type2 && report.wilson_ci.lo > nominal)
                        recs.push_back({"empirical_alpha_above_nominal",
                                        std::string(to_string(test)) + " at N=" + std::to_string(n) +
                                            ": empirical false-positive rate exceeds alpha; use a smaller alpha"});
                    if (test == CalibrationTest::bootstrap && n < 20)
                        recs.push_back({"bootstrap_small_n", "bootstrap test at N=" + std::to_string(n) +
                                                                 " < 20 is not calibrated"});
                }
            }
        }
        csv = calibration_csv(rows);
        Json reports = Json::array();
        for (const auto& row : rows) {
            Json r = to_json(row.report);
            r["n"] = row.n;
            reports.push_back(r);
        }
        if (type2) {
            // Rows are generated effect-major.
            const std::size_t per_effect = rows.size() / effects.size();
            for (std::size_t i = 0; i < reports.size(); ++i) reports[i]["effect_size"] = effects[i / per_effect];
        }
        doc["manifest"] = to_json(manifest);
        doc["reports"] = reports;
        doc["recommendations"] = to_json(recs);
        if (!o.quiet)
            for (const auto& row : rows)
                err << row.test << " N=" << row.n << ": rate=" << fixed(row.report.rate, 4) << " [" 
                    << fixed(row.report.wilson_ci.lo, 4) << ", " << fixed(row.report.wilson_ci.hi, 4) << "]"
                    << (row.report.degenerate_trials ? " degenerate=" + std::to_string(row.report.degenerate_trials) : "")
                    << "\n";
    }

    write_output(o.format == "csv" ? csv : dump(doc), o.out, out);
    if (!o.table_out.empty()) write_output(csv, o.table_out, out);
    return 0;
}

// ---------------------------------------------------------------------------

// Appends `--key value` for config-file keys the subcommand accepts and the
// command line does not already set.
std::vector<std::string> merge_config_file(std::vector<std::string> args, CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty() || args.empty()) return args;

    CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args.front());
    } catch (const CLI::OptionNotFound&) {
        return args;
    }

    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr) continue;
        const bool on_command_line = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.starts_with(flag + "=");
        });
        if (on_command_line) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1") args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        args.push_back(value);
    }
    return args;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;

    CLI::App app{"Seed-count planning and significance testing for comparing two stochastic algorithms", "seedpower"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(SEEDPOWER_VERSION));

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", o.alpha, "significance level (default 0.05)")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "output file (default stdout)");
        sub->add_option("--threads", o.threads, "worker threads, 0 = OpenMP default")->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", o.quiet, "suppress the human-readable summary");
        sub->add_option("--config", "flat key = value config file; flags take precedence");
    };
    const auto add_metric = [&](CLI::App* sub) {
        sub->add_option("--metric-last-k", o.last_k, "average the last k curve points (default 10)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--lenient", o.lenient, "average all points of curves shorter than k instead of failing");
    };

    CLI::App* compare = app.add_subcommand("compare", "test whether two algorithms differ");
    add_common(compare);
    add_metric(compare);
    compare->add_option("inputs", o.inputs, "curves CSV, scores CSV or summary JSON files")->required();
    compare->add_option("--tail", o.tail)->check(CLI::IsMember({"one", "two"}));
    compare->add_option("--test", o.test)->check(CLI::IsMember({"welch", "pooled", "bootstrap", "both"}));
    compare->add_option("--bootstrap-b", o.bootstrap_b, "bootstrap replicates (default 10000)")
        ->check(CLI::PositiveNumber);
    compare->add_option("--seed", o.seed, "master seed (default 0)");
    compare->add_option("--labels", o.labels, "the two labels to compare, first minus second")->delimiter(',');
    compare->add_option("--n-experiments", o.n_experiments, "Bonferroni: divide alpha by this count")
        ->check(CLI::PositiveNumber);

    CLI::App* plan = app.add_subcommand("plan", "smallest number of seeds meeting a type-II target");
    add_common(plan);
    add_metric(plan);
    plan->add_option("--s1", o.s1)->check(CLI::NonNegativeNumber);
    plan->add_option("--s2", o.s2)->check(CLI::NonNegativeNumber);
    plan->add_option("--effect-size", o.effect_sizes, "effect size to detect");
    plan->add_option("--beta-target", o.beta_target, "maximum type-II error (default 0.2)")
        ->check(CLI::Range(0.0, 1.0));
    plan->add_option("--n-max", o.n_max, "largest N considered (default 50)");
    plan->add_option("--safety-factor", o.safety_factor, "multiplier applied to the required N (default 1.5)")
        ->check(CLI::Range(1.0, 1e6));
    plan->add_option("--pilot-n", o.pilot_n, "seeds per group in the pilot study");
    plan->add_option("--input", o.inputs, "pilot data: s1, s2 and effect size default to its statistics");

    CLI::App* curve = app.add_subcommand("curve", "type-II error over a grid of N and effect sizes");
    add_common(curve);
    curve->add_option("--s1", o.s1)->check(CLI::NonNegativeNumber);
    curve->add_option("--s2", o.s2)->check(CLI::NonNegativeNumber);
    curve->add_option("--effect-size", o.effect_sizes, "effect sizes (repeatable, comma separated)")->delimiter(',');
    curve->add_option("--effect-grid", o.effect_grid, "use effect sizes 0.1, 0.2, ..., 1.0 times this value");
    curve->add_option("--n-min", o.n_min, "(default 2)");
    curve->add_option("--n-max", o.n_max, "(default 50)");
    curve->add_option("--table-out", o.table_out, "also write the CSV table here");

    CLI::App* calibrate = app.add_subcommand("calibrate", "Monte-Carlo estimates of the tests' error rates");
    add_common(calibrate);
    add_metric(calibrate);
    calibrate->add_option("--mode", o.mode, "(default synthetic)")->check(CLI::IsMember({"pool", "synthetic", "std-study"}));
    calibrate->add_option("--test", o.test)->check(CLI::IsMember({"welch", "pooled", "bootstrap", "both"}));
    calibrate->add_option("--tail", o.tail)->check(CLI::IsMember({"one", "two"}));
    calibrate->add_option("--trials", o.trials, "(default 1000)")->check(CLI::PositiveNumber);
    calibrate->add_option("--bootstrap-b", o.bootstrap_b, "bootstrap replicates per trial (default 1000)")
        ->check(CLI::PositiveNumber);
    calibrate->add_option("--seed", o.seed, "master seed (default 0)");
    calibrate->add_option("--input", o.inputs, "pool mode: measurements of a single algorithm");
    calibrate->add_option("--label", o.label, "pool mode: label to use from a multi-label input");
    calibrate->add_option("--n", o.group_n, "single group size");
    auto* n_min_opt = calibrate->add_option("--n-min", o.n_min, "(default 5; 2 for std-study)");
    auto* n_max_opt = calibrate->add_option("--n-max", o.n_max, "(default --n-min; 30 for std-study)");
    auto* dist_opt = calibrate->add_option("--dist", o.dist, "synthetic distribution (default normal; pool default bimodal)")
        ->check(CLI::IsMember({"normal", "bimodal", "lognormal"}));
    calibrate->add_option("--mu", o.mu);
    calibrate->add_option("--sigma", o.sigma)->check(CLI::PositiveNumber);
    calibrate->add_option("--mu2", o.mu2);
    calibrate->add_option("--sigma2", o.sigma2)->check(CLI::PositiveNumber);
    calibrate->add_option("--weight", o.weight, "mixture weight of the first component")->check(CLI::Range(0.0, 1.0));
    calibrate->add_option("--pool-size", o.pool_size, "synthetic pool size (default 42)")->check(CLI::PositiveNumber);
    calibrate->add_option("--pool-seed", o.pool_seed, "seed of the synthetic pool (default --seed)");
    calibrate->add_option("--effect-size", o.effect_sizes, "synthetic mode: estimate type-II error at these shifts")
        ->delimiter(',');
    calibrate->add_option("--fwer-experiments", o.fwer_experiments,
                          "synthetic mode: familywise error of this many Bonferroni-corrected tests")
        ->check(CLI::PositiveNumber);
    calibrate->add_option("--draws", o.draws, "std-study draws per n (default 10000)")->check(CLI::PositiveNumber);
    calibrate->add_option("--table-out", o.table_out, "also write the CSV table here");

    try {
        std::vector<std::string> args = merge_config_file(raw_args, app);
        std::reverse(args.begin(), args.end());

        // calibrate runs B replicates inside every trial, so its default B is smaller.
        if (!raw_args.empty() && raw_args.front() == "calibrate") o.bootstrap_b = 1000;
        app.parse(args);

        if (calibrate->parsed()) {
            const bool std_study = o.mode == "std-study";
            if (n_min_opt->count() == 0) o.n_min = std_study ? 2 : 5;
            if (n_max_opt->count() == 0) o.n_max = std_study ? 30 : o.n_min;
            o.dist_given = dist_opt->count() > 0;
            if (!o.dist_given && o.mode == "pool") o.dist = "bimodal";
        }
        if (o.format.empty()) o.format = curve->parsed() ? "csv" : "json";
        kernels::set_thread_count(o.threads);

        if (compare->parsed()) return cmd_compare(o, out, err);
        if (plan->parsed()) return cmd_plan(o, out, err);
        if (curve->parsed()) return cmd_curve(o, out, err);
        return cmd_calibrate(o, out, err);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << SEEDPOWER_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::usage);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::usage);
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::usage);
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::io);
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::data);
    } catch (const InsufficientDataError& e) {
        err << "data error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::data);
    } catch (const DegenerateSampleError& e) {
        err << "numerical error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::numerical);
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::numerical);
    } catch (const UnattainableError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::unattainable);
    }
}

} // namespace seedpower::cli
