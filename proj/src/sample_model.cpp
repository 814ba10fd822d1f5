#include "seedpower/sample_model.hpp"

#include "seedpower/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace seedpower {

LearningCurve::LearningCurve(std::string seed_id, std::vector<CurvePoint> points)
    : seed_id_(std::move(seed_id)), points_(std::move(points)) {
    if (points_.empty()) throw InsufficientDataError("learning curve '" + seed_id_ + "' has no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].value))
            throw DomainError("learning curve '" + seed_id_ + "' has a non-finite value");
        if (i > 0 && points_[i].step <= points_[i - 1].step)
            throw DomainError("learning curve '" + seed_id_ + "' steps are not strictly increasing");
    }
}

PerformanceSample::PerformanceSample(std::string label, std::vector<double> values)
    : label_(std::move(label)), values_(std::move(values)) {
    if (values_.empty()) throw InsufficientDataError("sample '" + label_ + "' is empty");
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw DomainError("sample '" + label_ + "' has a non-finite value");
}

SummaryStats SummaryStats::checked(std::size_t n, double mean, double std) {
    if (n < 2) throw InsufficientDataError("summary statistics need n >= 2, got " + std::to_string(n));
    if (!std::isfinite(mean)) throw DomainError("summary mean must be finite");
    if (!std::isfinite(std) || std < 0.0) throw DomainError("summary std must be finite and >= 0");
    return {n, mean, std};
}

FinalPerformance final_performance(const LearningCurve& curve, std::size_t k, MetricMode mode) {
    if (k == 0) throw DomainError("final_performance needs k >= 1");
    const auto points = curve.points();
    bool short_curve = false;
    if (points.size() < k) {
        if (mode == MetricMode::strict)
            throw InsufficientDataError("curve '" + curve.seed_id() + "' has " +
                                        std::to_string(points.size()) + " points, fewer than k=" +
                                        std::to_string(k));
        short_curve = true;
        k = points.size();
    }
    double sum = 0.0;
    for (std::size_t i = points.size() - k; i < points.size(); ++i) sum += points[i].value;
    return {sum / static_cast<double>(k), short_curve};
}

SummaryStats summarize(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw InsufficientDataError("standard deviation needs at least 2 values, got " + std::to_string(n));
    // Rounding in the mean would otherwise leave a tiny nonzero std for constant samples.
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; }))
        return {n, values[0], 0.0};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {n, mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

DifferenceStats difference_stats(const SummaryStats& first, const SummaryStats& second) {
    return {first.mean - second.mean, std::sqrt(first.std * first.std + second.std * second.std), first,
            second};
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && trim(field).empty()) {
            quoted = true;
            was_quoted = true;
            field.clear();
        } else if (c == ',') {
            fields.push_back(was_quoted ? field : std::string(trim(field)));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(was_quoted ? field : std::string(trim(field)));
    return fields;
}

double parse_real(const std::string& text, const char* column, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParseError(std::string("invalid number in column '") + column + "': '" + text + "'", line_no);
    if (!std::isfinite(value))
        throw ParseError(std::string("non-finite value in column '") + column + "'", line_no);
    return value;
}

std::uint64_t parse_step(const std::string& text, std::size_t line_no) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError("invalid step '" + text + "' (nonnegative integer expected)", line_no);
    return value;
}

// Seeds compare numerically when both are integers, lexicographically otherwise.
struct SeedOrder {
    static std::optional<std::uint64_t> as_integer(const std::string& s) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
        return v;
    }
    bool operator()(const std::string& a, const std::string& b) const {
        const auto ia = as_integer(a);
        const auto ib = as_integer(b);
        if (ia && ib) return *ia != *ib ? *ia < *ib : a < b;
        if (ia != ib) return ia.has_value(); // integers first
        return a < b;
    }
};

class CsvReader {
public:
    CsvReader(std::istream& in, std::vector<std::string> expected_header)
        : in_(in), header_(std::move(expected_header)) {}

    // Calls fn(fields, line_no) for each data row; returns the row count.
    template <class Fn>
    std::size_t for_each_row(Fn&& fn) {
        std::string line;
        std::size_t line_no = 0;
        bool have_header = false;
        std::size_t rows = 0;
        while (std::getline(in_, line)) {
            ++line_no;
            std::string_view view = line;
            if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
            if (trim(view).empty()) continue;
            auto fields = split_csv(view, line_no);
            if (!have_header) {
                if (fields != header_) throw ParseError("expected header '" + joined_header() + "'", line_no);
                have_header = true;
                continue;
            }
            if (fields.size() != header_.size())
                throw ParseError("expected " + std::to_string(header_.size()) + " fields, got " +
                                     std::to_string(fields.size()),
                                 line_no);
            fn(fields, line_no);
            ++rows;
        }
        if (in_.bad()) throw IoError("read error");
        if (rows == 0) throw ParseError("no records");
        return rows;
    }

private:
    std::string joined_header() const {
        std::string s;
        for (const auto& h : header_) s += (s.empty() ? "" : ",") + h;
        return s;
    }

    std::istream& in_;
    std::vector<std::string> header_;
};

template <class Value>
struct LabelledTable {
    std::vector<std::string> order;
    std::map<std::string, std::map<std::string, Value, SeedOrder>> by_label;

    std::map<std::string, Value, SeedOrder>& group(const std::string& label) {
        auto it = by_label.find(label);
        if (it == by_label.end()) {
            order.push_back(label);
            it = by_label.emplace(label, std::map<std::string, Value, SeedOrder>{}).first;
        }
        return it->second;
    }
};

} // namespace

LoadedData load_curves_csv(std::istream& in, const MetricConfig& metric) {
    LabelledTable<std::map<std::uint64_t, double>> table;
    CsvReader reader(in, {"label", "seed", "step", "value"});
    reader.for_each_row([&](const std::vector<std::string>& f, std::size_t line_no) {
        if (f[0].empty()) throw ParseError("empty label", line_no);
        if (f[1].empty()) throw ParseError("empty seed", line_no);
        const std::uint64_t step = parse_step(f[2], line_no);
        const double value = parse_real(f[3], "value", line_no);
        auto& curve = table.group(f[0])[f[1]];
        if (!curve.emplace(step, value).second)
            throw ParseError("duplicate row for label '" + f[0] + "', seed '" + f[1] + "', step " + f[2],
                             line_no);
    });

    LoadedData out{InputFormat::curves_csv, {}, {}, {}};
    for (const auto& label : table.order) {
        std::vector<double> values;
        for (const auto& [seed, points] : table.by_label.at(label)) {
            std::vector<CurvePoint> curve_points;
            curve_points.reserve(points.size());
            for (const auto& [step, value] : points) curve_points.push_back({step, value});
            const auto perf = final_performance(LearningCurve(seed, std::move(curve_points)), metric.last_k,
                                                metric.mode);
            if (perf.used_fewer_points)
                out.warnings.push_back("label '" + label + "', seed '" + seed + "': fewer than " +
                                       std::to_string(metric.last_k) + " points, averaged all points");
            values.push_back(perf.value);
        }
        out.samples.emplace_back(label, std::move(values));
    }
    return out;
}

LoadedData load_scores_csv(std::istream& in) {
    LabelledTable<double> table;
    CsvReader reader(in, {"label", "seed", "score"});
    reader.for_each_row([&](const std::vector<std::string>& f, std::size_t line_no) {
        if (f[0].empty()) throw ParseError("empty label", line_no);
        if (f[1].empty()) throw ParseError("empty seed", line_no);
        const double score = parse_real(f[2], "score", line_no);
        if (!table.group(f[0]).emplace(f[1], score).second)
            throw ParseError("duplicate seed '" + f[1] + "' for label '" + f[0] + "'", line_no);
    });

    LoadedData out{InputFormat::scores_csv, {}, {}, {}};
    for (const auto& label : table.order) {
        std::vector<double> values;
        for (const auto& [seed, score] : table.by_label.at(label)) values.push_back(score);
        out.samples.emplace_back(label, std::move(values));
    }
    return out;
}

LoadedData load_summary_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        if (e.byte <= 1) throw ParseError("no records");
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
        throw ParseError("summary JSON needs a top-level \"groups\" array");
    const auto& groups = doc["groups"];
    if (groups.empty()) throw ParseError("no records");

    LoadedData out{InputFormat::summary_json, {}, {}, {}};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const std::string where = "groups[" + std::to_string(i) + "]";
        if (!g.is_object()) throw ParseError(where + " is not an object");
        for (const char* key : {"label", "n", "mean", "std"})
            if (!g.contains(key)) throw ParseError(where + " is missing \"" + key + "\"");
        if (!g["label"].is_string()) throw ParseError(where + ".label must be a string");
        if (!g["n"].is_number_integer()) throw ParseError(where + ".n must be an integer");
        if (!g["mean"].is_number() || !g["std"].is_number())
            throw ParseError(where + ".mean and .std must be numbers");
        const auto label = g["label"].get<std::string>();
        const auto n = g["n"].get<std::int64_t>();
        if (n < 2) throw ParseError(where + ".n must be >= 2");
        for (const auto& existing : out.summaries)
            if (existing.label == label) throw ParseError("duplicate label '" + label + "'");
        try {
            out.summaries.push_back(
                {label, SummaryStats::checked(static_cast<std::size_t>(n), g["mean"].get<double>(),
                                              g["std"].get<double>())});
        } catch (const std::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return out;
}

LoadedData load_samples(std::istream& in, InputFormat format, const MetricConfig& metric) {
    switch (format) {
    case InputFormat::curves_csv: return load_curves_csv(in, metric);
    case InputFormat::scores_csv: return load_scores_csv(in);
    case InputFormat::summary_json: return load_summary_json(in);
    }
    throw DomainError("unknown input format");
}

InputFormat detect_format(const std::filesystem::path& path) {
    if (path.extension() == ".json") return InputFormat::summary_json;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = line;
        if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (trim(view).empty()) continue;
        const auto fields = split_csv(view, 1);
        if (fields == std::vector<std::string>{"label", "seed", "step", "value"}) return InputFormat::curves_csv;
        if (fields == std::vector<std::string>{"label", "seed", "score"}) return InputFormat::scores_csv;
        throw ParseError("unrecognized CSV header in '" + path.string() +
                             "' (expected label,seed,step,value or label,seed,score)",
                         1);
    }
    throw ParseError("no records in '" + path.string() + "'");
}

LoadedData load_samples(const std::filesystem::path& path, const MetricConfig& metric) {
    const InputFormat format = detect_format(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return load_samples(in, format, metric);
}

} // namespace seedpower
