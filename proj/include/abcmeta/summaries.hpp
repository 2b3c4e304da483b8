#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abcmeta {

enum class Stat { Min, Q1, Median, Q3, Max, Mean, Sd };

// Canonical field order used by summary vectors and the text format.
inline constexpr std::array<Stat, 7> kStatOrder = {
    Stat::Min, Stat::Q1, Stat::Median, Stat::Q3,
    Stat::Max, Stat::Mean, Stat::Sd};

inline std::string_view stat_name(Stat s) {
    switch (s) {
        case Stat::Min: return "min";
        case Stat::Q1: return "q1";
        case Stat::Median: return "median";
        case Stat::Q3: return "q3";
        case Stat::Max: return "max";
        case Stat::Mean: return "mean";
        case Stat::Sd: return "sd";
    }
    return "?";
}

inline Stat parse_stat(std::string_view s) {
    for (Stat st : kStatOrder)
        if (s == stat_name(st)) return st;
    throw std::invalid_argument("unknown statistic '" + std::string(s) + "'");
}

/// Which summary statistics are assumed reported.
/// S1 = {min, median, max}; S2 = {min, q1, median, q3, max};
/// S3 = {q1, median, q3}; Custom names any subset. n is always present.
class SummaryScenario {
  public:
    static SummaryScenario s1() {
        return {"S1", {Stat::Min, Stat::Median, Stat::Max}};
    }
    static SummaryScenario s2() {
        return {"S2", {Stat::Min, Stat::Q1, Stat::Median, Stat::Q3, Stat::Max}};
    }
    static SummaryScenario s3() {
        return {"S3", {Stat::Q1, Stat::Median, Stat::Q3}};
    }
    static SummaryScenario custom(std::vector<Stat> fields) {
        std::vector<Stat> ordered;
        for (Stat s : kStatOrder)
            if (std::find(fields.begin(), fields.end(), s) != fields.end())
                ordered.push_back(s);
        if (ordered.size() != fields.size())
            throw std::invalid_argument("custom scenario: duplicate fields");
        bool has_location = false;
        for (Stat s : ordered)
            if (s != Stat::Sd) has_location = true;
        if (!has_location)
            throw std::invalid_argument(
                "custom scenario needs at least one location statistic");
        return {"custom", std::move(ordered)};
    }

    static SummaryScenario parse(std::string_view name) {
        if (name == "S1" || name == "s1") return s1();
        if (name == "S2" || name == "s2") return s2();
        if (name == "S3" || name == "s3") return s3();
        throw std::invalid_argument("unknown scenario '" + std::string(name) +
                                    "' (valid: S1, S2, S3)");
    }

    const std::string& name() const { return name_; }
    const std::vector<Stat>& fields() const { return fields_; }
    bool has(Stat s) const {
        return std::find(fields_.begin(), fields_.end(), s) != fields_.end();
    }
    bool operator==(const SummaryScenario& o) const {
        return fields_ == o.fields_;
    }

  private:
    SummaryScenario(std::string name, std::vector<Stat> fields)
        : name_(std::move(name)), fields_(std::move(fields)) {}

    std::string name_;
    std::vector<Stat> fields_;
};

/// Reported summary statistics for one study.
struct SummaryStats {
    SummaryScenario scenario;
    std::int64_t n = 0;
    std::map<Stat, double> values;

    double at(Stat s) const {
        auto it = values.find(s);
        if (it == values.end())
            throw std::out_of_range(std::string("statistic '") +
                                    std::string(stat_name(s)) +
                                    "' not present");
        return it->second;
    }

    bool has(Stat s) const { return values.count(s) > 0; }

    // Throws naming the offending fields on an ordering violation.
    void validate() const {
        if (n < 2) throw std::invalid_argument("n must be >= 2");
        for (Stat s : scenario.fields())
            if (!values.count(s))
                throw std::invalid_argument(std::string("missing statistic '") +
                                            std::string(stat_name(s)) + "'");
        for (auto& [s, v] : values)
            if (!std::isfinite(v))
                throw std::invalid_argument(std::string("non-finite value for ") +
                                            std::string(stat_name(s)));
        const std::array<Stat, 5> order = {Stat::Min, Stat::Q1, Stat::Median,
                                           Stat::Q3, Stat::Max};
        const Stat* prev = nullptr;
        for (const Stat& s : order) {
            if (!values.count(s)) continue;
            if (prev && values.at(*prev) > values.at(s))
                throw std::invalid_argument(
                    std::string("ordering violation: ") +
                    std::string(stat_name(*prev)) + " > " +
                    std::string(stat_name(s)));
            prev = &s;
        }
        if (values.count(Stat::Mean)) {
            double m = values.at(Stat::Mean);
            if (values.count(Stat::Min) && m < values.at(Stat::Min))
                throw std::invalid_argument("ordering violation: mean < min");
            if (values.count(Stat::Max) && m > values.at(Stat::Max))
                throw std::invalid_argument("ordering violation: mean > max");
        }
    }
};

namespace detail {

// Quantile by linear interpolation of order statistics at h = (n-1)p + 1
// (R default, type 7). Input must be sorted.
inline double quantile_sorted(const std::vector<double>& x, double p) {
    const std::size_t n = x.size();
    const double h = (static_cast<double>(n) - 1.0) * p;
    const double fl = std::floor(h);
    const std::size_t lo = static_cast<std::size_t>(fl);
    if (lo + 1 >= n) return x[n - 1];
    return x[lo] + (h - fl) * (x[lo + 1] - x[lo]);
}

inline double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) /
           static_cast<double>(x.size());
}

// Sample SD with the n-1 denominator.
inline double sd_of(const std::vector<double>& x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(x.size()) - 1.0));
}

}  // namespace detail

/// Computes the scenario's statistics from raw data. Sorts a copy.
inline SummaryStats compute_summary(std::vector<double> data,
                                    const SummaryScenario& scenario) {
    if (data.size() < 2)
        throw std::invalid_argument("compute_summary: need at least 2 points");
    SummaryStats out{scenario, static_cast<std::int64_t>(data.size()), {}};
    double mean = 0.0;
    if (scenario.has(Stat::Mean) || scenario.has(Stat::Sd))
        mean = detail::mean_of(data);
    bool needs_order = false;
    for (Stat s : scenario.fields())
        if (s != Stat::Mean && s != Stat::Sd) needs_order = true;
    if (needs_order) std::sort(data.begin(), data.end());
    for (Stat s : scenario.fields()) {
        switch (s) {
            case Stat::Min: out.values[s] = data.front(); break;
            case Stat::Q1: out.values[s] = detail::quantile_sorted(data, 0.25); break;
            case Stat::Median: out.values[s] = detail::quantile_sorted(data, 0.5); break;
            case Stat::Q3: out.values[s] = detail::quantile_sorted(data, 0.75); break;
            case Stat::Max: out.values[s] = data.back(); break;
            case Stat::Mean: out.values[s] = mean; break;
            case Stat::Sd: out.values[s] = detail::sd_of(data, mean); break;
        }
    }
    return out;
}

/// Fields in canonical order; n is excluded (observed and pseudo data share it).
inline std::vector<double> summary_vector(const SummaryStats& s) {
    std::vector<double> v;
    v.reserve(s.values.size());
    for (Stat st : kStatOrder)
        if (s.has(st)) v.push_back(s.at(st));
    return v;
}

/// Euclidean distance on raw summary scales.
inline double distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("distance: length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

/// One-record text format: `scenario=S3 n=111 q1=1.2 median=2.1 q3=4.6`.
inline SummaryStats parse_stats_record(const std::string& line) {
    std::istringstream iss(line);
    std::string tok;
    std::string scenario_name;
    std::int64_t n = -1;
    std::map<Stat, double> values;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad token '" + tok +
                                        "' (expected key=value)");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "scenario") {
            scenario_name = val;
        } else if (key == "n") {
            n = std::stoll(val);
        } else {
            values[parse_stat(key)] = std::stod(val);
        }
    }
    if (n < 0) throw std::invalid_argument("missing n");
    SummaryScenario scenario = [&] {
        if (scenario_name.empty() || scenario_name == "custom") {
            std::vector<Stat> fields;
            for (auto& [s, v] : values) fields.push_back(s);
            return SummaryScenario::custom(std::move(fields));
        }
        return SummaryScenario::parse(scenario_name);
    }();
    SummaryStats stats{scenario, n, std::move(values)};
    stats.validate();
    return stats;
}

inline std::string format_stats_record(const SummaryStats& s) {
    std::ostringstream oss;
    oss << "scenario=" << s.scenario.name() << " n=" << s.n;
    oss.precision(17);
    for (Stat st : kStatOrder)
        if (s.has(st)) oss << " " << stat_name(st) << "=" << s.at(st);
    return oss.str();
}

}  // namespace abcmeta
