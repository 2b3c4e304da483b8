#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcmeta/families.hpp"
#include "abcmeta/summaries.hpp"

namespace abcmeta {

struct Interval {
    double lo;
    double hi;
};

// Lower-bound floor for scale/shape parameters; stands in for U(0, b).
inline constexpr double kPositivityFloor = 1e-6;

// Knobs for the data-driven default priors. The location window extends the
// quartiles by kLocExtension*IQR when no min/max are reported; scale priors
// are deliberately vague (the normal sigma window never drops below
// kNormalSigmaFloor, mirroring typical published prior choices on
// unit-interval data).
inline constexpr double kLocExtension = 1.7;
inline constexpr double kNormalSigmaFloor = 1.0;
inline constexpr double kLogSigmaFloor = 2.0;
inline constexpr double kWeibullScaleMult = 6.0;
inline constexpr double kExponentialMeanMult = 3.0;

namespace detail {

// Which parameters of a family must stay strictly positive.
inline bool param_requires_positive(Family f, std::size_t i) {
    switch (f) {
        case Family::Normal: return i == 1;
        case Family::LogNormal: return i == 1;
        case Family::Weibull: return true;
        case Family::Beta: return true;
        case Family::Exponential: return true;
    }
    return false;
}

// Location window shared by default_priors and the sensitivity protocol:
// the reported extremes when available, otherwise quartiles extended by
// kLocExtension * IQR, otherwise a crude window around the median.
inline Interval location_window(const SummaryStats& stats) {
    const bool has_q = stats.has(Stat::Q1) && stats.has(Stat::Q3);
    const bool has_range = stats.has(Stat::Min) && stats.has(Stat::Max);
    if (has_range) return {stats.at(Stat::Min), stats.at(Stat::Max)};
    if (has_q) {
        const double q1 = stats.at(Stat::Q1), q3 = stats.at(Stat::Q3);
        const double iqr = q3 - q1;
        return {q1 - kLocExtension * iqr, q3 + kLocExtension * iqr};
    }
    if (stats.has(Stat::Median)) {
        const double m = stats.at(Stat::Median);
        const double w = 3.0 * std::max(std::abs(m), 1.0);
        return {m - w, m + w};
    }
    throw std::invalid_argument(
        "default_priors: need min/max, quartiles, or a median");
}

}  // namespace detail

/// Per-family uniform prior intervals plus the initial model-weight vector.
class PriorBank {
  public:
    void set(Family f, std::vector<Interval> intervals) {
        if (intervals.size() != param_count(f))
            throw std::invalid_argument(
                std::string(family_name(f)) + " prior needs " +
                std::to_string(param_count(f)) + " interval(s)");
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            const auto& iv = intervals[i];
            if (!(iv.lo < iv.hi))
                throw std::invalid_argument(
                    std::string(family_name(f)) + " prior interval " +
                    std::to_string(i) + ": lower must be < upper");
            if (detail::param_requires_positive(f, i) && iv.lo <= 0.0)
                throw std::invalid_argument(
                    std::string(family_name(f)) + " prior interval " +
                    std::to_string(i) +
                    ": lower bound must be > 0 for a scale/shape parameter");
        }
        intervals_[f] = std::move(intervals);
    }

    bool has(Family f) const { return intervals_.count(f) > 0; }

    const std::vector<Interval>& intervals(Family f) const {
        auto it = intervals_.find(f);
        if (it == intervals_.end())
            throw std::invalid_argument(std::string("family '") +
                                        std::string(family_name(f)) +
                                        "' not active in prior bank");
        return it->second;
    }

    std::vector<Family> active_families() const {
        std::vector<Family> out;
        for (Family f : kAllFamilies)
            if (has(f)) out.push_back(f);
        return out;
    }

    void set_initial_weights(std::vector<double> w) {
        const std::size_t k = active_families().size();
        if (w.size() != k)
            throw std::invalid_argument("weight vector size mismatch");
        double sum = 0.0;
        for (double x : w) {
            if (!(x > 0.0))
                throw std::invalid_argument("model weights must be > 0");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("model weights must sum to 1");
        weights_ = std::move(w);
    }

    // Uniform over the active families when no explicit weights were set.
    std::vector<double> initial_weights() const {
        if (!weights_.empty()) return weights_;
        const std::size_t k = active_families().size();
        return std::vector<double>(k, 1.0 / static_cast<double>(k));
    }

    std::vector<std::string>& warnings() { return warnings_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    std::map<Family, std::vector<Interval>> intervals_;
    std::vector<double> weights_;
    std::vector<std::string> warnings_;
};

/// One draw from the family's uniform priors.
inline FamilyParams draw_params(const PriorBank& prior, Family f,
                                std::mt19937_64& rng) {
    const auto& ivs = prior.intervals(f);
    std::vector<double> params;
    params.reserve(ivs.size());
    for (const auto& iv : ivs) {
        std::uniform_real_distribution<double> u(iv.lo, iv.hi);
        params.push_back(u(rng));
    }
    return {f, std::move(params)};
}

/// Data-driven default priors. Deterministic in the stats; families whose
/// support cannot cover the reported statistics are dropped with a warning.
inline PriorBank default_priors(const SummaryStats& stats,
                                const std::vector<Family>& families) {
    stats.validate();
    PriorBank bank;

    const bool has_q = stats.has(Stat::Q1) && stats.has(Stat::Q3);
    const bool has_range = stats.has(Stat::Min) && stats.has(Stat::Max);

    bool any_nonpositive = false;
    bool in_unit_interval = true;
    for (auto& [s, v] : stats.values) {
        if (v <= 0.0) any_nonpositive = true;
        if (v < 0.0 || v > 1.0) in_unit_interval = false;
    }

    Interval loc = detail::location_window(stats);
    if (!(loc.lo < loc.hi)) loc = {loc.lo - 1.0, loc.hi + 1.0};
    const double span = loc.hi - loc.lo;

    // log-scale window for the lognormal location, built the same way
    // the raw-scale window is.
    auto log_window = [&]() -> Interval {
        if (has_range)
            return {std::log(stats.at(Stat::Min)),
                    std::log(stats.at(Stat::Max))};
        if (has_q) {
            const double lq1 = std::log(stats.at(Stat::Q1));
            const double lq3 = std::log(stats.at(Stat::Q3));
            const double lq = lq3 - lq1;
            return {lq1 - lq, lq3 + lq};
        }
        const double lm = std::log(stats.at(Stat::Median));
        return {lm - 2.0, lm + 2.0};
    };

    for (Family f : families) {
        const bool needs_positive_support = f == Family::LogNormal ||
                                            f == Family::Weibull ||
                                            f == Family::Exponential;
        if (needs_positive_support && any_nonpositive) {
            bank.warnings().push_back(
                std::string(family_name(f)) +
                " dropped: requires positive support but a reported "
                "statistic is <= 0");
            continue;
        }
        switch (f) {
            case Family::Normal: {
                const double sig_hi =
                    std::max(0.5 * span, kNormalSigmaFloor);
                bank.set(f, {loc, {kPositivityFloor, sig_hi}});
                break;
            }
            case Family::LogNormal: {
                Interval mu = log_window();
                if (!(mu.lo < mu.hi)) mu = {mu.lo - 1.0, mu.hi + 1.0};
                const double hi =
                    std::max(kLogSigmaFloor, 0.5 * (mu.hi - mu.lo));
                bank.set(f, {mu, {kPositivityFloor, hi}});
                break;
            }
            case Family::Weibull: {
                bank.set(f, {{0.1, 10.0},
                             {kPositivityFloor, kWeibullScaleMult * loc.hi}});
                break;
            }
            case Family::Beta: {
                if (!in_unit_interval)
                    bank.warnings().push_back(
                        "beta retained but statistics fall outside [0,1]; "
                        "its pseudo-data cannot match unless data are "
                        "rescaled");
                bank.set(f, {{kPositivityFloor, 40.0},
                             {kPositivityFloor, 40.0}});
                break;
            }
            case Family::Exponential: {
                bank.set(f,
                         {{kPositivityFloor,
                           kExponentialMeanMult * loc.hi}});
                break;
            }
        }
    }
    return bank;
}

/// Affine rescaling of bounded-data statistics onto [0,1] (and back), for
/// running the beta candidate on data reported on a known scale.
inline SummaryStats rescale_stats_to_unit(const SummaryStats& stats, double lo,
                                          double hi) {
    if (!(lo < hi)) throw std::invalid_argument("rescale: need lo < hi");
    SummaryStats out = stats;
    const double w = hi - lo;
    for (auto& [s, v] : out.values)
        v = (s == Stat::Sd) ? v / w : (v - lo) / w;
    return out;
}

inline Moments rescale_moments_from_unit(const Moments& m, double lo,
                                         double hi) {
    const double w = hi - lo;
    return {lo + m.mean * w, m.sd * w};
}

/// Plain-text serialization: one family per line,
/// `normal [1.2,4.6] [1e-06,6.8]`. Lines starting with '#' are skipped.
inline void write_prior_bank(std::ostream& os, const PriorBank& bank) {
    os.precision(17);
    for (Family f : bank.active_families()) {
        os << family_name(f);
        for (const auto& iv : bank.intervals(f))
            os << " [" << iv.lo << "," << iv.hi << "]";
        os << "\n";
    }
}

inline PriorBank read_prior_bank(std::istream& is) {
    PriorBank bank;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        std::string fam;
        iss >> fam;
        Family f = parse_family(fam);
        std::vector<Interval> ivs;
        std::string tok;
        while (iss >> tok) {
            if (tok.size() < 5 || tok.front() != '[' || tok.back() != ']')
                throw std::invalid_argument("bad interval token '" + tok + "'");
            auto comma = tok.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("bad interval token '" + tok + "'");
            ivs.push_back({std::stod(tok.substr(1, comma - 1)),
                           std::stod(tok.substr(comma + 1,
                                                tok.size() - comma - 2))});
        }
        bank.set(f, std::move(ivs));
    }
    return bank;
}

}  // namespace abcmeta
