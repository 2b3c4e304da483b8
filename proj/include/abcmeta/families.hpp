#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abcmeta {

enum class Family { Normal, LogNormal, Weibull, Beta, Exponential };

inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::Normal, Family::LogNormal, Family::Weibull, Family::Beta,
    Family::Exponential};

inline constexpr std::size_t param_count(Family f) {
    return f == Family::Exponential ? 1 : 2;
}

inline std::string_view family_name(Family f) {
    switch (f) {
        case Family::Normal: return "normal";
        case Family::LogNormal: return "lognormal";
        case Family::Weibull: return "weibull";
        case Family::Beta: return "beta";
        case Family::Exponential: return "exponential";
    }
    return "?";
}

inline Family parse_family(std::string_view s) {
    for (Family f : kAllFamilies)
        if (s == family_name(f)) return f;
    throw std::invalid_argument("unknown family '" + std::string(s) +
                                "' (valid: normal, lognormal, weibull, beta, "
                                "exponential)");
}

/// One candidate distribution with concrete parameter values.
/// Parameterizations: Normal(mu, sigma), LogNormal(mu, sigma) on the log
/// scale, Weibull(shape, scale), Beta(alpha, beta), Exponential(mean).
class FamilyParams {
  public:
    FamilyParams(Family family, std::vector<double> params)
        : family_(family), params_(std::move(params)) {
        validate();
    }

    static FamilyParams normal(double mu, double sigma) {
        return {Family::Normal, {mu, sigma}};
    }
    static FamilyParams lognormal(double mu, double sigma) {
        return {Family::LogNormal, {mu, sigma}};
    }
    static FamilyParams weibull(double shape, double scale) {
        return {Family::Weibull, {shape, scale}};
    }
    static FamilyParams beta(double alpha, double beta) {
        return {Family::Beta, {alpha, beta}};
    }
    static FamilyParams exponential(double mean) {
        return {Family::Exponential, {mean}};
    }

    Family family() const { return family_; }
    std::span<const double> params() const { return params_; }
    double param(std::size_t i) const { return params_.at(i); }

  private:
    void validate() const {
        if (params_.size() != param_count(family_))
            throw std::invalid_argument(
                std::string(family_name(family_)) + " takes " +
                std::to_string(param_count(family_)) + " parameter(s), got " +
                std::to_string(params_.size()));
        for (double p : params_)
            if (!std::isfinite(p))
                throw std::invalid_argument("non-finite distribution parameter");
        auto require_positive = [&](std::size_t i, const char* name) {
            if (params_[i] <= 0.0)
                throw std::invalid_argument(
                    std::string(family_name(family_)) + ": " + name +
                    " must be > 0, got " + std::to_string(params_[i]));
        };
        switch (family_) {
            case Family::Normal: require_positive(1, "sigma"); break;
            case Family::LogNormal: require_positive(1, "sigma"); break;
            case Family::Weibull:
                require_positive(0, "shape");
                require_positive(1, "scale");
                break;
            case Family::Beta:
                require_positive(0, "alpha");
                require_positive(1, "beta");
                break;
            case Family::Exponential: require_positive(0, "mean"); break;
        }
    }

    Family family_;
    std::vector<double> params_;
};

struct Moments {
    double mean;
    double sd;
};

/// Closed-form mean and standard deviation of a family at given parameters.
inline Moments analytic_moments(const FamilyParams& p) {
    switch (p.family()) {
        case Family::Normal:
            return {p.param(0), p.param(1)};
        case Family::LogNormal: {
            const double mu = p.param(0), s = p.param(1);
            const double mean = std::exp(mu + 0.5 * s * s);
            return {mean, mean * std::sqrt(std::expm1(s * s))};
        }
        case Family::Weibull: {
            const double k = p.param(0), lam = p.param(1);
            const double g1 = std::tgamma(1.0 + 1.0 / k);
            const double g2 = std::tgamma(1.0 + 2.0 / k);
            return {lam * g1, lam * std::sqrt(std::max(0.0, g2 - g1 * g1))};
        }
        case Family::Beta: {
            const double a = p.param(0), b = p.param(1);
            const double s = a + b;
            return {a / s, std::sqrt(a * b / (s * s * (s + 1.0)))};
        }
        case Family::Exponential:
            return {p.param(0), p.param(0)};
    }
    throw std::logic_error("unreachable");
}

/// Appends n independent draws to out (out is cleared first).
inline void sample_n(const FamilyParams& p, std::size_t n,
                     std::mt19937_64& rng, std::vector<double>& out) {
    if (n < 2) throw std::invalid_argument("sample_n: n must be >= 2");
    out.clear();
    out.reserve(n);
    switch (p.family()) {
        case Family::Normal: {
            std::normal_distribution<double> d(p.param(0), p.param(1));
            for (std::size_t i = 0; i < n; ++i) out.push_back(d(rng));
            break;
        }
        case Family::LogNormal: {
            std::lognormal_distribution<double> d(p.param(0), p.param(1));
            for (std::size_t i = 0; i < n; ++i) out.push_back(d(rng));
            break;
        }
        case Family::Weibull: {
            std::weibull_distribution<double> d(p.param(0), p.param(1));
            for (std::size_t i = 0; i < n; ++i) out.push_back(d(rng));
            break;
        }
        case Family::Beta: {
            std::gamma_distribution<double> ga(p.param(0), 1.0);
            std::gamma_distribution<double> gb(p.param(1), 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = ga(rng), y = gb(rng);
                out.push_back(x / (x + y));
            }
            break;
        }
        case Family::Exponential: {
            std::exponential_distribution<double> d(1.0 / p.param(0));
            for (std::size_t i = 0; i < n; ++i) out.push_back(d(rng));
            break;
        }
    }
}

inline std::vector<double> sample_n(const FamilyParams& p, std::size_t n,
                                    std::mt19937_64& rng) {
    std::vector<double> out;
    sample_n(p, n, rng, out);
    return out;
}

}  // namespace abcmeta
