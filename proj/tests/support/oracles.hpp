// Test-only oracles, independent of the implementation paths they check:
// quadrature-based moments over hand-written densities and a bisection
// inverse of an erfc-based normal CDF.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "abcmeta/families.hpp"

namespace oracles {

struct PdfSpec {
    std::function<double(double)> pdf;
    double lo;
    double hi;
};

inline PdfSpec density_for(const abcmeta::FamilyParams& p) {
    using abcmeta::Family;
    switch (p.family()) {
        case Family::Normal: {
            const double mu = p.param(0), s = p.param(1);
            return {[mu, s](double x) {
                        const double z = (x - mu) / s;
                        return std::exp(-0.5 * z * z) /
                               (s * std::sqrt(2.0 * M_PI));
                    },
                    mu - 14.0 * s, mu + 14.0 * s};
        }
        case Family::LogNormal: {
            const double mu = p.param(0), s = p.param(1);
            return {[mu, s](double x) {
                        const double z = (std::log(x) - mu) / s;
                        return std::exp(-0.5 * z * z) /
                               (x * s * std::sqrt(2.0 * M_PI));
                    },
                    std::exp(mu - 16.0 * s), std::exp(mu + 16.0 * s)};
        }
        case Family::Weibull: {
            const double k = p.param(0), lam = p.param(1);
            return {[k, lam](double x) {
                        const double t = x / lam;
                        return (k / lam) * std::pow(t, k - 1.0) *
                               std::exp(-std::pow(t, k));
                    },
                    0.0, lam * std::pow(60.0, 1.0 / k)};
        }
        case Family::Beta: {
            const double a = p.param(0), b = p.param(1);
            const double logc = std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b);
            return {[a, b, logc](double x) {
                        return std::exp(logc + (a - 1.0) * std::log(x) +
                                        (b - 1.0) * std::log1p(-x));
                    },
                    0.0, 1.0};
        }
        case Family::Exponential: {
            const double m = p.param(0);
            return {[m](double x) { return std::exp(-x / m) / m; }, 0.0,
                    60.0 * m};
        }
    }
    throw std::logic_error("unreachable");
}

// Mean and SD by tanh-sinh quadrature over the density.
inline abcmeta::Moments moments_by_quadrature(const abcmeta::FamilyParams& p) {
    const PdfSpec spec = density_for(p);
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double m1 = integrator.integrate(
        [&](double x) { return x * spec.pdf(x); }, spec.lo, spec.hi);
    const double m2 = integrator.integrate(
        [&](double x) { return x * x * spec.pdf(x); }, spec.lo, spec.hi);
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Bisection inverse of the erfc-based CDF; slow but simple.
inline double std_normal_quantile_by_bisection(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracles
