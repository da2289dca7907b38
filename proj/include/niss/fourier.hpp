#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "niss/errors.hpp"
#include "niss/source.hpp"
#include "niss/truth_table.hpp"

namespace niss {

/// Fourier coefficients of a function on {-1,+1}^d with respect to the
/// product Bernoulli(p) measure. coeffs[mask]: bit j of the mask set iff
/// element j+1 belongs to the subset, so masks in ascending integer order
/// follow the canonical subset order {}, {1}, {2}, {1,2}, {3}, ...
struct FourierSpectrum {
    int d = 0;
    double p = 0.5; // analysis measure, carried to guard against mixing
    std::vector<double> coeffs;

    FourierSpectrum() = default;
    FourierSpectrum(int dim, double param)
        : d(dim), p(param), coeffs(std::size_t{1} << dim, 0.0) {}
};

namespace detail {
inline void check_bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw invalid_source_error("Bernoulli parameter must lie in (0,1)");
}
} // namespace detail

/// Parity phi_S(x) = prod_{j in S} (x_j - mu)/sigma for IID coordinates with
/// common mean mu and standard deviation sigma.
inline double parity(std::uint32_t subset, std::uint32_t point, double mu, double sigma, int d) {
    if (!(sigma > 0.0)) throw invalid_source_error("parity requires sigma > 0");
    if (d < 0 || d > 30 || subset >= (std::uint64_t{1} << d) || point >= (std::uint64_t{1} << d))
        throw argument_error("subset or point index out of range for dimension");
    double v = 1.0;
    for (int j = 0; j < d; ++j)
        if ((subset >> j) & 1u) v *= (point_coordinate(point, j) - mu) / sigma;
    return v;
}

/// Mean and standard deviation of a {-1,+1} letter with P(+1) = p.
inline double bernoulli_mean(double p) { return 2.0 * p - 1.0; }
inline double bernoulli_sigma(double p) { return 2.0 * std::sqrt(p * (1.0 - p)); }

/// Fourier coefficients f_S = E[f(X^d) phi_S(X^d)] under Bernoulli(p)^d.
/// Direct O(4^d) evaluation; adequate at the intended scale.
inline FourierSpectrum analyze(const TruthTable& f, double p) {
    detail::check_bernoulli(p);
    const int d = f.d;
    const std::size_t n = f.size();
    const double mu = bernoulli_mean(p);
    const double sigma = bernoulli_sigma(p);
    FourierSpectrum spec(d, p);
    std::vector<double> w(n);
    for (std::size_t x = 0; x < n; ++x) w[x] = product_point_prob(static_cast<std::uint32_t>(x), d, p);
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0;
        for (std::size_t x = 0; x < n; ++x)
            acc += w[x] * f[x] * parity(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(x), mu, sigma, d);
        spec.coeffs[s] = acc;
    }
    return spec;
}

/// Pointwise synthesis f(x) = sum_S f_S phi_S(x); exact inverse of analyze.
/// p must match the spectrum's analysis measure.
inline TruthTable synthesize(const FourierSpectrum& spec, double p) {
    detail::check_bernoulli(p);
    if (std::abs(p - spec.p) > 1e-12)
        throw invalid_source_error("spectrum was analyzed under a different Bernoulli parameter");
    const int d = spec.d;
    const std::size_t n = spec.coeffs.size();
    const double mu = bernoulli_mean(p);
    const double sigma = bernoulli_sigma(p);
    TruthTable f(d);
    for (std::size_t x = 0; x < n; ++x) {
        double acc = 0;
        for (std::size_t s = 0; s < n; ++s)
            acc += spec.coeffs[s] * parity(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(x), mu, sigma, d);
        f[x] = acc;
    }
    return f;
}

inline TruthTable synthesize(const FourierSpectrum& spec) { return synthesize(spec, spec.p); }

/// E[f(X^d) g(Y^d)] = sum_S f_S g_S rho^|S| for a memoryless pair source
/// with per-letter Pearson correlation rho; fs must be analyzed under the
/// X marginal and gs under the Y marginal.
inline double cross_correlation(const FourierSpectrum& fs, const FourierSpectrum& gs, double rho) {
    if (fs.d != gs.d) throw shape_error("spectra have different dimensions");
    if (std::abs(rho) > 1.0 + 1e-12) throw range_error("|rho| must not exceed 1");
    double acc = 0;
    for (std::size_t s = 0; s < fs.coeffs.size(); ++s) {
        const int card = std::popcount(s);
        acc += fs.coeffs[s] * gs.coeffs[s] * std::pow(rho, card);
    }
    return acc;
}

/// P(f != g) = (1 - E[fg]) / 2 for sign-valued f, g.
inline double disagreement_probability(double efg) {
    if (efg < -1.0 - 1e-9 || efg > 1.0 + 1e-9)
        throw range_error("correlation must lie in [-1,1]");
    return (1.0 - efg) / 2.0;
}

} // namespace niss
