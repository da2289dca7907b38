#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "niss/errors.hpp"
#include "niss/truth_table.hpp"

namespace niss {

inline constexpr double kPmfSumTol = 1e-12;
inline constexpr double kPmfNegTol = 1e-15; // entries above -this are clamped to 0

namespace detail {
inline double clamp_prob(double p, const char* what) {
    if (p < 0.0) {
        if (p < -kPmfNegTol) throw invalid_source_error(std::string(what) + ": negative probability");
        return 0.0;
    }
    return p;
}
} // namespace detail

/// Joint pmf of a single letter pair (X,Y) on {-1,+1}^2 with derived moments.
/// pmf[ix][iy]: index 0 <-> -1, index 1 <-> +1.
struct BinarySourceSpec {
    std::array<std::array<double, 2>, 2> pmf{};
    double mu_x = 0, mu_y = 0;
    double sigma_x = 0, sigma_y = 0;
    double rho = 0;

    double px() const { return pmf[1][0] + pmf[1][1]; } // P(X=+1)
    double py() const { return pmf[0][1] + pmf[1][1]; } // P(Y=+1)

    static BinarySourceSpec from_pmf(const std::array<std::array<double, 2>, 2>& p) {
        BinarySourceSpec s;
        double sum = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                s.pmf[i][j] = detail::clamp_prob(p[i][j], "source pmf");
                sum += s.pmf[i][j];
            }
        if (std::abs(sum - 1.0) > kPmfSumTol)
            throw invalid_source_error("source pmf entries must sum to 1");
        const double xs[2] = {-1.0, 1.0};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                s.mu_x += s.pmf[i][j] * xs[i];
                s.mu_y += s.pmf[i][j] * xs[j];
            }
        double vx = 0, vy = 0, exy = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                vx += s.pmf[i][j] * (xs[i] - s.mu_x) * (xs[i] - s.mu_x);
                vy += s.pmf[i][j] * (xs[j] - s.mu_y) * (xs[j] - s.mu_y);
                exy += s.pmf[i][j] * (xs[i] - s.mu_x) * (xs[j] - s.mu_y);
            }
        s.sigma_x = std::sqrt(vx);
        s.sigma_y = std::sqrt(vy);
        if (!(s.sigma_x > 0.0) || !(s.sigma_y > 0.0))
            throw invalid_source_error("degenerate marginal: sigma must be positive");
        s.rho = exy / (s.sigma_x * s.sigma_y);
        return s;
    }

    /// Doubly symmetric binary source: uniform marginals, P(X != Y) = eps,
    /// rho = 1 - 2*eps.
    static BinarySourceSpec dsbs(double eps) {
        if (!(eps >= 0.0 && eps <= 1.0)) throw range_error("dsbs crossover must lie in [0,1]");
        return from_pmf({{{(1 - eps) / 2, eps / 2}, {eps / 2, (1 - eps) / 2}}});
    }
};

inline double pearson_rho(const BinarySourceSpec& src) { return src.rho; }

/// Probability of the point x under the d-fold product of a Bernoulli
/// marginal with P(+1) = p.
inline double product_point_prob(std::uint32_t x, int d, double p) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) w *= ((x >> j) & 1u) ? p : (1.0 - p);
    return w;
}

/// Pairwise weights W(x,y) = prod_i P(x_i, y_i) for all 4^d index pairs,
/// laid out as W[x * 2^d + y].
inline std::vector<double> product_pair_weights(const BinarySourceSpec& src, int d) {
    if (d < 0 || d > 15) throw argument_error("pair-weight dimension out of range");
    const std::size_t n = std::size_t{1} << d;
    std::vector<double> w(n * n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            double v = 1.0;
            for (int j = 0; j < d; ++j)
                v *= src.pmf[(x >> j) & 1u][(y >> j) & 1u];
            w[x * n + y] = v;
        }
    return w;
}

/// Arbitrary (correlated) distribution on {-1,+1}^d with per-coordinate
/// moments, as used by the orthogonalization machinery.
struct GeneralSourceSpec {
    int d = 0;
    std::vector<double> pmf;   // size 2^d, same point indexing as TruthTable
    std::vector<double> mu;    // per-coordinate means
    std::vector<double> sigma; // per-coordinate standard deviations

    static GeneralSourceSpec from_pmf(int d, std::vector<double> p) {
        if (d < 0 || d > 20) throw argument_error("source dimension out of range");
        const std::size_t n = std::size_t{1} << d;
        if (p.size() != n) throw shape_error("pmf length must be 2^d");
        GeneralSourceSpec s;
        s.d = d;
        double sum = 0;
        for (auto& v : p) {
            v = detail::clamp_prob(v, "source pmf");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kPmfSumTol)
            throw invalid_source_error("source pmf entries must sum to 1");
        s.pmf = std::move(p);
        s.mu.assign(d, 0.0);
        s.sigma.assign(d, 0.0);
        for (int j = 0; j < d; ++j) {
            double m = 0;
            for (std::size_t x = 0; x < n; ++x) m += s.pmf[x] * point_coordinate(static_cast<std::uint32_t>(x), j);
            double var = 0;
            for (std::size_t x = 0; x < n; ++x) {
                const double c = point_coordinate(static_cast<std::uint32_t>(x), j) - m;
                var += s.pmf[x] * c * c;
            }
            s.mu[j] = m;
            s.sigma[j] = std::sqrt(var);
            if (!(s.sigma[j] > 0.0))
                throw invalid_source_error("coordinate " + std::to_string(j + 1) + " is degenerate");
        }
        return s;
    }

    /// d-fold product of Bernoulli(p) marginals on {-1,+1}.
    static GeneralSourceSpec product(int d, double p) {
        if (!(p > 0.0 && p < 1.0)) throw invalid_source_error("Bernoulli parameter must lie in (0,1)");
        const std::size_t n = std::size_t{1} << d;
        std::vector<double> pm(n);
        for (std::size_t x = 0; x < n; ++x) pm[x] = product_point_prob(static_cast<std::uint32_t>(x), d, p);
        return from_pmf(d, std::move(pm));
    }

    int support_size() const {
        int c = 0;
        for (double v : pmf) c += (v > 0.0);
        return c;
    }

    /// Inner product under this measure, <f,g> = sum_x pmf(x) f(x) g(x).
    double inner(const TruthTable& f, const TruthTable& g) const {
        double s = 0;
        for (std::size_t x = 0; x < pmf.size(); ++x) s += pmf[x] * f[x] * g[x];
        return s;
    }
};

} // namespace niss
