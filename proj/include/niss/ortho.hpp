#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "niss/errors.hpp"
#include "niss/fourier.hpp"
#include "niss/source.hpp"
#include "niss/truth_table.hpp"

namespace niss {

/// Canonical subset ordering: ascending bitmasks 0..2^d-1, which lists
/// {}, {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, {1,2,3}, ...
inline std::vector<std::uint32_t> subset_order(int d) {
    if (d < 0 || d > 30) throw argument_error("dimension out of range");
    std::vector<std::uint32_t> order(std::size_t{1} << d);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    return order;
}

/// Orthonormal basis of L2(D_X) built from the parities by Gram-Schmidt in
/// canonical subset order. Entries whose residual norm vanishes are stored
/// as zero tables and flagged trivial; the number of non-trivial entries
/// equals |support(D_X)|.
struct OrthonormalBasis {
    int d = 0;
    std::vector<TruthTable> functions;     // 2^d tables in canonical order
    std::vector<std::uint8_t> trivial_flags;

    int nontrivial_count() const {
        int c = 0;
        for (auto f : trivial_flags) c += (f == 0);
        return c;
    }
};

// Residual norms at or below this are treated as the zero branch of the
// orthogonalization recursion.
inline constexpr double kTrivialNormTol = 1e-9;

/// Gram-Schmidt orthogonalization of the parities under an arbitrary
/// distribution on {-1,+1}^d. Modified update order, with one
/// re-orthogonalization pass for d >= 4 to hold the residual down on
/// near-degenerate measures.
inline OrthonormalBasis gram_schmidt(const GeneralSourceSpec& src) {
    const int d = src.d;
    const std::size_t n = std::size_t{1} << d;
    OrthonormalBasis basis;
    basis.d = d;
    basis.functions.reserve(n);
    basis.trivial_flags.assign(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
        // raw parity phi_{S_i} as a table
        TruthTable cur(d);
        for (std::size_t x = 0; x < n; ++x) {
            double v = 1.0;
            for (int j = 0; j < d; ++j)
                if ((i >> j) & 1u)
                    v *= (point_coordinate(static_cast<std::uint32_t>(x), j) - src.mu[j]) / src.sigma[j];
            cur[x] = v;
        }
        if (i == 0) { // the first orthogonalized parity is the constant 1
            basis.functions.push_back(std::move(cur));
            continue;
        }
        const int passes = (d >= 4) ? 2 : 1;
        for (int pass = 0; pass < passes; ++pass) {
            for (std::size_t j = 0; j < i; ++j) {
                if (basis.trivial_flags[j]) continue;
                const double proj = src.inner(basis.functions[j], cur);
                for (std::size_t x = 0; x < n; ++x) cur[x] -= proj * basis.functions[j][x];
            }
        }
        const double norm = std::sqrt(src.inner(cur, cur));
        if (norm > kTrivialNormTol) {
            for (std::size_t x = 0; x < n; ++x) cur[x] /= norm;
        } else {
            for (std::size_t x = 0; x < n; ++x) cur[x] = 0.0;
            basis.trivial_flags[i] = 1;
        }
        basis.functions.push_back(std::move(cur));
    }
    return basis;
}

/// Expansion coefficients g_S = E[g(X) psi_S(X)] in canonical order;
/// trivial entries carry coefficient 0.
inline std::vector<double> expand(const TruthTable& g, const GeneralSourceSpec& src,
                                  const OrthonormalBasis& basis) {
    if (g.d != src.d || basis.d != src.d) throw shape_error("dimension mismatch");
    std::vector<double> coeffs(basis.functions.size(), 0.0);
    for (std::size_t i = 0; i < basis.functions.size(); ++i) {
        if (basis.trivial_flags[i]) continue;
        coeffs[i] = src.inner(g, basis.functions[i]);
    }
    return coeffs;
}

/// sum_S g_S psi_S; agrees with the expanded function on support(D_X),
/// with no guarantee off-support.
inline TruthTable reconstruct(const std::vector<double>& coeffs, const OrthonormalBasis& basis) {
    if (coeffs.size() != basis.functions.size()) throw shape_error("coefficient count mismatch");
    TruthTable out(basis.d);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0) continue;
        for (std::size_t x = 0; x < out.size(); ++x) out[x] += coeffs[i] * basis.functions[i][x];
    }
    return out;
}

/// Largest off-diagonal / diagonal-deviation of the Gram matrix of the
/// non-trivial basis entries under src; diagnostic for reports.
inline double orthonormality_residual(const OrthonormalBasis& basis, const GeneralSourceSpec& src) {
    double worst = 0.0;
    const std::size_t n = basis.functions.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (basis.trivial_flags[i]) continue;
        for (std::size_t j = i; j < n; ++j) {
            if (basis.trivial_flags[j]) continue;
            const double g = src.inner(basis.functions[i], basis.functions[j]);
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g - target));
        }
    }
    return worst;
}

} // namespace niss
