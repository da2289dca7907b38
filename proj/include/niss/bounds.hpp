#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "niss/errors.hpp"
#include "niss/target.hpp"

namespace niss {

inline constexpr double kDefaultBoundTol = 1e-9;

/// e_{u,v} = E[chi(U=u) chi(V=v)] = 4 Q(u,v) - 2 Q_U(u) - 2 Q_V(v) + 1,
/// the exact affine re-coordinatization of a target at fixed marginals.
inline CorrelationVector e_from_q(const TargetSpec& t) {
    CorrelationVector e(t.ku, t.kv);
    for (int u = 1; u < t.ku; ++u)
        for (int v = 1; v < t.kv; ++v)
            e.at(u, v) = 4.0 * t.at(u, v) - 2.0 * t.qu[u] - 2.0 * t.qv[v] + 1.0;
    return e;
}

/// Inverse of e_from_q at given marginals; the reserved row u=0 and column
/// v=0 are filled from the marginals. Throws infeasible_error when the
/// implied entries fall outside [-1e-9, 1+1e-9].
inline TargetSpec q_from_e(const CorrelationVector& e, const std::vector<double>& qu,
                           const std::vector<double>& qv) {
    validate_marginal(qu, "row marginal");
    validate_marginal(qv, "column marginal");
    const int ku = static_cast<int>(qu.size());
    const int kv = static_cast<int>(qv.size());
    if (e.ku != ku || e.kv != kv)
        throw shape_error("correlation vector shape does not match the marginals");
    std::vector<double> q(static_cast<std::size_t>(ku) * kv, 0.0);
    auto cell = [&](int u, int v) -> double& { return q[static_cast<std::size_t>(u) * kv + v]; };
    for (int u = 1; u < ku; ++u)
        for (int v = 1; v < kv; ++v)
            cell(u, v) = (e.at(u, v) + 2.0 * qu[static_cast<std::size_t>(u)] +
                          2.0 * qv[static_cast<std::size_t>(v)] - 1.0) /
                         4.0;
    for (int u = 1; u < ku; ++u) {
        double rest = 0;
        for (int v = 1; v < kv; ++v) rest += cell(u, v);
        cell(u, 0) = qu[static_cast<std::size_t>(u)] - rest;
    }
    for (int v = 1; v < kv; ++v) {
        double rest = 0;
        for (int u = 1; u < ku; ++u) rest += cell(u, v);
        cell(0, v) = qv[static_cast<std::size_t>(v)] - rest;
    }
    {
        double rest = 0;
        for (int v = 1; v < kv; ++v) rest += cell(0, v);
        cell(0, 0) = qu[0] - rest;
    }
    for (double v : q)
        if (v < -kDefaultBoundTol || v > 1.0 + kDefaultBoundTol)
            throw infeasible_error("correlation vector is inconsistent with the marginals");
    for (auto& v : q) v = std::min(std::max(v, 0.0), 1.0);
    return TargetSpec::from_matrix(ku, kv, std::move(q));
}

/// e-coordinates of the product coupling Q_U x Q_V:
/// e0_{u,v} = (2 Q_U(u) - 1)(2 Q_V(v) - 1).
inline CorrelationVector base_point(const std::vector<double>& qu, const std::vector<double>& qv) {
    validate_marginal(qu, "row marginal");
    validate_marginal(qv, "column marginal");
    CorrelationVector e(static_cast<int>(qu.size()), static_cast<int>(qv.size()));
    for (int u = 1; u < e.ku; ++u)
        for (int v = 1; v < e.kv; ++v)
            e.at(u, v) = (2.0 * qu[static_cast<std::size_t>(u)] - 1.0) *
                         (2.0 * qv[static_cast<std::size_t>(v)] - 1.0);
    return e;
}

/// Vertex of the inner polytope: couples like the target on A x B and like
/// the product elsewhere. A and B are bitmasks over the non-reserved
/// symbols, bit (u-1) <-> symbol u.
inline CorrelationVector inner_vertex(const TargetSpec& t, std::uint32_t a_mask, std::uint32_t b_mask) {
    if (a_mask >= (std::uint64_t{1} << (t.ku - 1)) || b_mask >= (std::uint64_t{1} << (t.kv - 1)))
        throw argument_error("subset member outside the output alphabet");
    const CorrelationVector coupled = e_from_q(t);
    const CorrelationVector product = base_point(t.qu, t.qv);
    CorrelationVector s(t.ku, t.kv);
    for (int u = 1; u < t.ku; ++u)
        for (int v = 1; v < t.kv; ++v) {
            const bool in = ((a_mask >> (u - 1)) & 1u) && ((b_mask >> (v - 1)) & 1u);
            s.at(u, v) = in ? coupled.at(u, v) : product.at(u, v);
        }
    return s;
}

/// All 2^(ku-1) * 2^(kv-1) vertices s_{A,B}, A-major then B, masks ascending.
/// Duplicates are retained.
inline std::vector<CorrelationVector> inner_polytope(const TargetSpec& t) {
    if ((t.ku - 1) + (t.kv - 1) > 20) throw size_error("vertex count cap exceeded (ku-1 + kv-1 > 20)");
    std::vector<CorrelationVector> verts;
    verts.reserve((std::size_t{1} << (t.ku - 1)) << (t.kv - 1));
    for (std::uint32_t a = 0; a < (1u << (t.ku - 1)); ++a)
        for (std::uint32_t b = 0; b < (1u << (t.kv - 1)); ++b)
            verts.push_back(inner_vertex(t, a, b));
    return verts;
}

namespace detail {

// Phase-1 simplex with Bland's rule: minimizes the sum of artificials for
//   sum_i w_i V[i][j] = p[j],  sum_i w_i = 1,  w >= 0.
// Returns the weights; feasibility is decided by the caller from the
// residual of the reconstructed point.
inline std::vector<double> convex_weights(const std::vector<const double*>& verts, std::size_t dim,
                                          const double* point) {
    const std::size_t nv = verts.size();
    const std::size_t rows = dim + 1;
    const std::size_t cols = nv + rows; // weights then one artificial per row
    // tableau[r][c], last column is the RHS
    std::vector<std::vector<double>> tab(rows, std::vector<double>(cols + 1, 0.0));
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < nv; ++i) tab[j][i] = verts[i][j];
        tab[j][cols] = point[j];
        if (tab[j][cols] < 0.0)
            for (std::size_t c = 0; c <= cols; ++c) tab[j][c] = -tab[j][c];
        tab[j][nv + j] = 1.0;
    }
    for (std::size_t i = 0; i < nv; ++i) tab[dim][i] = 1.0;
    tab[dim][cols] = 1.0;
    tab[dim][nv + dim] = 1.0;

    std::vector<std::size_t> basis(rows);
    for (std::size_t r = 0; r < rows; ++r) basis[r] = nv + r;

    // reduced costs for min sum of artificials: z_c = sum over rows of tab[r][c]
    std::vector<double> cost(cols + 1, 0.0);
    for (std::size_t c = 0; c <= cols; ++c) {
        double s = 0;
        for (std::size_t r = 0; r < rows; ++r) s += tab[r][c];
        cost[c] = s;
    }
    for (std::size_t r = 0; r < rows; ++r) cost[nv + r] = 0.0; // artificials are basic

    const double eps = 1e-11;
    for (std::size_t iter = 0; iter < 20000; ++iter) {
        // Bland: smallest index with positive reduced cost among weight columns
        std::size_t enter = cols;
        for (std::size_t c = 0; c < nv; ++c) {
            bool basic = false;
            for (std::size_t r = 0; r < rows; ++r) basic |= (basis[r] == c);
            if (!basic && cost[c] > eps) {
                enter = c;
                break;
            }
        }
        if (enter == cols) break; // optimal
        std::size_t leave = rows;
        double best = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (tab[r][enter] > eps) {
                const double ratio = tab[r][cols] / tab[r][enter];
                if (leave == rows || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave == rows) break; // unbounded cannot occur here; be safe
        const double piv = tab[leave][enter];
        for (std::size_t c = 0; c <= cols; ++c) tab[leave][c] /= piv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == leave) continue;
            const double factor = tab[r][enter];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= cols; ++c) tab[r][c] -= factor * tab[leave][c];
        }
        const double cf = cost[enter];
        for (std::size_t c = 0; c <= cols; ++c) cost[c] -= cf * tab[leave][c];
        basis[leave] = enter;
    }

    std::vector<double> w(nv, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        if (basis[r] < nv) w[basis[r]] = tab[r][cols];
    return w;
}

} // namespace detail

/// True iff some convex combination of the vertices reproduces p within the
/// sup-norm tolerance. Decided by a phase-1 simplex; the tolerance is
/// applied only to the residual of the reconstructed point.
inline bool polytope_contains(const std::vector<CorrelationVector>& vertices,
                              const CorrelationVector& p, double tol) {
    if (vertices.empty()) throw argument_error("vertex list is empty");
    if (tol < 0.0) throw argument_error("tolerance must be non-negative");
    for (const auto& v : vertices)
        if (!v.same_shape(p)) throw shape_error("vertex shape does not match the query point");
    std::vector<const double*> verts;
    verts.reserve(vertices.size());
    for (const auto& v : vertices) verts.push_back(v.e.data());
    const std::vector<double> w = detail::convex_weights(verts, p.size(), p.e.data());
    double wsum = 0;
    for (double wi : w) {
        if (wi < -1e-9) return false;
        wsum += wi;
    }
    if (std::abs(wsum - 1.0) > 1e-7) return false;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double rec = 0;
        for (std::size_t i = 0; i < w.size(); ++i) rec += w[i] * vertices[i].e[j];
        if (std::abs(rec - p.e[j]) > tol) return false;
    }
    return true;
}

/// The closed-form envelope quantities and the resulting bounds
/// theta- <= t(lambda,-) <= t(lambda,+) <= theta+.
struct BoundReport {
    double theta_phi = 0;
    double theta_rho = 0;
    double theta_rho2_1 = 0;
    double theta_rho2_2 = 0;
    double theta_rho2_3 = 0;
    double theta_minus = 0;
    double theta_plus = 0;
};

inline BoundReport theta_bounds(double rho, const std::vector<double>& qu,
                                const std::vector<double>& qv, const LambdaWeights& lam) {
    if (std::abs(rho) > 1.0) throw range_error("|rho| must not exceed 1");
    validate_marginal(qu, "row marginal");
    validate_marginal(qv, "column marginal");
    const int ku = static_cast<int>(qu.size());
    const int kv = static_cast<int>(qv.size());
    if (lam.ku != ku || lam.kv != kv) throw shape_error("lambda shape does not match the marginals");
    BoundReport r;
    double su = 0, sv = 0;
    for (int u = 1; u < ku; ++u)
        for (int v = 1; v < kv; ++v) {
            const double l = lam.at(u, v);
            const double a = qu[static_cast<std::size_t>(u)];
            const double b = qv[static_cast<std::size_t>(v)];
            r.theta_phi += l * ((2.0 * a - 1.0) * (2.0 * b - 1.0));
            r.theta_rho += l * std::sqrt(a * b);
            r.theta_rho2_1 += l * (a * (1.0 - b));
            r.theta_rho2_2 += l * (a * b);
            su += l * (a * (1.0 - a));
            sv += l * (b * (1.0 - b));
        }
    r.theta_rho2_3 = std::sqrt(su * sv);
    const double arho = std::abs(rho);
    r.theta_plus = r.theta_phi + 2.0 * arho * r.theta_rho +
                   0.5 * rho * rho * (-r.theta_rho + r.theta_rho2_1 + r.theta_rho2_3);
    r.theta_minus = r.theta_phi - 2.0 * arho * r.theta_rho -
                    0.5 * rho * rho * (r.theta_rho2_2 + r.theta_rho2_3);
    return r;
}

/// Binary-output specialization (ku = kv = 2, lambda = [1]); written as
/// straight-line scalars but mirroring theta_bounds' arithmetic exactly, so
/// the two paths agree bit for bit.
inline BoundReport binary_special_case(double rho, double qu1, double qv1) {
    if (!(qu1 > 0.0 && qu1 < 1.0) || !(qv1 > 0.0 && qv1 < 1.0))
        throw range_error("binary marginals must lie in (0,1)");
    if (std::abs(rho) > 1.0) throw range_error("|rho| must not exceed 1");
    BoundReport r;
    r.theta_phi = 1.0 * ((2.0 * qu1 - 1.0) * (2.0 * qv1 - 1.0));
    r.theta_rho = 1.0 * std::sqrt(qu1 * qv1);
    r.theta_rho2_1 = 1.0 * (qu1 * (1.0 - qv1));
    r.theta_rho2_2 = 1.0 * (qu1 * qv1);
    const double su = 1.0 * (qu1 * (1.0 - qu1));
    const double sv = 1.0 * (qv1 * (1.0 - qv1));
    r.theta_rho2_3 = std::sqrt(su * sv);
    const double arho = std::abs(rho);
    r.theta_plus = r.theta_phi + 2.0 * arho * r.theta_rho +
                   0.5 * rho * rho * (-r.theta_rho + r.theta_rho2_1 + r.theta_rho2_3);
    r.theta_minus = r.theta_phi - 2.0 * arho * r.theta_rho -
                    0.5 * rho * rho * (r.theta_rho2_2 + r.theta_rho2_3);
    return r;
}

inline double lambda_score(const LambdaWeights& lam, const CorrelationVector& e) {
    if (lam.ku != e.ku || lam.kv != e.kv) throw shape_error("lambda shape does not match the vector");
    double s = 0;
    for (std::size_t i = 0; i < e.size(); ++i) s += lam.w[i] * e.e[i];
    return s;
}

/// True iff theta- - tol <= sum lambda e <= theta+ + tol.
inline bool outer_check(const CorrelationVector& e, double rho, const std::vector<double>& qu,
                        const std::vector<double>& qv, const LambdaWeights& lam,
                        double tol = kDefaultBoundTol) {
    const BoundReport r = theta_bounds(rho, qu, qv, lam);
    const double score = lambda_score(lam, e);
    return r.theta_minus - tol <= score && score <= r.theta_plus + tol;
}

/// All weight matrices with entries in {0, 1/r, ..., 1} summing to 1 over
/// the (ku-1) x (kv-1) cells; includes every single-entry vertex.
inline std::vector<LambdaWeights> lambda_grid(int ku, int kv, int resolution,
                                              std::size_t cap = 1u << 20) {
    if (ku < 2 || kv < 2) throw shape_error("output alphabets need at least two symbols");
    if (resolution < 1) throw argument_error("grid resolution must be at least 1");
    const int m = (ku - 1) * (kv - 1);
    // count = C(resolution + m - 1, m - 1), with overflow guard against cap
    {
        long double count = 1.0L;
        for (int i = 1; i <= m - 1; ++i) count = count * (resolution + i) / i;
        if (count > static_cast<long double>(cap))
            throw size_error("lambda grid would exceed the configured cap");
    }
    std::vector<LambdaWeights> grid;
    std::vector<double> cur(static_cast<std::size_t>(m), 0.0);
    auto rec = [&](auto&& self, int cell, int left) -> void {
        if (cell == m - 1) {
            cur[static_cast<std::size_t>(cell)] = static_cast<double>(left) / resolution;
            grid.push_back(LambdaWeights::from_matrix(ku, kv, cur));
            return;
        }
        for (int c = left; c >= 0; --c) {
            cur[static_cast<std::size_t>(cell)] = static_cast<double>(c) / resolution;
            self(self, cell + 1, left - c);
        }
    };
    rec(rec, 0, resolution);
    return grid;
}

} // namespace niss
