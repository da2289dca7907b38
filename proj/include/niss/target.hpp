#pragma once

#include <cmath>
#include <vector>

#include "niss/errors.hpp"
#include "niss/source.hpp"

namespace niss {

/// Joint pmf of the output pair (U,V) on {0..ku-1} x {0..kv-1}, row-major,
/// with derived marginals.
struct TargetSpec {
    int ku = 0, kv = 0;
    std::vector<double> q;  // ku*kv, row-major: q[u*kv + v]
    std::vector<double> qu; // length ku
    std::vector<double> qv; // length kv

    double at(int u, int v) const { return q[static_cast<std::size_t>(u) * kv + v]; }
    double& at(int u, int v) { return q[static_cast<std::size_t>(u) * kv + v]; }

    static TargetSpec from_matrix(int ku, int kv, std::vector<double> entries) {
        if (ku < 2 || kv < 2) throw shape_error("output alphabets need at least two symbols");
        if (entries.size() != static_cast<std::size_t>(ku) * kv)
            throw shape_error("target matrix must have ku*kv entries");
        TargetSpec t;
        t.ku = ku;
        t.kv = kv;
        double sum = 0;
        for (auto& v : entries) {
            v = detail::clamp_prob(v, "target pmf");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kPmfSumTol)
            throw invalid_source_error("target pmf entries must sum to 1");
        t.q = std::move(entries);
        t.qu.assign(ku, 0.0);
        t.qv.assign(kv, 0.0);
        for (int u = 0; u < ku; ++u)
            for (int v = 0; v < kv; ++v) {
                t.qu[u] += t.at(u, v);
                t.qv[v] += t.at(u, v);
            }
        return t;
    }
};

inline void validate_marginal(const std::vector<double>& m, const char* what) {
    if (m.size() < 2) throw shape_error(std::string(what) + " needs at least two symbols");
    double sum = 0;
    for (double v : m) {
        if (v < -kPmfNegTol) throw invalid_source_error(std::string(what) + ": negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kPmfSumTol)
        throw invalid_source_error(std::string(what) + " entries must sum to 1");
}

/// e-coordinates of a target: e_{u,v} = E[chi(U=u) chi(V=v)] over the
/// non-reserved symbol pairs (u,v) in {1..ku-1} x {1..kv-1}, row-major.
struct CorrelationVector {
    int ku = 0, kv = 0;
    std::vector<double> e; // (ku-1)*(kv-1), e[(u-1)*(kv-1) + (v-1)]

    CorrelationVector() = default;
    CorrelationVector(int ku_, int kv_) : ku(ku_), kv(kv_) {
        if (ku_ < 2 || kv_ < 2) throw shape_error("output alphabets need at least two symbols");
        e.assign(static_cast<std::size_t>(ku_ - 1) * (kv_ - 1), 0.0);
    }

    double at(int u, int v) const { return e[static_cast<std::size_t>(u - 1) * (kv - 1) + (v - 1)]; }
    double& at(int u, int v) { return e[static_cast<std::size_t>(u - 1) * (kv - 1) + (v - 1)]; }
    std::size_t size() const { return e.size(); }
    bool same_shape(const CorrelationVector& o) const { return ku == o.ku && kv == o.kv; }
};

/// Non-negative hyperplane weights over {1..ku-1} x {1..kv-1}, summing to 1.
struct LambdaWeights {
    int ku = 0, kv = 0;
    std::vector<double> w; // (ku-1)*(kv-1), row-major like CorrelationVector

    double at(int u, int v) const { return w[static_cast<std::size_t>(u - 1) * (kv - 1) + (v - 1)]; }

    static LambdaWeights from_matrix(int ku, int kv, std::vector<double> entries) {
        if (ku < 2 || kv < 2) throw shape_error("output alphabets need at least two symbols");
        if (entries.size() != static_cast<std::size_t>(ku - 1) * (kv - 1))
            throw shape_error("lambda matrix must have (ku-1)*(kv-1) entries");
        double sum = 0;
        for (double v : entries) {
            if (v < 0.0) throw range_error("lambda weights must be non-negative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kPmfSumTol) throw range_error("lambda weights must sum to 1");
        LambdaWeights l;
        l.ku = ku;
        l.kv = kv;
        l.w = std::move(entries);
        return l;
    }
};

} // namespace niss
