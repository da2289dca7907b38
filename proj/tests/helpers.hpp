#pragma once

#include <random>

#include "niss/niss.hpp"

namespace niss::testing {

inline BinarySourceSpec random_source(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::array<std::array<double, 2>, 2> p{};
    double sum = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            p[i][j] = dist(rng);
            sum += p[i][j];
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) p[i][j] /= sum;
    return BinarySourceSpec::from_pmf(p);
}

inline TruthTable random_table(std::mt19937& rng, int d, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    TruthTable t(d);
    for (auto& v : t.values) v = dist(rng);
    return t;
}

inline TruthTable random_symbol_table(std::mt19937& rng, int d, int k) {
    std::uniform_int_distribution<int> dist(0, k - 1);
    TruthTable t(d);
    for (auto& v : t.values) v = static_cast<double>(dist(rng));
    return t;
}

inline GeneralSourceSpec random_full_support_pmf(std::mt19937& rng, int d) {
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::vector<double> p(std::size_t{1} << d);
    double sum = 0;
    for (auto& v : p) {
        v = dist(rng);
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return GeneralSourceSpec::from_pmf(d, std::move(p));
}

inline TargetSpec random_target(std::mt19937& rng, int ku, int kv) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> q(static_cast<std::size_t>(ku) * kv);
    double sum = 0;
    for (auto& v : q) {
        v = dist(rng);
        sum += v;
    }
    for (auto& v : q) v /= sum;
    return TargetSpec::from_matrix(ku, kv, std::move(q));
}

// A random family satisfying the relaxation constraints: draw the k
// rounding probabilities from a flat Dirichlet and scale down.
inline RealFunctionFamily random_valid_family(std::mt19937& rng, int d, int k) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<TruthTable> tabs(static_cast<std::size_t>(k - 1), TruthTable(d));
    const std::size_t n = std::size_t{1} << d;
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<double> r(static_cast<std::size_t>(k));
        double sum = 0;
        for (auto& v : r) {
            v = dist(rng);
            sum += v;
        }
        for (auto& v : r) v /= sum;
        for (int u = 1; u < k; ++u) tabs[static_cast<std::size_t>(u - 1)][x] = 2.0 * r[static_cast<std::size_t>(u)] - 1.0;
    }
    return RealFunctionFamily::from_tables(d, k, std::move(tabs));
}

} // namespace niss::testing
