#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "niss/errors.hpp"
#include "niss/rng.hpp"
#include "niss/source.hpp"
#include "niss/target.hpp"
#include "niss/truth_table.hpp"

namespace niss {

// Slack for the relaxation constraints.
inline constexpr double kFamilyTol = 1e-12;

/// Real-valued relaxation of an indicator family: one table f_u per
/// non-reserved symbol u in {1..k-1}. Valid families satisfy |f_u(x)| <= 1
/// and sum_u (1+f_u(x))/2 <= 1 at every point; symbol 0 absorbs the
/// remaining probability under rounding.
struct RealFunctionFamily {
    int d = 0;
    int k = 2;
    std::vector<TruthTable> tables; // index u-1 holds the table for symbol u

    const TruthTable& table_for(int u) const { return tables[static_cast<std::size_t>(u - 1)]; }

    static RealFunctionFamily from_tables(int d, int k, std::vector<TruthTable> tabs) {
        if (k < 2) throw shape_error("output alphabet needs at least two symbols");
        if (tabs.size() != static_cast<std::size_t>(k - 1))
            throw shape_error("family needs one table per symbol in {1..k-1}");
        for (const auto& t : tabs)
            if (t.d != d) throw shape_error("family tables must share the dimension");
        return RealFunctionFamily{d, k, std::move(tabs)};
    }

    /// Indicator lifts chi(f(.)=u), u in {1..k-1}, of a symbol-valued table.
    static RealFunctionFamily lift(const TruthTable& f, int k) {
        std::vector<TruthTable> tabs;
        tabs.reserve(static_cast<std::size_t>(k - 1));
        for (int u = 1; u < k; ++u) tabs.push_back(indicator_lift(f, u, k));
        return from_tables(f.d, k, std::move(tabs));
    }
};

struct FamilyReport {
    bool bounds_ok = true; // |f_u(x)| <= 1 everywhere
    bool sum_ok = true;    // sum_u (1+f_u(x))/2 <= 1 everywhere
    // first violation details, valid when the corresponding flag is false
    int bad_u = 0;
    std::uint32_t bad_x = 0;
    double bad_value = 0.0;
    std::uint32_t sum_x = 0;
    double sum_value = 0.0;       // offending probability mass sum
    std::vector<int> sum_set;     // the violating subset A (all of {1..k-1})

    bool ok() const { return bounds_ok && sum_ok; }
};

/// Checks the relaxation constraints. The subset conditions over all
/// A proper subsets of {1..k-1} follow from the per-symbol bound plus the full-set
/// mass condition, so only those two are evaluated.
inline FamilyReport validate_family(const RealFunctionFamily& fam) {
    FamilyReport rep;
    const std::size_t n = std::size_t{1} << fam.d;
    for (int u = 1; u < fam.k && rep.bounds_ok; ++u) {
        const TruthTable& t = fam.table_for(u);
        for (std::size_t x = 0; x < n; ++x) {
            if (std::abs(t[x]) > 1.0 + kFamilyTol) {
                rep.bounds_ok = false;
                rep.bad_u = u;
                rep.bad_x = static_cast<std::uint32_t>(x);
                rep.bad_value = t[x];
                break;
            }
        }
    }
    for (std::size_t x = 0; x < n && rep.sum_ok; ++x) {
        double mass = 0;
        for (int u = 1; u < fam.k; ++u) mass += (1.0 + fam.table_for(u)[x]) / 2.0;
        if (mass > 1.0 + kFamilyTol) {
            rep.sum_ok = false;
            rep.sum_x = static_cast<std::uint32_t>(x);
            rep.sum_value = mass;
            for (int u = 1; u < fam.k; ++u) rep.sum_set.push_back(u);
        }
    }
    return rep;
}

inline void require_valid(const RealFunctionFamily& fam) {
    const FamilyReport rep = validate_family(fam);
    if (!rep.bounds_ok)
        throw constraint_error("family table " + std::to_string(rep.bad_u) + " exceeds [-1,1] at point " +
                               std::to_string(rep.bad_x));
    if (!rep.sum_ok)
        throw constraint_error("family mass exceeds 1 at point " + std::to_string(rep.sum_x));
}

/// Rounding probabilities at a point: r_u(x) = (1+f_u(x))/2 for u >= 1 and
/// r_0(x) = 1 - sum of the rest. Returned vector is indexed by symbol.
inline std::vector<double> probability_profile(const RealFunctionFamily& fam, std::uint32_t x) {
    if (x >= (std::uint64_t{1} << fam.d)) throw argument_error("point index out of range");
    std::vector<double> r(static_cast<std::size_t>(fam.k), 0.0);
    double rest = 0;
    for (int u = 1; u < fam.k; ++u) {
        const double f = fam.table_for(u)[x];
        if (std::abs(f) > 1.0 + kFamilyTol)
            throw constraint_error("family table " + std::to_string(u) + " exceeds [-1,1] at point " +
                                   std::to_string(x));
        double ru = (1.0 + f) / 2.0;
        ru = std::min(std::max(ru, 0.0), 1.0);
        r[static_cast<std::size_t>(u)] = ru;
        rest += ru;
    }
    if (rest > 1.0 + kFamilyTol)
        throw constraint_error("family mass exceeds 1 at point " + std::to_string(x));
    r[0] = std::max(1.0 - rest, 0.0);
    return r;
}

/// One categorical draw from the rounding profile at x. Deterministic given
/// the generator state and call order.
inline int round_sample(const RealFunctionFamily& fam, std::uint32_t x, std::mt19937_64& rng) {
    const std::vector<double> r = probability_profile(fam, x);
    const double u01 = uniform01(rng);
    double cdf = 0;
    for (std::size_t s = 0; s < r.size(); ++s) {
        cdf += r[s];
        if (u01 < cdf) return static_cast<int>(s);
    }
    return fam.k - 1; // u01 landed in terminal rounding slack
}

namespace detail {
// Profiles for every point, laid out r[x*k + symbol].
inline std::vector<double> profile_table(const RealFunctionFamily& fam) {
    const std::size_t n = std::size_t{1} << fam.d;
    std::vector<double> table(n * static_cast<std::size_t>(fam.k));
    for (std::size_t x = 0; x < n; ++x) {
        const auto r = probability_profile(fam, static_cast<std::uint32_t>(x));
        for (int s = 0; s < fam.k; ++s) table[x * fam.k + s] = r[static_cast<std::size_t>(s)];
    }
    return table;
}
} // namespace detail

/// Exact distribution generated by rounding both families over the product
/// source: Q(u,v) = sum_{x,y} W(x,y) r_u(x) s_v(y).
inline TargetSpec generated_distribution_exact(const RealFunctionFamily& fam_f,
                                               const RealFunctionFamily& fam_g,
                                               const BinarySourceSpec& src) {
    if (fam_f.d != fam_g.d) throw shape_error("families have different dimensions");
    require_valid(fam_f);
    require_valid(fam_g);
    const int d = fam_f.d;
    const std::size_t n = std::size_t{1} << d;
    const auto rf = detail::profile_table(fam_f);
    const auto rg = detail::profile_table(fam_g);
    const auto w = product_pair_weights(src, d);
    std::vector<double> q(static_cast<std::size_t>(fam_f.k) * fam_g.k, 0.0);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const double wxy = w[x * n + y];
            if (wxy == 0.0) continue;
            for (int u = 0; u < fam_f.k; ++u) {
                const double a = rf[x * fam_f.k + u];
                if (a == 0.0) continue;
                for (int v = 0; v < fam_g.k; ++v)
                    q[static_cast<std::size_t>(u) * fam_g.k + v] += wxy * a * rg[y * fam_g.k + v];
            }
        }
    return TargetSpec::from_matrix(fam_f.k, fam_g.k, std::move(q));
}

struct McDistribution {
    TargetSpec empirical;
    std::vector<double> stderr_cells; // per cell, sqrt(p(1-p)/n), row-major
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Monte Carlo counterpart: samples (X^d, Y^d) from the product source and
/// rounds each side with its own stream. Alice's and Bob's streams are
/// derived independently of each other and of the source stream; the result
/// is reproducible for fixed (seed, jobs).
inline McDistribution generated_distribution_mc(const RealFunctionFamily& fam_f,
                                                const RealFunctionFamily& fam_g,
                                                const BinarySourceSpec& src, std::uint64_t n_samples,
                                                std::uint64_t seed, int jobs = 1) {
    if (n_samples == 0) throw argument_error("sample count must be positive");
    if (fam_f.d != fam_g.d) throw shape_error("families have different dimensions");
    if (jobs < 1) throw argument_error("worker count must be positive");
    require_valid(fam_f);
    require_valid(fam_g);
    const int d = fam_f.d;
    const auto rf = detail::profile_table(fam_f);
    const auto rg = detail::profile_table(fam_g);
    const int ku = fam_f.k, kv = fam_g.k;

    // letter cdf over ((x=-1,y=-1),(-1,+1),(+1,-1),(+1,+1))
    double letter_cdf[4];
    {
        double acc = 0;
        int idx = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                acc += src.pmf[i][j];
                letter_cdf[idx++] = acc;
            }
        letter_cdf[3] = 1.0;
    }

    auto run_chunk = [&](std::uint64_t count, std::uint64_t worker, std::vector<std::uint64_t>& counts) {
        std::mt19937_64 rng_src(derive_seed(seed, worker * 3 + 0));
        std::mt19937_64 rng_a(derive_seed(seed, worker * 3 + 1));
        std::mt19937_64 rng_b(derive_seed(seed, worker * 3 + 2));
        for (std::uint64_t s = 0; s < count; ++s) {
            std::uint32_t x = 0, y = 0;
            for (int j = 0; j < d; ++j) {
                const double u01 = uniform01(rng_src);
                int cell = 0;
                while (cell < 3 && u01 >= letter_cdf[cell]) ++cell;
                x |= static_cast<std::uint32_t>(cell >> 1) << j;
                y |= static_cast<std::uint32_t>(cell & 1) << j;
            }
            auto draw = [](const std::vector<double>& table, std::uint32_t pt, int k,
                           std::mt19937_64& rng) {
                const double u01 = uniform01(rng);
                double cdf = 0;
                for (int s2 = 0; s2 < k; ++s2) {
                    cdf += table[static_cast<std::size_t>(pt) * k + s2];
                    if (u01 < cdf) return s2;
                }
                return k - 1;
            };
            const int u = draw(rf, x, ku, rng_a);
            const int v = draw(rg, y, kv, rng_b);
            ++counts[static_cast<std::size_t>(u) * kv + v];
        }
    };

    std::vector<std::vector<std::uint64_t>> per_worker(
        static_cast<std::size_t>(jobs), std::vector<std::uint64_t>(static_cast<std::size_t>(ku) * kv, 0));
    const std::uint64_t base = n_samples / static_cast<std::uint64_t>(jobs);
    const std::uint64_t extra = n_samples % static_cast<std::uint64_t>(jobs);
    if (jobs == 1) {
        run_chunk(n_samples, 0, per_worker[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int wkr = 0; wkr < jobs; ++wkr) {
            const std::uint64_t count = base + (static_cast<std::uint64_t>(wkr) < extra ? 1 : 0);
            threads.emplace_back(run_chunk, count, static_cast<std::uint64_t>(wkr),
                                 std::ref(per_worker[static_cast<std::size_t>(wkr)]));
        }
        for (auto& t : threads) t.join();
    }

    std::vector<double> freq(static_cast<std::size_t>(ku) * kv, 0.0);
    for (const auto& counts : per_worker)
        for (std::size_t c = 0; c < counts.size(); ++c) freq[c] += static_cast<double>(counts[c]);
    for (auto& f : freq) f /= static_cast<double>(n_samples);

    McDistribution out;
    out.stderr_cells.resize(freq.size());
    for (std::size_t c = 0; c < freq.size(); ++c)
        out.stderr_cells[c] = std::sqrt(freq[c] * (1.0 - freq[c]) / static_cast<double>(n_samples));
    out.empirical = TargetSpec::from_matrix(ku, kv, std::move(freq));
    out.n_samples = n_samples;
    out.seed = seed;
    out.jobs = jobs;
    return out;
}

struct PreservationReport {
    double max_mean_error = 0.0;  // worst |E[rounded lift] - E[f_u]| over both sides
    double max_cross_error = 0.0; // worst |E[rounded f g] - E[f_u g_v]|
    double max_error() const { return std::max(max_mean_error, max_cross_error); }
};

/// Verifies, by exact weighted sums, that rounding preserves the per-symbol
/// means and every cross moment E[f_u(X) g_v(Y)].
inline PreservationReport preservation_check(const RealFunctionFamily& fam_f,
                                             const RealFunctionFamily& fam_g,
                                             const BinarySourceSpec& src) {
    if (fam_f.d != fam_g.d) throw shape_error("families have different dimensions");
    require_valid(fam_f);
    require_valid(fam_g);
    const int d = fam_f.d;
    const std::size_t n = std::size_t{1} << d;
    const auto rf = detail::profile_table(fam_f);
    const auto rg = detail::profile_table(fam_g);
    std::vector<double> wx(n), wy(n);
    for (std::size_t x = 0; x < n; ++x) {
        wx[x] = product_point_prob(static_cast<std::uint32_t>(x), d, src.px());
        wy[x] = product_point_prob(static_cast<std::uint32_t>(x), d, src.py());
    }
    PreservationReport rep;
    for (int u = 1; u < fam_f.k; ++u) {
        double rounded = 0, relaxed = 0;
        for (std::size_t x = 0; x < n; ++x) {
            rounded += wx[x] * (2.0 * rf[x * fam_f.k + u] - 1.0);
            relaxed += wx[x] * fam_f.table_for(u)[x];
        }
        rep.max_mean_error = std::max(rep.max_mean_error, std::abs(rounded - relaxed));
    }
    for (int v = 1; v < fam_g.k; ++v) {
        double rounded = 0, relaxed = 0;
        for (std::size_t y = 0; y < n; ++y) {
            rounded += wy[y] * (2.0 * rg[y * fam_g.k + v] - 1.0);
            relaxed += wy[y] * fam_g.table_for(v)[y];
        }
        rep.max_mean_error = std::max(rep.max_mean_error, std::abs(rounded - relaxed));
    }
    const auto w = product_pair_weights(src, d);
    for (int u = 1; u < fam_f.k; ++u)
        for (int v = 1; v < fam_g.k; ++v) {
            double rounded = 0, relaxed = 0;
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    const double wxy = w[x * n + y];
                    rounded += wxy * (2.0 * rf[x * fam_f.k + u] - 1.0) * (2.0 * rg[y * fam_g.k + v] - 1.0);
                    relaxed += wxy * fam_f.table_for(u)[x] * fam_g.table_for(v)[y];
                }
            rep.max_cross_error = std::max(rep.max_cross_error, std::abs(rounded - relaxed));
        }
    return rep;
}

} // namespace niss
