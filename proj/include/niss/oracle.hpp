#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "niss/bounds.hpp"
#include "niss/errors.hpp"
#include "niss/fourier.hpp"
#include "niss/source.hpp"
#include "niss/target.hpp"
#include "niss/truth_table.hpp"

namespace niss {

/// Exhaustive enumeration of functions {-1,+1}^d -> {0..k-1}, ordered
/// lexicographically by the base-k digit string of the truth table (the
/// value at point 0 is the most significant digit).
class FunctionEnumeration {
public:
    FunctionEnumeration(int d, int k, std::uint64_t cap = 1'000'000)
        : d_(d), k_(k), points_(std::size_t{1} << d) {
        if (d < 0 || d > 25) throw argument_error("dimension out of range");
        if (k < 1) throw argument_error("alphabet size must be positive");
        std::uint64_t size = 1;
        for (std::size_t i = 0; i < points_; ++i) {
            if (size > cap / static_cast<std::uint64_t>(k)) {
                char need[48];
                std::snprintf(need, sizeof(need), "%.6g",
                              std::pow(static_cast<double>(k), static_cast<double>(points_)));
                throw size_error("enumeration of " + std::to_string(k) + "^" + std::to_string(points_) +
                                 " functions exceeds the cap; needs cap >= " + need);
            }
            size *= static_cast<std::uint64_t>(k);
        }
        size_ = size;
    }

    std::uint64_t size() const { return size_; }
    int dimension() const { return d_; }
    int alphabet() const { return k_; }

    TruthTable at(std::uint64_t index) const {
        if (index >= size_) throw argument_error("function index out of range");
        TruthTable f(d_);
        std::uint64_t rem = index;
        for (std::size_t x = points_; x-- > 0;) {
            f[x] = static_cast<double>(rem % static_cast<std::uint64_t>(k_));
            rem /= static_cast<std::uint64_t>(k_);
        }
        return f;
    }

private:
    int d_;
    int k_;
    std::size_t points_;
    std::uint64_t size_ = 0;
};

namespace detail {
inline int infer_alphabet(const TruthTable& f) {
    double mx = 0;
    for (double v : f.values) mx = std::max(mx, v);
    return std::max(2, static_cast<int>(mx) + 1);
}
} // namespace detail

/// Exact joint distribution of (f(X^d), g(Y^d)) under the product source:
/// the full double sum over 4^d input pairs. Alphabet sizes are inferred
/// from the tables when not given.
inline TargetSpec joint_distribution(const TruthTable& f, const TruthTable& g,
                                     const BinarySourceSpec& src, int ku = 0, int kv = 0) {
    if (f.d != g.d) throw shape_error("tables have different dimensions");
    if (ku == 0) ku = detail::infer_alphabet(f);
    if (kv == 0) kv = detail::infer_alphabet(g);
    if (!f.symbol_valued(ku) || !g.symbol_valued(kv))
        throw alphabet_error("tables must hold symbols in the output alphabet");
    const int d = f.d;
    const std::size_t n = std::size_t{1} << d;
    const auto w = product_pair_weights(src, d);
    std::vector<double> q(static_cast<std::size_t>(ku) * kv, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        const int u = static_cast<int>(f[x]);
        for (std::size_t y = 0; y < n; ++y)
            q[static_cast<std::size_t>(u) * kv + static_cast<int>(g[y])] += w[x * n + y];
    }
    return TargetSpec::from_matrix(ku, kv, std::move(q));
}

struct CorrelationAgreement {
    double max_discrepancy = 0.0; // worst pairwise gap between the three routes
};

/// Computes E[chi(f=u) chi(g=v)] three independent ways for every symbol
/// pair: a direct weighted sum, the spectral route (cross_correlation of
/// the analyzed lifts), and the affine route through the joint pmf. Used to
/// pin the e-coordinate convention.
inline CorrelationAgreement verify_correlation_formula(const TruthTable& f, const TruthTable& g,
                                                       const BinarySourceSpec& src, int ku = 0,
                                                       int kv = 0) {
    if (f.d != g.d) throw shape_error("tables have different dimensions");
    if (ku == 0) ku = detail::infer_alphabet(f);
    if (kv == 0) kv = detail::infer_alphabet(g);
    const int d = f.d;
    const std::size_t n = std::size_t{1} << d;
    const auto w = product_pair_weights(src, d);
    const TargetSpec joint = joint_distribution(f, g, src, ku, kv);
    const CorrelationVector e = e_from_q(joint);

    CorrelationAgreement rep;
    for (int u = 0; u < ku; ++u) {
        const TruthTable fu = indicator_lift(f, u, ku);
        const FourierSpectrum fu_spec = analyze(fu, src.px());
        for (int v = 0; v < kv; ++v) {
            const TruthTable gv = indicator_lift(g, v, kv);
            double direct = 0;
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) direct += w[x * n + y] * fu[x] * gv[y];
            const double spectral = cross_correlation(fu_spec, analyze(gv, src.py()), src.rho);
            rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(direct - spectral));
            if (u >= 1 && v >= 1) {
                const double affine = e.at(u, v);
                rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(direct - affine));
                rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(spectral - affine));
            }
        }
    }
    return rep;
}

/// One enumerated function pair with its exact joint law, e-coordinates and
/// (after a sandwich pass) per-lambda scores.
struct ScanRecord {
    std::uint64_t f_index = 0;
    std::uint64_t g_index = 0;
    TargetSpec target;
    CorrelationVector e;
    std::vector<double> lambda_scores;
};

struct Violation {
    std::size_t record_index = 0;
    std::size_t lambda_index = 0;
    int side = 0;      // +1: above theta+, -1: below theta-
    double margin = 0; // amount beyond the bound (positive)
};

struct ScanReport {
    BinarySourceSpec source;
    int d = 0, ku = 0, kv = 0;
    std::vector<ScanRecord> records;
    std::vector<Violation> violations;
    double worst_margin = 0.0; // max signed margin over all record/lambda pairs
    double tol = kDefaultBoundTol;
};

/// Exhaustive scan over all function pairs at blocklength d; one record per
/// pair in (f_index, g_index) order. Violations are left empty until a
/// sandwich pass runs.
inline ScanReport achievable_scan(int d, int ku, int kv, const BinarySourceSpec& src,
                                  std::uint64_t pair_cap = 10'000'000, int jobs = 1) {
    if (jobs < 1) throw argument_error("worker count must be positive");
    const FunctionEnumeration fs(d, ku, pair_cap);
    const FunctionEnumeration gs(d, kv, pair_cap);
    if (fs.size() > pair_cap / gs.size())
        throw size_error("scan of " + std::to_string(fs.size()) + " x " + std::to_string(gs.size()) +
                         " pairs exceeds the pair cap " + std::to_string(pair_cap));
    const std::size_t n = std::size_t{1} << d;
    const auto w = product_pair_weights(src, d);

    ScanReport report;
    report.source = src;
    report.d = d;
    report.ku = ku;
    report.kv = kv;
    report.records.resize(static_cast<std::size_t>(fs.size() * gs.size()));

    auto run_range = [&](std::uint64_t f_begin, std::uint64_t f_end) {
        // row aggregation: for fixed f, R[u][y] = sum_{x: f(x)=u} W(x,y)
        std::vector<double> rows(static_cast<std::size_t>(ku) * n);
        for (std::uint64_t fi = f_begin; fi < f_end; ++fi) {
            const TruthTable f = fs.at(fi);
            std::fill(rows.begin(), rows.end(), 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                const auto u = static_cast<std::size_t>(f[x]);
                for (std::size_t y = 0; y < n; ++y) rows[u * n + y] += w[x * n + y];
            }
            for (std::uint64_t gi = 0; gi < gs.size(); ++gi) {
                const TruthTable g = gs.at(gi);
                std::vector<double> q(static_cast<std::size_t>(ku) * kv, 0.0);
                for (int u = 0; u < ku; ++u)
                    for (std::size_t y = 0; y < n; ++y)
                        q[static_cast<std::size_t>(u) * kv + static_cast<int>(g[y])] +=
                            rows[static_cast<std::size_t>(u) * n + y];
                ScanRecord rec;
                rec.f_index = fi;
                rec.g_index = gi;
                rec.target = TargetSpec::from_matrix(ku, kv, std::move(q));
                rec.e = e_from_q(rec.target);
                report.records[static_cast<std::size_t>(fi * gs.size() + gi)] = std::move(rec);
            }
        }
    };

    if (jobs == 1) {
        run_range(0, fs.size());
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t total = fs.size();
        const std::uint64_t chunk = (total + static_cast<std::uint64_t>(jobs) - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            const std::uint64_t b = std::min<std::uint64_t>(total, chunk * static_cast<std::uint64_t>(t));
            const std::uint64_t e = std::min<std::uint64_t>(total, b + chunk);
            if (b < e) threads.emplace_back(run_range, b, e);
        }
        for (auto& t : threads) t.join();
    }
    return report;
}

/// Fills per-record lambda scores, flags every record/lambda pair whose
/// score leaves [theta-, theta+] by more than tol, and tracks the worst
/// signed margin so near-misses stay visible in reports. Record ranges are
/// checked in parallel and merged in index order, so the report is
/// identical for any worker count.
inline ScanReport sandwich_report(ScanReport scan, const std::vector<LambdaWeights>& grid, double tol,
                                  int jobs = 1) {
    if (jobs < 1) throw argument_error("worker count must be positive");
    scan.violations.clear();
    scan.tol = tol;
    const double rho = scan.source.rho;

    const std::size_t total = scan.records.size();
    const std::size_t chunk = (total + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
    std::vector<std::vector<Violation>> chunk_violations(static_cast<std::size_t>(jobs));
    std::vector<double> chunk_worst(static_cast<std::size_t>(jobs),
                                    -std::numeric_limits<double>::infinity());

    auto run_range = [&](int worker, std::size_t begin, std::size_t end) {
        auto& out = chunk_violations[static_cast<std::size_t>(worker)];
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t ri = begin; ri < end; ++ri) {
            ScanRecord& rec = scan.records[ri];
            rec.lambda_scores.assign(grid.size(), 0.0);
            for (std::size_t li = 0; li < grid.size(); ++li) {
                const double score = lambda_score(grid[li], rec.e);
                rec.lambda_scores[li] = score;
                const BoundReport b = theta_bounds(rho, rec.target.qu, rec.target.qv, grid[li]);
                const double above = score - b.theta_plus;
                const double below = b.theta_minus - score;
                worst = std::max(worst, std::max(above, below));
                if (above > tol) {
                    out.push_back(Violation{ri, li, +1, above});
                } else if (below > tol) {
                    out.push_back(Violation{ri, li, -1, below});
                }
            }
        }
        chunk_worst[static_cast<std::size_t>(worker)] = worst;
    };

    if (jobs == 1) {
        run_range(0, 0, total);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs; ++w) {
            const std::size_t b = std::min(total, chunk * static_cast<std::size_t>(w));
            const std::size_t e = std::min(total, b + chunk);
            threads.emplace_back(run_range, w, b, e);
        }
        for (auto& t : threads) t.join();
    }

    scan.worst_margin = -std::numeric_limits<double>::infinity();
    for (int w = 0; w < jobs; ++w) {
        scan.worst_margin = std::max(scan.worst_margin, chunk_worst[static_cast<std::size_t>(w)]);
        auto& cv = chunk_violations[static_cast<std::size_t>(w)];
        scan.violations.insert(scan.violations.end(), cv.begin(), cv.end());
    }
    if (!std::isfinite(scan.worst_margin)) scan.worst_margin = 0.0;
    return scan;
}

} // namespace niss
