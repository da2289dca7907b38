#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "niss/errors.hpp"

namespace niss {

/// Dense real-valued function on {-1,+1}^d.
///
/// Indexing convention (fixed across the whole library): bit j (0-based) of
/// the point index equals 1 iff coordinate x_{j+1} = +1, so point 0 is the
/// all-(-1) corner and point 2^d-1 the all-(+1) corner.
struct TruthTable {
    int d = 0;
    std::vector<double> values; // size 2^d

    TruthTable() = default;
    explicit TruthTable(int dim, double fill = 0.0) : d(dim) {
        if (dim < 0 || dim > 30) throw argument_error("truth table dimension out of range");
        values.assign(std::size_t{1} << dim, fill);
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t x) const { return values[x]; }
    double& operator[](std::size_t x) { return values[x]; }

    /// True iff every entry is exactly -1 or +1.
    bool sign_valued() const {
        for (double v : values)
            if (v != 1.0 && v != -1.0) return false;
        return true;
    }

    /// True iff every entry is an integer in {0..k-1}.
    bool symbol_valued(int k) const {
        for (double v : values) {
            if (v != std::floor(v)) return false;
            if (v < 0.0 || v >= static_cast<double>(k)) return false;
        }
        return true;
    }
};

/// Coordinate x_{j+1} of a point index, as +1/-1.
inline double point_coordinate(std::uint32_t x, int j) {
    return ((x >> j) & 1u) ? 1.0 : -1.0;
}

/// Sign table of the event f(x) = u, i.e. 2*1(f(x)=u) - 1.
/// Entries of f must be symbols in {0..k-1}.
inline TruthTable indicator_lift(const TruthTable& f, int u, int k) {
    if (k < 1) throw alphabet_error("alphabet size must be positive");
    if (!f.symbol_valued(k))
        throw alphabet_error("table entries must be integers in {0..k-1}");
    if (u < 0 || u >= k) throw alphabet_error("symbol outside {0..k-1}");
    TruthTable out(f.d);
    for (std::size_t x = 0; x < f.size(); ++x)
        out[x] = (f[x] == static_cast<double>(u)) ? 1.0 : -1.0;
    return out;
}

} // namespace niss
