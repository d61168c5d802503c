#pragma once

// Dense d-dimensional value grids used by the convolution oracles.
// Internal to the oracle translation units.

#include <cstdint>
#include <vector>

#include "lclt/errors.hpp"
#include "lclt/measure.hpp"
#include "lclt/oracle.hpp"

namespace lclt::detail {

template <class T>
struct DenseGrid {
    int dim = 0;
    std::vector<std::int64_t> lo;      // per-axis lower corner
    std::vector<std::size_t> extent;   // per-axis size
    std::vector<T> data;               // row-major, last axis fastest

    std::size_t cells() const {
        std::size_t c = 1;
        for (auto e : extent) c *= e;
        return c;
    }

    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(dim, 1);
        for (int j = dim - 2; j >= 0; --j) s[j] = s[j + 1] * extent[j + 1];
        return s;
    }
};

template <class T>
DenseGrid<T> grid_from_entries(int dim,
                               const std::vector<std::pair<LatticePoint, T>>& entries,
                               const OracleLimits& limits) {
    DenseGrid<T> g;
    g.dim = dim;
    g.lo.assign(dim, 0);
    std::vector<std::int64_t> hi(dim, 0);
    bool first = true;
    for (const auto& [x, p] : entries) {
        for (int j = 0; j < dim; ++j) {
            if (first || x[j] < g.lo[j]) g.lo[j] = x[j];
            if (first || x[j] > hi[j]) hi[j] = x[j];
        }
        first = false;
    }
    std::size_t cells = 1;
    g.extent.assign(dim, 1);
    for (int j = 0; j < dim; ++j) {
        g.extent[j] = static_cast<std::size_t>(hi[j] - g.lo[j] + 1);
        cells *= g.extent[j];
        if (cells > limits.max_cells) throw ResourceLimit("convolution grid exceeds cell cap");
    }
    g.data.assign(cells, T(0));
    auto st = g.strides();
    for (const auto& [x, p] : entries) {
        std::size_t idx = 0;
        for (int j = 0; j < dim; ++j) idx += static_cast<std::size_t>(x[j] - g.lo[j]) * st[j];
        g.data[idx] += p;
    }
    return g;
}

/// (a*b): out extent is a.extent + b.extent - 1 per axis. Fixed iteration
/// order keeps the float path deterministic.
template <class T>
DenseGrid<T> conv(const DenseGrid<T>& a, const DenseGrid<T>& b, const OracleLimits& limits) {
    const int d = a.dim;
    DenseGrid<T> out;
    out.dim = d;
    out.lo.resize(d);
    out.extent.resize(d);
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) {
        out.lo[j] = a.lo[j] + b.lo[j];
        out.extent[j] = a.extent[j] + b.extent[j] - 1;
        cells *= out.extent[j];
        if (cells > limits.max_cells) throw ResourceLimit("convolution grid exceeds cell cap");
    }
    out.data.assign(cells, T(0));
    const auto ost = out.strides();
    const auto ast = a.strides();

    // Odometer over a's cells; for each, scatter b shifted to the a-offset.
    std::vector<std::size_t> apos(d, 0);
    for (std::size_t ia = 0; ia < a.data.size(); ++ia) {
        if (!(a.data[ia] == T(0))) {
            std::size_t base = 0;
            for (int j = 0; j < d; ++j) base += apos[j] * ost[j];
            std::vector<std::size_t> bpos(d, 0);
            std::size_t ob = base;
            for (std::size_t ib = 0; ib < b.data.size(); ++ib) {
                if (!(b.data[ib] == T(0))) out.data[ob] += a.data[ia] * b.data[ib];
                for (int j = d - 1; j >= 0; --j) {
                    ++bpos[j];
                    ob += ost[j];
                    if (bpos[j] < b.extent[j]) break;
                    ob -= bpos[j] * ost[j];
                    bpos[j] = 0;
                }
            }
        }
        for (int j = d - 1; j >= 0; --j) {
            ++apos[j];
            if (apos[j] < a.extent[j]) break;
            apos[j] = 0;
        }
    }
    return out;
}

/// Binary exponentiation of the convolution power.
template <class T>
DenseGrid<T> conv_power(DenseGrid<T> base, std::int64_t n, const OracleLimits& limits) {
    DenseGrid<T> result;
    bool have = false;
    std::int64_t e = n;
    while (e > 0) {
        if (e & 1) {
            result = have ? conv(result, base, limits) : base;
            have = true;
        }
        e >>= 1;
        if (e > 0) base = conv(base, base, limits);
    }
    return result;
}

template <class T>
std::vector<std::pair<LatticePoint, T>> entries_from_grid(const DenseGrid<T>& g) {
    std::vector<std::pair<LatticePoint, T>> out;
    LatticePoint x(g.dim);
    for (int j = 0; j < g.dim; ++j) x[j] = g.lo[j];
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (!(g.data[i] == T(0))) out.emplace_back(x, g.data[i]);
        for (int j = g.dim - 1; j >= 0; --j) {
            ++x[j];
            if (x[j] < g.lo[j] + static_cast<std::int64_t>(g.extent[j])) break;
            x[j] = g.lo[j];
        }
    }
    return out;
}

}  // namespace lclt::detail
