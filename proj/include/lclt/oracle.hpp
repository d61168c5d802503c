#pragma once

#include <complex>
#include <cstdint>

#include "lclt/measure.hpp"

namespace lclt {

enum class Provenance { dp, dft };

/// Exact n-step distribution G^{*n}; support is contained in the ball of
/// radius n * steplength. Float-path mass is 1 within 1e-9.
struct ConvolvedMeasure {
    LatticeMeasure measure;
    std::int64_t n = 1;
    Provenance provenance = Provenance::dp;
};

struct OracleLimits {
    // Cap on dense grid cells for a single convolution operand or DFT grid.
    std::size_t max_cells = 20'000'000;
};

/// (a*b)(x) = sum_y a(y) b(x-y); the steplength bound adds.
LatticeMeasure convolve(const LatticeMeasure& a, const LatticeMeasure& b);

/// G^{*n} by binary exponentiation of the convolution. With exact=true
/// all arithmetic is rational (inputs taken as exact binary rationals)
/// and only the final values are rounded to double. Float-mode values
/// below 1e-300 are flushed to zero.
ConvolvedMeasure power_dp(const LatticeMeasure& m, std::int64_t n, bool exact = false,
                          const OracleLimits& limits = {});

/// G^{*n} through the characteristic function: evaluates char_fn on a
/// per-axis grid of M >= 2*steplength*n + 1 equispaced frequencies
/// (M rounded up to a power of two), raises pointwise to the n-th power
/// and inverse-transforms. The support fits inside the grid box, so
/// there is no circular aliasing. Imaginary residues above 1e-10 raise
/// NumericalFailure; tiny negative reals are clamped to zero.
ConvolvedMeasure power_dft(const LatticeMeasure& m, std::int64_t n,
                           const OracleLimits& limits = {});

/// sum_x e^{i t.x} m(x); modulus is 1 at t = 0 and at most 1 everywhere.
std::complex<double> char_fn(const LatticeMeasure& m, const std::vector<double>& t);

}  // namespace lclt
