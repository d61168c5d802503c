#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "lclt/measure.hpp"
#include "lclt/oracle.hpp"

namespace lclt {

using Rational = mpq_class;

/// Rational-arithmetic mirror of LatticeMeasure, used to bound the
/// rounding of the float convolution path. Probabilities come from the
/// double entries, which are themselves exact binary rationals.
struct RationalMeasure {
    int dim = 0;
    std::int64_t steplength = 0;
    std::vector<std::pair<LatticePoint, Rational>> entries;  // sorted lexicographically

    Rational at(const LatticePoint& x) const;
    Rational mass() const;
};

RationalMeasure to_rational(const LatticeMeasure& m);

/// G^{*n} with exact rational arithmetic (binary exponentiation).
RationalMeasure rational_power(const LatticeMeasure& m, std::int64_t n,
                               const OracleLimits& limits = {});

LatticeMeasure to_double(const RationalMeasure& m);

}  // namespace lclt
