#include "lclt/oracle_exact.hpp"

#include <algorithm>

#include "grid_conv.hpp"

namespace lclt {

Rational RationalMeasure::at(const LatticePoint& x) const {
    auto it = std::lower_bound(
        entries.begin(), entries.end(), x,
        [](const std::pair<LatticePoint, Rational>& e, const LatticePoint& p) {
            return e.first < p;
        });
    if (it != entries.end() && it->first == x) return it->second;
    return Rational(0);
}

Rational RationalMeasure::mass() const {
    Rational s(0);
    for (const auto& e : entries) s += e.second;
    return s;
}

RationalMeasure to_rational(const LatticeMeasure& m) {
    RationalMeasure out;
    out.dim = m.dim();
    out.steplength = m.steplength();
    out.entries.reserve(m.support_size());
    for (const auto& [x, p] : m.entries()) out.entries.emplace_back(x, Rational(p));
    return out;
}

RationalMeasure rational_power(const LatticeMeasure& m, std::int64_t n,
                               const OracleLimits& limits) {
    if (n < 1) throw PreconditionError("rational_power: n must be >= 1");
    RationalMeasure base = to_rational(m);
    auto grid = detail::grid_from_entries<Rational>(base.dim, base.entries, limits);
    auto power = detail::conv_power(std::move(grid), n, limits);
    RationalMeasure out;
    out.dim = base.dim;
    out.steplength = base.steplength * n;
    out.entries = detail::entries_from_grid(power);
    return out;
}

LatticeMeasure to_double(const RationalMeasure& m) {
    std::vector<LatticeMeasure::Entry> entries;
    entries.reserve(m.entries.size());
    for (const auto& [x, q] : m.entries) entries.emplace_back(x, q.get_d());
    return LatticeMeasure(m.dim, m.steplength, std::move(entries), /*check_invariants=*/false);
}

// Exact-mode backend of power_dp (declared in oracle.cpp).
ConvolvedMeasure power_dp_exact_impl(const LatticeMeasure& m, std::int64_t n,
                                     const OracleLimits& limits) {
    return {to_double(rational_power(m, n, limits)), n, Provenance::dp};
}

}  // namespace lclt
