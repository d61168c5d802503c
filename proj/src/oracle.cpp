#include "lclt/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "grid_conv.hpp"

namespace lclt {

namespace {

constexpr double kFlush = 1e-300;  // float-mode underflow flush

detail::DenseGrid<double> measure_grid(const LatticeMeasure& m, const OracleLimits& limits) {
    return detail::grid_from_entries<double>(m.dim(), m.entries(), limits);
}

LatticeMeasure measure_from_grid(const detail::DenseGrid<double>& g, std::int64_t steplength,
                                 bool flush) {
    auto entries = detail::entries_from_grid(g);
    if (flush)
        std::erase_if(entries, [](const auto& e) { return std::abs(e.second) < kFlush; });
    return LatticeMeasure(g.dim, steplength, std::move(entries), /*check_invariants=*/false);
}

}  // namespace

LatticeMeasure convolve(const LatticeMeasure& a, const LatticeMeasure& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("convolve: dimension mismatch");
    OracleLimits limits;
    auto g = detail::conv(measure_grid(a, limits), measure_grid(b, limits), limits);
    return measure_from_grid(g, a.steplength() + b.steplength(), /*flush=*/false);
}

ConvolvedMeasure power_dp(const LatticeMeasure& m, std::int64_t n, bool exact,
                          const OracleLimits& limits) {
    if (n < 1) throw PreconditionError("power_dp: n must be >= 1");
    if (exact) {
        extern ConvolvedMeasure power_dp_exact_impl(const LatticeMeasure&, std::int64_t,
                                                    const OracleLimits&);
        return power_dp_exact_impl(m, n, limits);
    }
    auto g = detail::conv_power(measure_grid(m, limits), n, limits);
    return {measure_from_grid(g, m.steplength() * n, /*flush=*/true), n, Provenance::dp};
}

std::complex<double> char_fn(const LatticeMeasure& m, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != m.dim()) throw DimensionMismatch("char_fn: dimension mismatch");
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [x, p] : m.entries()) {
        double phase = 0.0;
        for (int j = 0; j < m.dim(); ++j) phase += t[j] * static_cast<double>(x[j]);
        acc += p * std::polar(1.0, phase);
    }
    return acc;
}

namespace {

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

ConvolvedMeasure power_dft(const LatticeMeasure& m, std::int64_t n, const OracleLimits& limits) {
    if (n < 1) throw PreconditionError("power_dft: n must be >= 1");
    const int d = m.dim();
    const std::int64_t radius = m.steplength() * n;
    const std::size_t M = next_pow2(static_cast<std::size_t>(2 * radius + 1));
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) {
        cells *= M;
        if (cells > limits.max_cells) throw ResourceLimit("power_dft: grid too large");
    }

    // Per-axis phase tables e^{2 pi i k c / M} for the support coordinates.
    const std::int64_t l = m.steplength();
    std::vector<std::vector<std::complex<double>>> phase(
        d, std::vector<std::complex<double>>(M * static_cast<std::size_t>(2 * l + 1)));
    for (int j = 0; j < d; ++j)
        for (std::size_t k = 0; k < M; ++k)
            for (std::int64_t c = -l; c <= l; ++c)
                phase[j][k * (2 * l + 1) + static_cast<std::size_t>(c + l)] =
                    std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) *
                                        static_cast<double>(c) / static_cast<double>(M));

    fftw_complex* buf = fftw_alloc_complex(cells);
    if (!buf) throw ResourceLimit("power_dft: allocation failed");
    struct BufGuard {
        fftw_complex* p;
        ~BufGuard() { fftw_free(p); }
    } guard{buf};

    // Evaluate char_fn(t_k)^n on the frequency grid, t_kj = 2 pi k_j / M.
    std::vector<std::size_t> kpos(d, 0);
    for (std::size_t i = 0; i < cells; ++i) {
        std::complex<double> H(0.0, 0.0);
        for (const auto& [x, p] : m.entries()) {
            std::complex<double> e(1.0, 0.0);
            for (int j = 0; j < d; ++j)
                e *= phase[j][kpos[j] * (2 * l + 1) + static_cast<std::size_t>(x[j] + l)];
            H += p * e;
        }
        const double r = std::abs(H);
        std::complex<double> Hn(0.0, 0.0);
        if (r > 0.0) {
            const double rn = std::exp(static_cast<double>(n) * std::log(r));
            Hn = std::polar(rn, static_cast<double>(n) * std::arg(H));
        }
        buf[i][0] = Hn.real();
        buf[i][1] = Hn.imag();
        for (int j = d - 1; j >= 0; --j) {
            if (++kpos[j] < M) break;
            kpos[j] = 0;
        }
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        std::vector<int> sizes(d, static_cast<int>(M));
        fftw_plan plan =
            fftw_plan_dft(d, sizes.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    // Extract the box [-radius, radius]^d; coordinates wrap modulo M.
    const double scale = 1.0 / static_cast<double>(cells);
    std::vector<std::pair<LatticePoint, double>> entries;
    LatticePoint x(d, -radius);
    std::size_t box_cells = 1;
    for (int j = 0; j < d; ++j) box_cells *= static_cast<std::size_t>(2 * radius + 1);
    for (std::size_t i = 0; i < box_cells; ++i) {
        std::size_t idx = 0;
        for (int j = 0; j < d; ++j) {
            const std::size_t bin =
                static_cast<std::size_t>(((x[j] % static_cast<std::int64_t>(M)) +
                                          static_cast<std::int64_t>(M)) %
                                         static_cast<std::int64_t>(M));
            idx = idx * M + bin;
        }
        const double re = buf[idx][0] * scale;
        const double im = buf[idx][1] * scale;
        if (std::abs(im) > 1e-10)
            throw NumericalFailure("power_dft: imaginary residue above 1e-10");
        double v = re;
        if (v < 0.0) {
            if (v < -1e-10) throw NumericalFailure("power_dft: negative value below -1e-10");
            v = 0.0;
        }
        if (v >= kFlush) entries.emplace_back(x, v);
        for (int j = d - 1; j >= 0; --j) {
            if (++x[j] <= radius) break;
            x[j] = -radius;
        }
    }
    LatticeMeasure out(d, radius, std::move(entries), /*check_invariants=*/false);
    return {std::move(out), n, Provenance::dft};
}

}  // namespace lclt
