#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sca/wavefield.hpp"

namespace sca {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 Cooley-Tukey transform. Size must be a power of two.
inline void fft_radix2(std::vector<cplx>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cplx wl = std::exp(cplx{0.0, ang});
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (cplx& x : a) x /= static_cast<double>(n);
}

// Magnitude spectrum of a real series window. Frequencies are reported in
// the half-period convention omega = pi * (cycles per sample), matching the
// minima-interval estimate omega_i = pi / t_i: a series whose minima are
// spaced t samples apart peaks at omega = pi / t.
struct SpectrumReport {
    std::vector<double> frequencies;  // rad/cycle, uniform bins pi*b/M
    std::vector<double> magnitudes;   // |X_b| for b = 0 .. M/2
    std::size_t series_length = 0;    // window length before padding
    std::size_t padded_length = 0;
    bool dc_removed = false;
    double parseval_residual = 0.0;   // relative, checked before DC removal
    double fundamental_omega = 0.0;   // refined dominant peak
    double fundamental_magnitude = 0.0;
};

// Window [t0, t1) of `series`: mean is subtracted, the remainder zero-padded
// to a power of two and transformed. The Parseval identity is verified on
// the raw window to 1e-9 relative before the DC component is removed.
inline SpectrumReport fft_spectrum(const std::vector<double>& series, std::size_t t0,
                                   std::size_t t1) {
    if (t0 >= t1 || t1 > series.size())
        throw std::invalid_argument("fft_spectrum: window outside series");
    const std::size_t len = t1 - t0;
    const std::size_t m = next_pow2(len);

    std::vector<cplx> raw(m, cplx{0.0, 0.0});
    double mean = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        raw[t] = cplx{series[t0 + t], 0.0};
        mean += series[t0 + t];
    }
    mean /= static_cast<double>(len);

    double time_energy = 0.0;
    for (std::size_t t = 0; t < len; ++t) time_energy += std::norm(raw[t]);
    fft_radix2(raw);
    double freq_energy = 0.0;
    for (const cplx& x : raw) freq_energy += std::norm(x);
    freq_energy /= static_cast<double>(m);

    SpectrumReport rep;
    rep.series_length = len;
    rep.padded_length = m;
    rep.parseval_residual =
        time_energy > 0.0 ? std::abs(freq_energy - time_energy) / time_energy : 0.0;
    if (rep.parseval_residual > 1e-9)
        throw std::runtime_error("fft_spectrum: Parseval identity violated");

    std::vector<cplx> cent(m, cplx{0.0, 0.0});
    for (std::size_t t = 0; t < len; ++t) cent[t] = cplx{series[t0 + t] - mean, 0.0};
    fft_radix2(cent);
    rep.dc_removed = true;

    const std::size_t nb = m / 2 + 1;
    rep.frequencies.resize(nb);
    rep.magnitudes.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        rep.frequencies[b] = std::numbers::pi * static_cast<double>(b) / static_cast<double>(m);
        rep.magnitudes[b] = std::abs(cent[b]);
    }

    // Dominant peak with parabolic refinement in log magnitude.
    std::size_t j = 1;
    for (std::size_t b = 2; b + 1 < nb; ++b)
        if (rep.magnitudes[b] > rep.magnitudes[j]) j = b;
    if (nb > 2) {
        double d = 0.0;
        if (j > 0 && j + 1 < nb && rep.magnitudes[j] > 0.0) {
            const double y0 = std::log(rep.magnitudes[j - 1] + 1e-300);
            const double y1 = std::log(rep.magnitudes[j] + 1e-300);
            const double y2 = std::log(rep.magnitudes[j + 1] + 1e-300);
            const double den = y0 - 2.0 * y1 + y2;
            if (den != 0.0) d = std::clamp(0.5 * (y0 - y2) / den, -0.5, 0.5);
        }
        rep.fundamental_omega =
            std::numbers::pi * (static_cast<double>(j) + d) / static_cast<double>(m);
        rep.fundamental_magnitude = rep.magnitudes[j];
    }
    return rep;
}

}  // namespace sca
