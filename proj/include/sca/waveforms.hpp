#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sca/grid.hpp"
#include "sca/wavefield.hpp"

namespace sca {

// Initial-state constructors. All outputs are normalized numerically after
// sampling (lattice sampling breaks continuum normalization constants).
// Centers may be half-integer to align with block boundaries.

// Plane wave e^{ik(x-x0)} with per-axis wavenumbers, |amp| = 1/sqrt(N).
// k components are reduced with remainder(k, 2pi) before sampling, making
// the construction periodic in k by definition.
inline WaveField plane_wave(const Grid& grid, std::vector<double> k, std::vector<double> x0) {
    if (static_cast<int>(k.size()) != grid.ndim() || static_cast<int>(x0.size()) != grid.ndim())
        throw std::invalid_argument("plane_wave: k and x0 must have one entry per axis");
    for (double& kc : k) kc = std::remainder(kc, 2.0 * std::numbers::pi);

    WaveField f(grid);
    const double mag = 1.0 / std::sqrt(static_cast<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = grid.coords(i);
        double phase = 0.0;
        for (int a = 0; a < grid.ndim(); ++a)
            phase += k[a] * (static_cast<double>(c[a]) - x0[a]);
        f.amp[i] = mag * std::exp(cplx{0.0, phase});
    }
    return f;
}

// Gaussian packet: product over axes of
//   exp(-((x-x0)/sigma)^2 / 2) * exp(i k (x-x0)).
// If more than 10% of the probability lands in a single cell the packet is
// undersampled; the condition is reported through `warning` when provided.
inline WaveField gaussian_packet(const Grid& grid, std::vector<double> k, std::vector<double> x0,
                                 std::vector<double> sigma, std::string* warning = nullptr) {
    if (static_cast<int>(k.size()) != grid.ndim() || static_cast<int>(x0.size()) != grid.ndim() ||
        static_cast<int>(sigma.size()) != grid.ndim())
        throw std::invalid_argument("gaussian_packet: k, x0, sigma must have one entry per axis");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("gaussian_packet: sigma must be positive");

    WaveField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = grid.coords(i);
        double phase = 0.0, expo = 0.0;
        for (int a = 0; a < grid.ndim(); ++a) {
            const double u = static_cast<double>(c[a]) - x0[a];
            phase += k[a] * u;
            expo += 0.5 * (u / sigma[a]) * (u / sigma[a]);
        }
        f.amp[i] = std::exp(-expo) * std::exp(cplx{0.0, phase});
    }
    normalize(f);
    if (warning) {
        double peak = 0.0;
        for (const cplx& a : f.amp) peak = std::max(peak, std::norm(a));
        if (peak > 0.10)
            *warning = "gaussian_packet: undersampled, one cell holds " +
                       std::to_string(100.0 * peak) + "% of the probability";
    }
    return f;
}

// Infinite-well eigenstate sqrt(2/L) sin(n pi / L (x - x_c + L/2)) on a 1D
// grid, zero outside the open interval of length L centered on x_c.
// n is reduced mod 2L first, which realizes the sampling alias
// W(n) = W(2L + n) bit for bit. States whose sampled values vanish
// identically (n = 0 mod L on an integer-aligned well) are rejected.
inline WaveField box_state(const Grid& grid, double x_c, long L, long n) {
    if (grid.ndim() != 1) throw std::invalid_argument("box_state: 1D grids only");
    if (L < 2) throw std::invalid_argument("box_state: well length must be >= 2");
    if (n < 0) throw std::invalid_argument("box_state: n must be >= 0");
    const double lo = x_c - static_cast<double>(L) / 2.0;
    const double hi = x_c + static_cast<double>(L) / 2.0;
    if (lo < -0.5 || hi > static_cast<double>(grid.extent(0)) - 0.5)
        throw std::invalid_argument("box_state: well does not fit the grid");

    const long n_red = n % (2 * L);
    WaveField f(grid);
    const double fac = static_cast<double>(n_red) * std::numbers::pi / static_cast<double>(L);
    for (std::size_t x = 0; x < grid.extent(0); ++x) {
        const double u = static_cast<double>(x) - x_c + static_cast<double>(L) / 2.0;
        if (u <= 0.0 || u >= static_cast<double>(L)) continue;
        f.amp[x] = std::sin(fac * u);
    }
    // Modes with n = 0 mod L sample to pure rounding noise; any real mode
    // sums to about L / 2 before normalization.
    if (total_probability(f) < 1e-12)
        throw std::domain_error("box_state: degenerate state, sampled values all vanish");
    normalize(f);
    return f;
}

namespace detail {
// Physicists' Hermite polynomial H_n via the recurrence
// H_0 = 1, H_1 = 2 xi, H_{n+1} = 2 xi H_n - 2 n H_{n-1}.
inline double hermite(long n, double xi) {
    double h0 = 1.0;
    if (n == 0) return h0;
    double h1 = 2.0 * xi;
    for (long m = 1; m < n; ++m) {
        const double h2 = 2.0 * xi * h1 - 2.0 * static_cast<double>(m) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}
}  // namespace detail

// Harmonic-oscillator eigenstate H_n(xi) exp(-xi^2/2), xi = (x - x_c)/rho,
// on a 1D grid. The recurrence is validated up to n = 64.
inline WaveField harmonic_state(const Grid& grid, double x_c, double rho, long n) {
    if (grid.ndim() != 1) throw std::invalid_argument("harmonic_state: 1D grids only");
    if (!(rho > 0.0)) throw std::invalid_argument("harmonic_state: rho must be positive");
    if (n < 0 || n > 64)
        throw std::invalid_argument("harmonic_state: n outside the validated range [0, 64]");

    WaveField f(grid);
    for (std::size_t x = 0; x < grid.extent(0); ++x) {
        const double xi = (static_cast<double>(x) - x_c) / rho;
        f.amp[x] = detail::hermite(n, xi) * std::exp(-0.5 * xi * xi);
    }
    normalize(f);
    return f;
}

// Separable product of per-axis 1D factors; factor a must live on a 1D grid
// matching axis a of `grid`. Used for 2D and 3D initial states.
inline WaveField product_state(const Grid& grid, const std::vector<WaveField>& factors) {
    if (static_cast<int>(factors.size()) != grid.ndim())
        throw std::invalid_argument("product_state: need one factor per axis");
    for (int a = 0; a < grid.ndim(); ++a)
        if (factors[a].grid.ndim() != 1 || factors[a].grid.extent(0) != grid.extent(a))
            throw std::invalid_argument("product_state: factor grid mismatch on axis " +
                                        std::to_string(a));
    WaveField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = grid.coords(i);
        cplx v{1.0, 0.0};
        for (int a = 0; a < grid.ndim(); ++a) v *= factors[a].amp[c[a]];
        f.amp[i] = v;
    }
    normalize(f);
    return f;
}

}  // namespace sca
