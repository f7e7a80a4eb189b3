#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sca/grid.hpp"
#include "sca/wavefield.hpp"

namespace sca {

// Lattice units: hbar = tau = a = 1. The single free parameter is
// theta = (hbar/2m)(tau/a^2), so delta_m = theta and m = 1/(2 theta).
// Block rotations alias beyond theta = pi/2.
struct PhysicalParams {
    double theta;

    explicit PhysicalParams(double th) : theta(th) {
        if (!(th > 0.0) || !(th < 1.5707963267948966))
            throw std::invalid_argument("PhysicalParams: theta must lie in (0, pi/2)");
    }

    double delta_m() const { return theta; }
    double mass() const { return 1.0 / (2.0 * theta); }
};

// Per-cell fields. v is the scalar potential in units of delta_m
// (v = V/delta_m); g is the dimensionless vector potential per axis
// (g_W = (q a/hbar) A_W); reflect marks wall cells. theta_override, when
// positive at a cell, replaces the global theta for blocks led by that
// cell (inhomogeneous-theta refraction experiments).
struct FieldConfig {
    std::vector<double> v;
    std::array<std::vector<double>, 3> g;
    std::vector<std::uint8_t> reflect;
    std::vector<double> theta_override;

    FieldConfig() = default;
    explicit FieldConfig(const Grid& grid)
        : v(grid.size(), 0.0), reflect(grid.size(), 0), theta_override(grid.size(), 0.0) {
        for (int a = 0; a < grid.ndim(); ++a) g[a].assign(grid.size(), 0.0);
    }

    bool congruent(const Grid& grid) const {
        if (v.size() != grid.size() || reflect.size() != grid.size()) return false;
        for (int a = 0; a < grid.ndim(); ++a)
            if (g[a].size() != grid.size()) return false;
        return true;
    }
};

// The Hermitian 2x2 pair Hamiltonian [[c, d], [conj(d), c]], entries in
// units of delta_m. Free particle: c = 1, d = -1.
struct BlockHamiltonian {
    double c;
    cplx d;
};

struct BlockUnitary {
    cplx u00, u01, u10, u11;
};

// Pair Hamiltonian sampled at the pair's first (leading) cell:
//   c = 1 + (v + |g|^2) / (2 ndim),   d = -1 - 2i g_axis.
// The 1/(2 ndim) factor distributes the on-site energy over the per-axis
// even/odd splits (1/2 in 1D, 1/4 in 2D, 1/6 in 3D). A time-dependent
// schedule scales v only, so v_scale multiplies just the scalar term.
inline BlockHamiltonian block_hamiltonian(std::size_t lead_cell, int axis, const Grid& grid,
                                          const FieldConfig& fields, double v_scale = 1.0) {
    const int nd = grid.ndim();
    double g2 = 0.0;
    for (int a = 0; a < nd; ++a) {
        const double ga = fields.g[a][lead_cell];
        g2 += ga * ga;
    }
    BlockHamiltonian bh;
    bh.c = 1.0 + (fields.v[lead_cell] * v_scale + g2) / (2.0 * nd);
    bh.d = cplx{-1.0, -2.0 * fields.g[axis][lead_cell]};
    return bh;
}

// Exact 2x2 exponential exp(-i theta [[c,d],[d*,c]]) via
//   exp(-i phi (c0 I + n.sigma)) = e^{-i phi c0} (cos(phi|n|) I - i sin(phi|n|) n^.sigma).
// Free case reduces to e^{-i theta} [[cos, i sin], [i sin, cos]].
inline BlockUnitary block_unitary(const BlockHamiltonian& bh, double theta) {
    const double ad = std::abs(bh.d);
    const cplx phase = std::exp(cplx{0.0, -theta * bh.c});
    BlockUnitary u;
    if (ad == 0.0) {
        u.u00 = u.u11 = phase;
        u.u01 = u.u10 = cplx{0.0, 0.0};
        return u;
    }
    const double co = std::cos(theta * ad);
    const double si = std::sin(theta * ad);
    const cplx dn = bh.d / ad;
    u.u00 = phase * co;
    u.u11 = phase * co;
    u.u01 = phase * cplx{0.0, -si} * dn;
    u.u10 = phase * cplx{0.0, -si} * std::conj(dn);
    return u;
}

// Wall block. A reflective cell decouples from its partner: the pair
// Hamiltonian is replaced by the identity (c = 1, d = 0), so the block is
// exp(-i theta I) = e^{-i theta} I. Both cells keep the free-particle rest
// phase but exchange nothing, which terminates the chain cleanly.
//
// The phase matters. With a plain +/-I here the boxed sine modes pick up a
// per-substep phase offset relative to the interior free blocks and their
// eigenfrequencies land far off the free dispersion at k = n pi / L; with
// e^{-i theta} I the modes are stationary in shape and a 17-cell well
// reproduces the n = 3 breathing period near 160 cycles.
inline BlockUnitary reflective_block(double theta) {
    const cplx phase = std::exp(cplx{0.0, -theta});
    return BlockUnitary{phase, cplx{0.0, 0.0}, cplx{0.0, 0.0}, phase};
}

inline double block_theta(std::size_t lead_cell, double global_theta, const FieldConfig& fields) {
    if (lead_cell < fields.theta_override.size() && fields.theta_override[lead_cell] > 0.0)
        return fields.theta_override[lead_cell];
    return global_theta;
}

// Block for one concrete pair, honoring reflector flags and theta override.
inline BlockUnitary pair_block(std::size_t cell, std::size_t partner, int axis, const Grid& grid,
                               const PhysicalParams& params, const FieldConfig& fields,
                               double v_scale = 1.0) {
    const double th = block_theta(cell, params.theta, fields);
    if (fields.reflect[cell] || fields.reflect[partner]) return reflective_block(th);
    return block_unitary(block_hamiltonian(cell, axis, grid, fields, v_scale), th);
}

}  // namespace sca
