#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "sca/grid.hpp"

namespace sca {

using cplx = std::complex<double>;

// Complex amplitude per cell. Owned by one evolution loop at a time;
// analysis works on snapshot copies.
struct WaveField {
    Grid grid;
    std::vector<cplx> amp;

    WaveField() = default;
    explicit WaveField(const Grid& g) : grid(g), amp(g.size(), cplx{0.0, 0.0}) {}

    std::size_t size() const { return amp.size(); }
    cplx& operator[](std::size_t i) { return amp[i]; }
    const cplx& operator[](std::size_t i) const { return amp[i]; }
};

// P(x) = |Psi(x)|^2 per cell plus the total over the lattice.
struct BornProbability {
    std::vector<double> per_cell;
    double total = 0.0;
};

inline BornProbability born_probability(const WaveField& f) {
    BornProbability p;
    p.per_cell.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        p.per_cell[i] = std::norm(f.amp[i]);
        p.total += p.per_cell[i];
    }
    return p;
}

inline double total_probability(const WaveField& f) {
    double t = 0.0;
    for (const cplx& a : f.amp) t += std::norm(a);
    return t;
}

inline cplx inner_product(const WaveField& a, const WaveField& b) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

// Rescale so the total Born probability is exactly 1 (used only at
// construction time; evolution itself never renormalizes).
inline void normalize(WaveField& f) {
    const double t = total_probability(f);
    if (t <= 0.0) return;
    const double s = 1.0 / std::sqrt(t);
    for (cplx& a : f.amp) a *= s;
}

// Summed absolute imaginary part, the I(t) observable of the period and
// spectrum measurements.
inline double imag_mass(const WaveField& f) {
    double s = 0.0;
    for (const cplx& a : f.amp) s += std::abs(a.imag());
    return s;
}

}  // namespace sca
