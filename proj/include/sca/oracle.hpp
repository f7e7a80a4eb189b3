#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sca/grid.hpp"
#include "sca/hamiltonian.hpp"
#include "sca/wavefield.hpp"

namespace sca {

// Dense ground truth for small lattices: full Hamiltonian assembly, exact
// evolution via Hermitian eigendecomposition, Kronecker-form operators, and
// spectral-norm error measurement. Everything here is O(n^2)-O(n^3) and
// capped at n = 4096.

inline constexpr std::size_t kDenseLimit = 4096;

struct DenseOperator {
    std::size_t n = 0;
    std::vector<cplx> e;  // row-major n x n

    DenseOperator() = default;
    explicit DenseOperator(std::size_t dim) : n(dim), e(dim * dim, cplx{0.0, 0.0}) {}

    cplx& at(std::size_t i, std::size_t j) { return e[i * n + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return e[i * n + j]; }

    static DenseOperator identity(std::size_t dim) {
        DenseOperator m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = cplx{1.0, 0.0};
        return m;
    }
};

inline DenseOperator matmul(const DenseOperator& a, const DenseOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("matmul: dimension mismatch");
    DenseOperator c(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t k = 0; k < a.n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < a.n; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

inline std::vector<cplx> matvec(const DenseOperator& a, const std::vector<cplx>& v) {
    if (a.n != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> w(a.n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.n; ++i) {
        cplx s{0.0, 0.0};
        for (std::size_t j = 0; j < a.n; ++j) s += a.at(i, j) * v[j];
        w[i] = s;
    }
    return w;
}

inline DenseOperator dagger(const DenseOperator& a) {
    DenseOperator d(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) d.at(j, i) = std::conj(a.at(i, j));
    return d;
}

inline double max_abs_diff(const DenseOperator& a, const DenseOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.e.size(); ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

inline double hermiticity_error(const DenseOperator& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i; j < a.n; ++j)
            m = std::max(m, std::abs(a.at(i, j) - std::conj(a.at(j, i))));
    return m;
}

inline double unitarity_error(const DenseOperator& u) {
    return max_abs_diff(matmul(dagger(u), u), DenseOperator::identity(u.n));
}

// Cyclic Jacobi eigendecomposition of a Hermitian matrix: H = Q diag(w) Q^dag.
// Each rotation factors the (p,q) plane through a phase that makes the pivot
// real, then applies the standard symmetric Schur rotation. Iterates until
// the off-diagonal Frobenius mass falls below 1e-12 relative to |H|_F.
struct EigenDecomposition {
    std::vector<double> values;
    DenseOperator vectors;  // columns are eigenvectors
};

inline EigenDecomposition jacobi_eig(DenseOperator h) {
    const std::size_t n = h.n;
    if (hermiticity_error(h) > 1e-12)
        throw std::invalid_argument("jacobi_eig: matrix is not Hermitian");
    DenseOperator q = DenseOperator::identity(n);

    double fro = 0.0;
    for (const cplx& x : h.e) fro += std::norm(x);
    fro = std::sqrt(fro);
    const double tol = 1e-12 * std::max(1.0, fro);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * std::norm(h.at(i, j));
        if (std::sqrt(off) <= tol) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t qi = p + 1; qi < n; ++qi) {
                const cplx apq = h.at(p, qi);
                const double r = std::abs(apq);
                if (r <= tol / static_cast<double>(n)) continue;
                const cplx phase = apq / r;  // e^{i phi}
                const double app = h.at(p, p).real();
                const double aqq = h.at(qi, qi).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // W restricted to (p,q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                const cplx w10 = -s * std::conj(phase);
                const cplx w11 = c * std::conj(phase);
                for (std::size_t j = 0; j < n; ++j) {  // H <- W^dag H
                    const cplx hp = h.at(p, j), hq = h.at(qi, j);
                    h.at(p, j) = c * hp + std::conj(w10) * hq;
                    h.at(qi, j) = s * hp + std::conj(w11) * hq;
                }
                for (std::size_t i = 0; i < n; ++i) {  // H <- H W, Q <- Q W
                    const cplx hp = h.at(i, p), hq = h.at(i, qi);
                    h.at(i, p) = c * hp + w10 * hq;
                    h.at(i, qi) = s * hp + w11 * hq;
                    const cplx qp = q.at(i, p), qq = q.at(i, qi);
                    q.at(i, p) = c * qp + w10 * qq;
                    q.at(i, qi) = s * qp + w11 * qq;
                }
            }
        }
    }

    // Eigenpairs sorted by ascending eigenvalue; columns of vectors follow.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return h.at(a, a).real() < h.at(b, b).real(); });

    EigenDecomposition d;
    d.values.resize(n);
    d.vectors = DenseOperator(n);
    for (std::size_t k = 0; k < n; ++k) {
        d.values[k] = h.at(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) d.vectors.at(i, k) = q.at(i, order[k]);
    }
    return d;
}

// Full discrete Hamiltonian in rest-energy units: the sum over axes and
// parities of every embedded pair Hamiltonian. Reflective pairs contribute
// the identity (diagonal kept, coupling severed), matching the wall block.
inline DenseOperator dense_hamiltonian(const Grid& grid, const PhysicalParams& params,
                                       const FieldConfig& fields, double v_scale = 1.0) {
    (void)params;
    if (grid.size() > kDenseLimit)
        throw std::invalid_argument("dense_hamiltonian: lattice too large for the dense path");
    for (double t : fields.theta_override)
        if (t > 0.0)
            throw std::invalid_argument("dense_hamiltonian: theta overrides are not representable");

    DenseOperator h(grid.size());
    for (int axis = 0; axis < grid.ndim(); ++axis) {
        for (int parity = 0; parity < 2; ++parity) {
            const CellPairing pairing = pairings(grid, axis, parity);
            for (const auto& [p, q] : pairing.pairs) {
                if (fields.reflect[p] || fields.reflect[q]) {
                    h.at(p, p) += 1.0;
                    h.at(q, q) += 1.0;
                    continue;
                }
                const BlockHamiltonian bh = block_hamiltonian(p, axis, grid, fields, v_scale);
                h.at(p, p) += bh.c;
                h.at(q, q) += bh.c;
                h.at(p, q) += bh.d;
                h.at(q, p) += std::conj(bh.d);
            }
        }
    }
    return h;
}

// Exact unitary e^{-i theta H} through the eigendecomposition.
inline DenseOperator exact_step(const DenseOperator& h, double theta) {
    const EigenDecomposition d = jacobi_eig(h);
    const std::size_t n = h.n;
    DenseOperator u(n);
    std::vector<cplx> ph(n);
    for (std::size_t k = 0; k < n; ++k) ph[k] = std::exp(cplx{0.0, -theta * d.values[k]});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k)
                s += d.vectors.at(i, k) * ph[k] * std::conj(d.vectors.at(j, k));
            u.at(i, j) = s;
        }
    return u;
}

// One-parity sub-step as a dense unitary, built from the same pair blocks
// the sweep evolution applies.
inline DenseOperator dense_substep(const Grid& grid, const PhysicalParams& params,
                                   const FieldConfig& fields, int axis, int parity,
                                   double v_scale = 1.0) {
    if (grid.size() > kDenseLimit)
        throw std::invalid_argument("dense_substep: lattice too large for the dense path");
    DenseOperator u(grid.size());
    const CellPairing pairing = pairings(grid, axis, parity);
    for (const auto& [p, q] : pairing.pairs) {
        const BlockUnitary b = pair_block(p, q, axis, grid, params, fields, v_scale);
        u.at(p, p) += b.u00;
        u.at(p, q) += b.u01;
        u.at(q, p) += b.u10;
        u.at(q, q) += b.u11;
    }
    return u;
}

// Kronecker product, consistent with row-major vectorization (first factor
// acts on the slower-varying index).
inline DenseOperator kron_operator(const DenseOperator& a, const DenseOperator& b) {
    if (a.n * b.n > kDenseLimit) throw std::invalid_argument("kron_operator: result too large");
    DenseOperator k(a.n * b.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) {
            const cplx aij = a.at(i, j);
            if (aij == cplx{0.0, 0.0}) continue;
            for (std::size_t ib = 0; ib < b.n; ++ib)
                for (std::size_t jb = 0; jb < b.n; ++jb)
                    k.at(i * b.n + ib, j * b.n + jb) = aij * b.at(ib, jb);
        }
    return k;
}

// First-order expansion U = I - i theta (H - 2I) for the free 1D chain.
// Deliberately non-unitary; serves as the negative control.
inline DenseOperator grossing_step(double theta, std::size_t n_cells) {
    if (n_cells > kDenseLimit) throw std::invalid_argument("grossing_step: chain too large");
    DenseOperator u = DenseOperator::identity(n_cells);
    for (std::size_t x = 0; x < n_cells; ++x) {
        u.at(x, (x + 1) % n_cells) += cplx{0.0, theta};
        u.at(x, (x + n_cells - 1) % n_cells) += cplx{0.0, theta};
    }
    return u;
}

// Spectral norm of A - B via power iteration on (A-B)^dag (A-B), relative
// tolerance 1e-6. Deterministic: fixed-seed start vector.
inline double operator_norm_error(const DenseOperator& a, const DenseOperator& b) {
    if (a.n != b.n) throw std::invalid_argument("operator_norm_error: dimension mismatch");
    const std::size_t n = a.n;
    DenseOperator m(n);
    for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] = a.e[i] - b.e[i];
    const DenseOperator md = dagger(m);

    std::mt19937 rng(12345);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<cplx> v(n);
    double vn = 0.0;
    for (cplx& x : v) {
        x = cplx{dist(rng), dist(rng)};
        vn += std::norm(x);
    }
    vn = std::sqrt(vn);
    for (cplx& x : v) x /= vn;

    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        std::vector<cplx> w = matvec(md, matvec(m, v));
        double wn = 0.0;
        for (const cplx& x : w) wn += std::norm(x);
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        const double next = wn;  // |M^dag M v| with |v| = 1
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
        if (it > 0 && std::abs(next - lambda) <= 1e-6 * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(lambda);
}

}  // namespace sca
