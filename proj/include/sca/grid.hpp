#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sca {

// Periodic lattice geometry in 1, 2 or 3 dimensions.
//
// Index order is row-major with the last axis fastest:
//   1D: idx = x
//   2D: idx = x*Ny + y
//   3D: idx = (x*Ny + y)*Nz + z
// Every axis size must be even (staggered pairing needs it) and >= 4.
// The lattice is always topologically periodic; hard walls are made from
// reflector cells, not from a boundary-condition switch.
class Grid {
public:
    Grid() = default;

    explicit Grid(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.empty() || sizes_.size() > 3)
            throw std::invalid_argument("Grid: ndim must be 1, 2 or 3");
        size_ = 1;
        for (std::size_t n : sizes_) {
            if (n < 4 || n % 2 != 0)
                throw std::invalid_argument("Grid: every axis size must be even and >= 4");
            size_ *= n;
        }
        strides_.assign(sizes_.size(), 1);
        for (int a = static_cast<int>(sizes_.size()) - 2; a >= 0; --a)
            strides_[a] = strides_[a + 1] * sizes_[a + 1];
    }

    int ndim() const { return static_cast<int>(sizes_.size()); }
    std::size_t size() const { return size_; }
    std::size_t extent(int axis) const { return sizes_.at(axis); }
    std::size_t stride(int axis) const { return strides_.at(axis); }
    const std::vector<std::size_t>& extents() const { return sizes_; }

    std::size_t index(std::size_t x) const { return x; }
    std::size_t index(std::size_t x, std::size_t y) const { return x * strides_[0] + y; }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x * strides_[0] + y * strides_[1] + z;
    }

    std::size_t index_of(const std::vector<std::size_t>& c) const {
        std::size_t idx = 0;
        for (int a = 0; a < ndim(); ++a) idx += c.at(a) * strides_[a];
        return idx;
    }

    std::array<std::size_t, 3> coords(std::size_t idx) const {
        std::array<std::size_t, 3> c{0, 0, 0};
        for (int a = 0; a < ndim(); ++a) {
            c[a] = idx / strides_[a];
            idx %= strides_[a];
        }
        return c;
    }

    bool operator==(const Grid& o) const { return sizes_ == o.sizes_; }

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

// One staggered pairing: all (cell, partner) pairs along `axis` with the
// given parity. Even parity couples (2x, 2x+1); odd parity couples
// (2x+1, (2x+2) mod N) with wraparound. Each cell appears exactly once.
struct CellPairing {
    int axis = 0;
    int parity = 0;  // 0 even, 1 odd
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Deterministic ordering: ascending line index, then ascending pair index
// along the axis. The pairing partitions the lattice for either parity.
inline CellPairing pairings(const Grid& grid, int axis, int parity) {
    if (axis < 0 || axis >= grid.ndim())
        throw std::invalid_argument("pairings: axis out of range for this grid");
    if (parity != 0 && parity != 1) throw std::invalid_argument("pairings: parity must be 0 or 1");

    CellPairing cp;
    cp.axis = axis;
    cp.parity = parity;
    const std::size_t n_axis = grid.extent(axis);
    const std::size_t stride = grid.stride(axis);
    const std::size_t n_lines = grid.size() / n_axis;
    cp.pairs.reserve(grid.size() / 2);

    // Enumerate base indices of all lines along `axis`: every lattice index
    // whose axis coordinate is zero, in ascending order.
    for (std::size_t line = 0; line < n_lines; ++line) {
        // Decompose `line` over the remaining axes (row-major, last fastest).
        std::size_t base = 0, rem = line;
        for (int a = grid.ndim() - 1; a >= 0; --a) {
            if (a == axis) continue;
            base += (rem % grid.extent(a)) * grid.stride(a);
            rem /= grid.extent(a);
        }
        for (std::size_t p = 0; p < n_axis; p += 2) {
            const std::size_t xa = p + static_cast<std::size_t>(parity);
            const std::size_t xb = (xa + 1) % n_axis;
            cp.pairs.emplace_back(base + xa * stride, base + xb * stride);
        }
    }
    return cp;
}

}  // namespace sca
