#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "sca/grid.hpp"
#include "sca/hamiltonian.hpp"
#include "sca/wavefield.hpp"

namespace sca {

// Piecewise-linear time dependence of the scalar potential:
//   s(t) = min(max(1 + alpha (t - t_s), 0), s_max),
// applied as v(x) * s(t) and refreshed every `cadence` cycles.
struct Schedule {
    long t_s = 0;
    double alpha = 0.0;
    double s_max = 1.0;
    long cadence = 10;

    double s(long t) const {
        const double raw = 1.0 + alpha * static_cast<double>(t - t_s);
        return std::min(std::max(raw, 0.0), s_max);
    }
};

// Cached per-pair blocks for every (axis, parity) combination plus the
// cycle counter that drives the alternation. Sub-step order within one
// cycle: even cycles run axes X, Y, Z each as even-parity then odd-parity;
// odd cycles run the exact reverse (palindromic ordering), cancelling the
// O(theta^2) splitting error over each cycle pair.
class EvolutionPlan {
public:
    EvolutionPlan(const Grid& grid, const PhysicalParams& params, const FieldConfig& fields)
        : grid_(grid), params_(params), fields_(fields) {
        if (!fields_.congruent(grid_))
            throw std::invalid_argument("EvolutionPlan: fields not congruent with grid");
        for (int a = 0; a < grid_.ndim(); ++a)
            for (int p = 0; p < 2; ++p) pairing_[a][p] = pairings(grid_, a, p);
        rebuild(1.0);
        n_threads_ = threads_from_env();
    }

    const Grid& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    const FieldConfig& fields() const { return fields_; }
    long cycle_count() const { return cycle_; }
    void set_cycle_count(long t) { cycle_ = t; }
    void set_threads(unsigned n) { n_threads_ = std::max(1u, n); }

    // Rebuild all block caches with v(x) scaled by `v_scale`.
    void rebuild(double v_scale) {
        v_scale_ = v_scale;
        for (int a = 0; a < grid_.ndim(); ++a) {
            for (int p = 0; p < 2; ++p) {
                const auto& cp = pairing_[a][p];
                auto& blocks = blocks_[a][p];
                blocks.resize(cp.pairs.size());
                for (std::size_t i = 0; i < cp.pairs.size(); ++i)
                    blocks[i] = pair_block(cp.pairs[i].first, cp.pairs[i].second, a, grid_,
                                           params_, fields_, v_scale);
            }
        }
    }

    // Replace fields (same grid) and invalidate the cache.
    void set_fields(const FieldConfig& fields) {
        if (!fields.congruent(grid_))
            throw std::invalid_argument("EvolutionPlan: fields not congruent with grid");
        fields_ = fields;
        rebuild(v_scale_);
    }

    // One staggered sub-step, in place. Pairs are disjoint, so the loop is
    // data-parallel; the parallel split keeps per-pair arithmetic identical
    // to the serial order, hence bitwise deterministic results.
    void substep(WaveField& f, int axis, int parity) const {
        const auto& cp = pairing_[axis][parity];
        const auto& blocks = blocks_[axis][parity];
        const std::size_t n = cp.pairs.size();
        const unsigned workers =
            (n_threads_ > 1 && n >= 8192) ? std::min<unsigned>(n_threads_, 64) : 1;
        if (workers == 1) {
            apply_range(f, cp, blocks, 0, n);
            return;
        }
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] { apply_range(f, cp, blocks, lo, hi); });
        }
        for (auto& th : pool) th.join();
    }

    // One full cycle; the counter selects the sub-step order.
    void step(WaveField& f) {
        if (cycle_ % 2 == 0) {
            for (int a = 0; a < grid_.ndim(); ++a) {
                substep(f, a, 0);
                substep(f, a, 1);
            }
        } else {
            for (int a = grid_.ndim() - 1; a >= 0; --a) {
                substep(f, a, 1);
                substep(f, a, 0);
            }
        }
        ++cycle_;
    }

    // Evolve n_cycles, emitting deep-copy snapshots every `snapshot_every`
    // cycles (including t = 0 when a hook is given). A schedule rebuilds the
    // cache with v(x) s(t) every `cadence` cycles.
    void run(WaveField& f, long n_cycles, long snapshot_every = 0,
             const std::function<void(long, const WaveField&)>& hook = nullptr,
             const Schedule* schedule = nullptr) {
        if (hook && snapshot_every > 0 && cycle_ == 0) hook(0, f);
        double s_cur = v_scale_;
        for (long i = 0; i < n_cycles; ++i) {
            if (schedule && cycle_ % schedule->cadence == 0) {
                const double s = schedule->s(cycle_);
                if (s != s_cur) {
                    rebuild(s);
                    s_cur = s;
                }
            }
            step(f);
            if (hook && snapshot_every > 0 && cycle_ % snapshot_every == 0) hook(cycle_, f);
        }
    }

    static unsigned threads_from_env() {
        if (const char* env = std::getenv("SCA_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
        }
        return 1;
    }

private:
    static void apply_range(WaveField& f, const CellPairing& cp,
                            const std::vector<BlockUnitary>& blocks, std::size_t lo,
                            std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto [p, q] = cp.pairs[i];
            const BlockUnitary& u = blocks[i];
            const cplx a = f.amp[p];
            const cplx b = f.amp[q];
            f.amp[p] = u.u00 * a + u.u01 * b;
            f.amp[q] = u.u10 * a + u.u11 * b;
        }
    }

    Grid grid_;
    PhysicalParams params_;
    FieldConfig fields_;
    CellPairing pairing_[3][2];
    std::vector<BlockUnitary> blocks_[3][2];
    long cycle_ = 0;
    double v_scale_ = 1.0;
    unsigned n_threads_ = 1;
};

}  // namespace sca
