#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sca/evolution.hpp"
#include "sca/fft.hpp"
#include "sca/grid.hpp"
#include "sca/hamiltonian.hpp"
#include "sca/wavefield.hpp"
#include "sca/waveforms.hpp"

namespace sca {

// ---------------------------------------------------------------- theory

// Two-term phase velocity (4 theta / k) sin^2(k/2) + (4 theta^3 / 3k) cos k sin^2 k.
inline double phase_velocity_theory(double theta, double k) {
    const double kr = std::remainder(k, 2.0 * std::numbers::pi);
    if (kr == 0.0) throw std::domain_error("phase_velocity_theory: undefined at k = 0");
    const double s2 = std::sin(kr / 2.0) * std::sin(kr / 2.0);
    const double sk = std::sin(kr);
    return 4.0 * theta / kr * s2 + 4.0 * theta * theta * theta / (3.0 * kr) * std::cos(kr) * sk * sk;
}

inline double base_phase_velocity(double theta, double k) {
    const double kr = std::remainder(k, 2.0 * std::numbers::pi);
    if (kr == 0.0) throw std::domain_error("base_phase_velocity: undefined at k = 0");
    const double s2 = std::sin(kr / 2.0) * std::sin(kr / 2.0);
    return 4.0 * theta / kr * s2;
}

// Leading relative deviation of v_p from its theta -> 0 limit. This is the
// ratio of the theta^3 correction to the base term of the expansion; exact
// eigenphases of the two-cycle operator confirm the 1/3 coefficient.
inline double relative_vp_error(double theta, double k) {
    const double kr = std::remainder(k, 2.0 * std::numbers::pi);
    if (kr == 0.0) throw std::domain_error("relative_vp_error: undefined at k = 0");
    const double sk = std::sin(kr);
    const double sh = std::sin(kr / 2.0);
    return theta * theta * std::cos(kr) * sk * sk / (3.0 * sh * sh);
}

// Lattice dispersion omega(theta, k) = k v_p(theta, k), both expansion terms.
inline double dispersion_omega(double theta, double k) {
    const double s2 = std::sin(k / 2.0) * std::sin(k / 2.0);
    const double sk = std::sin(k);
    return 4.0 * theta * s2 + 4.0 / 3.0 * theta * theta * theta * std::cos(k) * sk * sk;
}

// d omega / d k: 2 theta sin k + (4/3) theta^3 (2 sin k cos^2 k - sin^3 k).
inline double group_velocity_theory(double theta, double k) {
    const double sk = std::sin(k);
    const double ck = std::cos(k);
    return 2.0 * theta * sk +
           4.0 / 3.0 * theta * theta * theta * (2.0 * sk * ck * ck - sk * sk * sk);
}

// Continuum infinite-well level n^2 pi^2 theta / L^2.
inline double well_energy(long n, long L, double theta) {
    if (n < 0) throw std::domain_error("well_energy: n must be >= 0");
    const double np = static_cast<double>(n) * std::numbers::pi / static_cast<double>(L);
    return np * np * theta;
}

// Lattice well level: the dispersion evaluated at k = n pi / L. Symmetric
// about n = L and 2L-periodic in n by construction.
inline double well_energy_dispersion(long n, long L, double theta) {
    if (n < 0) throw std::domain_error("well_energy_dispersion: n must be >= 0");
    return dispersion_omega(theta, static_cast<double>(n) * std::numbers::pi /
                                       static_cast<double>(L));
}

inline double oscillator_omega(double theta, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("oscillator_omega: rho must be positive");
    return 2.0 * theta / (rho * rho);
}

// Leading term of the lattice oscillator level spacing, quasi-periodic in n.
inline double oscillator_omega_asymptotic(double theta, double rho, long n) {
    if (!(rho > 0.0)) throw std::domain_error("oscillator_omega_asymptotic: rho must be positive");
    const double s = std::sin(std::sqrt(static_cast<double>(n) / 2.0) / rho);
    return 4.0 * theta * s * s;
}

// Fraunhofer references for a double slit: separation d, slit width b.
inline double fraunhofer_narrow(double d, double lambda, double sin_phi) {
    const double c = std::cos(std::numbers::pi * d * sin_phi / lambda);
    return c * c;
}

inline double fraunhofer_wide(double d, double b, double lambda, double sin_phi) {
    const double z = std::numbers::pi * b * sin_phi / lambda;
    const double sinc = z == 0.0 ? 1.0 : std::sin(z) / z;
    return fraunhofer_narrow(d, lambda, sin_phi) * sinc;
}

// ----------------------------------------------------------- measurements

struct VelocityReport {
    double v_p = 0.0;
    double v_g = 0.0;
    double k = 0.0;
    double theta = 0.0;
};

namespace detail {

inline double measured_wavenumber(const WaveField& f) {
    const std::size_t n = f.grid.extent(0);
    cplx corr{0.0, 0.0};
    for (std::size_t x = 0; x < n; ++x) corr += std::conj(f.amp[x]) * f.amp[(x + 1) % n];
    return std::arg(corr);
}

inline double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - mt) * (y[i] - my);
        den += (t[i] - mt) * (t[i] - mt);
    }
    if (den == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return num / den;
}

}  // namespace detail

// Phase velocity from plane-wave snapshots a fixed even number of cycles
// apart: omega from the argument of the temporal cross-correlation, k from
// the spatial shift correlation of the first snapshot.
inline double measure_phase_velocity(const std::vector<WaveField>& snaps, int cycle_stride) {
    if (snaps.size() < 2) throw std::invalid_argument("measure_phase_velocity: need >= 2 snapshots");
    if (cycle_stride <= 0 || cycle_stride % 2 != 0)
        throw std::invalid_argument("measure_phase_velocity: snapshot stride must be even");
    if (snaps[0].grid.ndim() != 1)
        throw std::invalid_argument("measure_phase_velocity: 1D snapshots only");

    double mean = 0.0, var = 0.0;
    for (const cplx& a : snaps[0].amp) mean += std::abs(a);
    mean /= static_cast<double>(snaps[0].amp.size());
    for (const cplx& a : snaps[0].amp) {
        const double dev = std::abs(a) - mean;
        var += dev * dev;
    }
    var /= static_cast<double>(snaps[0].amp.size());
    if (mean == 0.0 || std::sqrt(var) / mean > 1e-6)
        throw std::invalid_argument("measure_phase_velocity: input is not a plane wave");

    const double k = detail::measured_wavenumber(snaps[0]);
    if (k == 0.0) throw std::invalid_argument("measure_phase_velocity: k = 0");
    double omega_sum = 0.0;
    for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
        const cplx c = inner_product(snaps[i], snaps[i + 1]);
        omega_sum += -std::arg(c) / static_cast<double>(cycle_stride);
    }
    const double omega = omega_sum / static_cast<double>(snaps.size() - 1);
    return omega / k;
}

// Envelope center of a 1D packet: probability centroid within +/- 3 sigma_est
// of the argmax, sigma_est from the circular second moment near the peak.
inline double envelope_center(const WaveField& f) {
    if (f.grid.ndim() != 1) throw std::invalid_argument("envelope_center: 1D fields only");
    const std::size_t n = f.grid.extent(0);
    std::vector<double> p(n);
    std::size_t jmax = 0;
    for (std::size_t x = 0; x < n; ++x) {
        p[x] = std::norm(f.amp[x]);
        if (p[x] > p[jmax]) jmax = x;
    }
    const auto wrap = [&](long d) {
        const long m = (static_cast<long>(jmax) + d) % static_cast<long>(n);
        return p[static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m)];
    };
    const long half = static_cast<long>(n) / 4;
    double m0 = 0.0, m2 = 0.0;
    for (long d = -half; d <= half; ++d) {
        m0 += wrap(d);
        m2 += wrap(d) * static_cast<double>(d) * static_cast<double>(d);
    }
    if (m0 == 0.0) throw std::invalid_argument("envelope_center: empty field");
    const double sigma = std::sqrt(m2 / m0);
    const long w3 = std::max<long>(2, static_cast<long>(std::ceil(3.0 * sigma)));
    double c0 = 0.0, c1 = 0.0;
    for (long d = -w3; d <= w3; ++d) {
        c0 += wrap(d);
        c1 += wrap(d) * static_cast<double>(d);
    }
    return static_cast<double>(jmax) + c1 / c0;
}

// Group velocity from packet snapshots at the given cycle times: envelope
// centers, unwrapped across the periodic boundary, fitted linearly in time.
inline double measure_group_velocity(const std::vector<WaveField>& snaps,
                                     const std::vector<double>& cycle_times) {
    if (snaps.size() < 2 || snaps.size() != cycle_times.size())
        throw std::invalid_argument("measure_group_velocity: need matching snapshots and times");
    const double n = static_cast<double>(snaps[0].grid.extent(0));
    std::vector<double> pos(snaps.size());
    pos[0] = envelope_center(snaps[0]);
    for (std::size_t i = 1; i < snaps.size(); ++i) {
        const double c = envelope_center(snaps[i]);
        double delta = std::remainder(c - std::fmod(pos[i - 1], n), n);
        if (std::abs(delta) >= 0.45 * n)
            throw std::runtime_error(
                "measure_group_velocity: displacement ambiguous (packet wrapped too far)");
        pos[i] = pos[i - 1] + delta;
    }
    return detail::fit_slope(cycle_times, pos);
}

inline std::vector<double> imag_mass_series(const std::vector<WaveField>& snaps) {
    std::vector<double> out(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) out[i] = imag_mass(snaps[i]);
    return out;
}

// ------------------------------------------------- period from I(t) minima

struct PeriodReport {
    std::vector<double> minima_times;
    std::vector<double> intervals;    // t_i between successive minima
    std::vector<double> cumulative;   // T_i = sum of t_j for j <= i
    std::vector<double> omega;        // omega_i = pi / t_i
    double mean_interval = 0.0;
    double period = 0.0;              // 2 * mean interval (I oscillates twice per period)
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

// Minima of an I(t)-like series. Pipeline: 5-point median smoothing; strict
// local minima with plateau collapse; a depth gate at the lower half of the
// smoothed range (rejects micro-ripple dips on the broad maxima); V-flank
// line-intersection refinement on the raw series; finally sub-dips closer
// than half the median interval merge into their deepest member.
inline std::vector<double> minima_times(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 5) return {};
    std::vector<double> sm(series);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        std::array<double, 5> w{series[i - 2], series[i - 1], series[i], series[i + 1],
                                series[i + 2]};
        std::nth_element(w.begin(), w.begin() + 2, w.end());
        sm[i] = w[2];
    }
    const double lo = detail::percentile(sm, 5.0);
    const double hi = detail::percentile(sm, 95.0);
    const double depth = lo + 0.5 * (hi - lo);

    std::vector<double> ts;
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && sm[j + 1] == sm[i]) ++j;
        if (j + 1 < n && sm[i - 1] > sm[i] && sm[j + 1] > sm[j] && sm[i] <= depth) {
            const std::size_t c = (i + j) / 2;
            const std::size_t wlo = c >= 3 ? c - 3 : 0;
            const std::size_t whi = std::min(c + 4, n);
            std::size_t b = wlo;
            for (std::size_t t = wlo; t < whi; ++t)
                if (series[t] < series[b]) b = t;
            if (b >= 2 && b + 2 < n) {
                const double sl = series[b - 1] - series[b - 2];
                const double sr = series[b + 2] - series[b + 1];
                if (sl < 0.0 && sr > 0.0) {
                    const double t0 = ((series[b + 1] - series[b - 1]) +
                                       sl * static_cast<double>(b - 1) -
                                       sr * static_cast<double>(b + 1)) /
                                      (sl - sr);
                    ts.push_back(std::abs(t0 - static_cast<double>(b)) <= 2.0
                                     ? t0
                                     : static_cast<double>(b));
                } else {
                    ts.push_back(static_cast<double>(b));
                }
            } else {
                ts.push_back(static_cast<double>(c));
            }
        }
        i = j + 1;
    }

    if (ts.size() >= 3) {
        std::vector<double> gaps(ts.size() - 1);
        for (std::size_t g = 0; g + 1 < ts.size(); ++g) gaps[g] = ts[g + 1] - ts[g];
        const double med = detail::median(gaps);
        std::vector<double> merged;
        std::size_t k = 0;
        while (k < ts.size()) {
            std::size_t best = k;
            double last = ts[k];
            while (k + 1 < ts.size() && ts[k + 1] - last < 0.5 * med) {
                ++k;
                last = ts[k];
                const auto raw = [&](double t) {
                    return series[static_cast<std::size_t>(std::lround(t))];
                };
                if (raw(ts[k]) < raw(ts[best])) best = k;
            }
            merged.push_back(ts[best]);
            ++k;
        }
        ts = std::move(merged);
    }
    return ts;
}

inline PeriodReport period_from_minima(const std::vector<double>& series) {
    PeriodReport rep;
    rep.minima_times = minima_times(series);
    if (rep.minima_times.size() < 3)
        throw std::runtime_error("period_from_minima: spectrum too polluted, fewer than 3 minima");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rep.minima_times.size(); ++i) {
        const double dt = rep.minima_times[i + 1] - rep.minima_times[i];
        acc += dt;
        rep.intervals.push_back(dt);
        rep.cumulative.push_back(acc);
        rep.omega.push_back(std::numbers::pi / dt);
    }
    rep.mean_interval = acc / static_cast<double>(rep.intervals.size());
    rep.period = 2.0 * rep.mean_interval;
    return rep;
}

// --------------------------------------------------------- kappa tuning

struct TuneResult {
    double kappa = 0.0;
    double residual = 0.0;
};

namespace detail {

// Stationarity residual: max over ~one period of the L1 distance between
// the evolving and the initial probability profile.
inline double stationarity_residual(const Grid& grid, double theta, double rho, long n,
                                    double kappa, long period_est) {
    const std::size_t nx = grid.extent(0);
    const double x_c = (static_cast<double>(nx) - 1.0) / 2.0;
    FieldConfig fields(grid);
    for (std::size_t x = 0; x < nx; ++x) {
        const double u = static_cast<double>(x) - x_c;
        fields.v[x] = 0.5 * kappa * u * u / theta;  // absolute -> rest-energy units
    }
    EvolutionPlan plan(grid, PhysicalParams{theta}, fields);
    WaveField f = harmonic_state(grid, x_c, rho, n);
    std::vector<double> p0(nx);
    for (std::size_t x = 0; x < nx; ++x) p0[x] = std::norm(f.amp[x]);
    double r = 0.0;
    for (long t = 0; t < period_est; ++t) {
        plan.step(f);
        if (t % 8 == 0) {
            double acc = 0.0;
            for (std::size_t x = 0; x < nx; ++x) acc += std::abs(std::norm(f.amp[x]) - p0[x]);
            r = std::max(r, acc);
        }
    }
    return r;
}

}  // namespace detail

// Golden-section search for the spring constant (absolute lattice units)
// that makes harmonic_state(n) stationary. The bracket is [guess/2, 2 guess];
// a non-unimodal residual across the bracket is rejected.
inline TuneResult tune_kappa(const Grid& grid, double theta, double rho, long n, double guess) {
    if (grid.ndim() != 1) throw std::invalid_argument("tune_kappa: 1D grids only");
    if (!(guess > 0.0)) throw std::invalid_argument("tune_kappa: guess must be positive");
    const double omega_n = (static_cast<double>(n) + 0.5) * oscillator_omega(theta, rho);
    const long period_est = static_cast<long>(2.0 * std::numbers::pi / omega_n);

    const auto res = [&](double kappa) {
        return detail::stationarity_residual(grid, theta, rho, n, kappa, period_est);
    };

    double a = 0.5 * guess, b = 2.0 * guess;
    const double ra = res(a), rg = res(guess), rb = res(b);
    if (!(ra > rg && rg < rb)) {
        std::ostringstream os;
        os << "tune_kappa: residual not unimodal in bracket: R(" << a << ")=" << ra << " R("
           << guess << ")=" << rg << " R(" << b << ")=" << rb;
        throw std::runtime_error(os.str());
    }

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = res(c), fd = res(d);
    while (b - a > 0.01 * a) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = res(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = res(d);
        }
    }
    TuneResult out;
    out.kappa = 0.5 * (a + b);
    out.residual = res(out.kappa);
    return out;
}

// ------------------------------------------------------------ diffraction

struct DiffractionReport {
    std::vector<double> y;
    std::vector<double> intensity;   // normalized over the 3-peak window
    std::vector<double> sin_phi;
    std::vector<double> narrow_ref;  // cos^2, jointly normalized
    std::vector<double> wide_ref;    // cos^2 * sinc, jointly normalized
    double d = 0.0, b = 0.0, lambda = 0.0;
    double x_star = 0.0, x_screen = 0.0, y_mid = 0.0;
    std::size_t win_lo = 0, win_hi = 0;  // [win_lo, win_hi) = 3 central peaks
    // Intensity centroid over the central lobe |sin phi| <= lambda / (2 d).
    // A comb displacement under a smooth envelope cancels out of a wide
    // window centroid; the central lobe tracks it almost bodily.
    double centroid = 0.0;
};

// Builds the report from an intensity row sampled (or accumulated over
// time) at column x_star. Observed and reference curves are each
// normalized to unit integral over the three central peaks
// |sin phi| <= 1.5 lambda / d.
inline DiffractionReport diffraction_report_from_row(const std::vector<double>& row,
                                                     double x_star, double x_screen,
                                                     double y_mid, double d, double b,
                                                     double lambda) {
    const std::size_t ny = row.size();
    if (ny < 3) throw std::invalid_argument("diffraction_report_from_row: row too short");
    const double dist = x_star - x_screen;
    if (dist <= 0.0)
        throw std::invalid_argument(
            "diffraction_report_from_row: column must lie beyond the screen");

    DiffractionReport rep;
    rep.d = d;
    rep.b = b;
    rep.lambda = lambda;
    rep.x_star = x_star;
    rep.x_screen = x_screen;
    rep.y_mid = y_mid;
    rep.y.resize(ny);
    rep.intensity = row;
    rep.sin_phi.resize(ny);
    rep.narrow_ref.resize(ny);
    rep.wide_ref.resize(ny);

    double total = 0.0;
    for (std::size_t yy = 0; yy < ny; ++yy) {
        const double dy = static_cast<double>(yy) - y_mid;
        rep.y[yy] = static_cast<double>(yy);
        rep.sin_phi[yy] = dy / std::hypot(dy, dist);
        rep.narrow_ref[yy] = fraunhofer_narrow(d, lambda, rep.sin_phi[yy]);
        rep.wide_ref[yy] = fraunhofer_wide(d, b, lambda, rep.sin_phi[yy]);
        total += rep.intensity[yy];
    }
    if (total <= 0.0)
        throw std::runtime_error(
            "diffraction_report_from_row: slice is empty, wave has not reached the column");

    const double span = 1.5 * lambda / d;
    std::size_t lo = ny, hi = 0;
    for (std::size_t yy = 0; yy < ny; ++yy) {
        if (std::abs(rep.sin_phi[yy]) <= span) {
            lo = std::min(lo, yy);
            hi = std::max(hi, yy + 1);
        }
    }
    if (lo >= hi)
        throw std::runtime_error("diffraction_report_from_row: normalization window is empty");
    rep.win_lo = lo;
    rep.win_hi = hi;

    double si = 0.0, sn = 0.0, sw = 0.0;
    for (std::size_t yy = lo; yy < hi; ++yy) {
        si += rep.intensity[yy];
        sn += rep.narrow_ref[yy];
        sw += rep.wide_ref[yy];
    }
    if (si <= 0.0)
        throw std::runtime_error(
            "diffraction_report_from_row: no intensity inside the central window");
    for (std::size_t yy = 0; yy < ny; ++yy) {
        rep.intensity[yy] /= si;
        rep.narrow_ref[yy] /= sn;
        rep.wide_ref[yy] /= sw;
    }
    double cy = 0.0, cm = 0.0;
    const double lobe = 0.5 * lambda / d;
    for (std::size_t yy = lo; yy < hi; ++yy) {
        if (std::abs(rep.sin_phi[yy]) > lobe) continue;
        cy += rep.y[yy] * rep.intensity[yy];
        cm += rep.intensity[yy];
    }
    if (cm <= 0.0)
        throw std::runtime_error("diffraction_report_from_row: central lobe has no intensity");
    rep.centroid = cy / cm;
    return rep;
}

// Instantaneous intensity slice at column x_star of a 2D field.
inline DiffractionReport diffraction_slice(const WaveField& f, std::size_t x_star,
                                           double x_screen, double y_mid, double d, double b,
                                           double lambda) {
    if (f.grid.ndim() != 2) throw std::invalid_argument("diffraction_slice: 2D fields only");
    if (x_star >= f.grid.extent(0)) throw std::invalid_argument("diffraction_slice: column outside grid");
    const std::size_t ny = f.grid.extent(1);
    std::vector<double> row(ny);
    for (std::size_t yy = 0; yy < ny; ++yy) row[yy] = std::norm(f.amp[f.grid.index(x_star, yy)]);
    return diffraction_report_from_row(row, static_cast<double>(x_star), x_screen, y_mid, d, b,
                                       lambda);
}

// Strict local minima of the observed slice inside the normalization window,
// parabolically refined. Fringe minima sit near zero, so candidates above a
// quarter of the window maximum are ignored.
inline std::vector<double> slice_minima(const DiffractionReport& rep) {
    std::vector<double> out;
    double mx = 0.0;
    for (std::size_t yy = rep.win_lo; yy < rep.win_hi; ++yy)
        mx = std::max(mx, rep.intensity[yy]);
    for (std::size_t yy = std::max<std::size_t>(rep.win_lo, 1); yy + 1 < rep.win_hi; ++yy) {
        const double y0 = rep.intensity[yy - 1], y1 = rep.intensity[yy], y2 = rep.intensity[yy + 1];
        if (y1 < y0 && y1 < y2 && y1 <= 0.25 * mx) {
            const double den = y0 - 2.0 * y1 + y2;
            const double off = den > 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
            out.push_back(static_cast<double>(yy) + off);
        }
    }
    return out;
}

// ----------------------------------------------------- eigenfrequency probe

// Frequency of a near-eigenstate: the global-phase drift of <f(0)|f(t)>,
// accumulated every 2 cycles with unwrapping. Robust where I(t) minima
// alias against the cycle grid (short-period modes).
inline double measure_phase_drift(EvolutionPlan& plan, WaveField f, long n_cycles) {
    if (n_cycles < 2 || n_cycles % 2 != 0)
        throw std::invalid_argument("measure_phase_drift: need a positive even cycle count");
    const WaveField f0 = f;
    cplx prev = inner_product(f0, f);
    double drift = 0.0;
    for (long t = 0; t < n_cycles; t += 2) {
        plan.step(f);
        plan.step(f);
        const cplx cur = inner_product(f0, f);
        if (std::abs(cur) < 1e-6 || std::abs(prev) < 1e-6)
            throw std::runtime_error("measure_phase_drift: overlap lost, not an eigenstate");
        drift += std::arg(cur / prev);
        prev = cur;
    }
    return -drift / static_cast<double>(n_cycles);
}

}  // namespace sca
