#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "sca/waveforms.hpp"

using namespace sca;
using std::numbers::pi;

TEST_CASE("plane wave has uniform magnitude and unit norm") {
    const Grid g({64});
    const WaveField f = plane_wave(g, {pi / 4.0}, {0.0});
    const double mag = 1.0 / 8.0;
    for (const cplx& a : f.amp) CHECK(std::abs(std::abs(a) - mag) < 1e-15);
    CHECK(std::abs(total_probability(f) - 1.0) < 1e-14);
}

TEST_CASE("plane wave phase advances by k per cell") {
    const Grid g({16});
    const double k = pi / 8.0;
    const WaveField f = plane_wave(g, {k}, {0.0});
    for (std::size_t x = 0; x + 1 < 16; ++x) {
        const double step = std::arg(f.amp[x + 1] / f.amp[x]);
        CHECK(step == Catch::Approx(k).margin(1e-14));
    }
}

TEST_CASE("wavenumbers alias modulo 2 pi") {
    const Grid g({32});
    const double k = pi / 5.0;
    const WaveField a = plane_wave(g, {k}, {0.0});
    const WaveField b = plane_wave(g, {k + 2.0 * pi}, {0.0});
    const WaveField c = plane_wave(g, {k - 2.0 * pi}, {0.0});
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(std::abs(a.amp[i] - b.amp[i]) < 1e-12);
        CHECK(std::abs(a.amp[i] - c.amp[i]) < 1e-12);
    }
}

TEST_CASE("plane wave validates argument shapes") {
    const Grid g({8, 8});
    CHECK_THROWS_AS(plane_wave(g, {1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(plane_wave(g, {1.0, 1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("gaussian packet is normalized and centered") {
    const Grid g({400});
    std::string warning;
    const WaveField f = gaussian_packet(g, {pi / 2.0}, {160.0}, {8.0}, &warning);
    CHECK(warning.empty());
    CHECK(std::abs(total_probability(f) - 1.0) < 1e-13);

    const BornProbability p = born_probability(f);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < 400; ++i)
        if (p.per_cell[i] > p.per_cell[peak]) peak = i;
    CHECK(peak == 160u);
}

TEST_CASE("undersampled gaussian raises a warning") {
    const Grid g({64});
    std::string warning;
    gaussian_packet(g, {0.0}, {32.0}, {0.3}, &warning);
    CHECK(!warning.empty());
    CHECK(warning.find("undersampled") != std::string::npos);
}

TEST_CASE("gaussian rejects non-positive widths") {
    const Grid g({16});
    CHECK_THROWS_AS(gaussian_packet(g, {0.0}, {8.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_packet(g, {0.0}, {8.0}, {-2.0}), std::invalid_argument);
}

TEST_CASE("box state realizes standing modes between walls") {
    // Walls at 0 and 17 on an 18-cell ring: interior 1..16, L = 17.
    const Grid g({18});
    const WaveField f = box_state(g, 8.5, 17, 3);
    CHECK(std::abs(f.amp[0]) == 0.0);
    CHECK(std::abs(f.amp[17]) == 0.0);
    CHECK(std::abs(total_probability(f) - 1.0) < 1e-14);

    // n = 3 has n - 1 = 2 interior sign changes.
    int changes = 0;
    for (std::size_t x = 1; x < 16; ++x)
        if (f.amp[x].real() * f.amp[x + 1].real() < 0.0) ++changes;
    CHECK(changes == 2);

    // Matches sin(n pi x / L) on the interior up to normalization.
    const double s1 = std::sin(3.0 * pi * 1.0 / 17.0);
    for (std::size_t x = 1; x <= 16; ++x) {
        const double expect = std::sin(3.0 * pi * static_cast<double>(x) / 17.0);
        CHECK(f.amp[x].real() * s1 == Catch::Approx(f.amp[1].real() * expect).margin(1e-14));
        CHECK(f.amp[x].imag() == 0.0);
    }
}

TEST_CASE("box quantum numbers alias modulo 2L") {
    const Grid g({18});
    const WaveField a = box_state(g, 8.5, 17, 3);
    const WaveField b = box_state(g, 8.5, 17, 3 + 34);
    for (std::size_t i = 0; i < 18; ++i) CHECK(a.amp[i] == b.amp[i]);
}

TEST_CASE("degenerate box modes are rejected") {
    const Grid g({18});
    CHECK_THROWS_AS(box_state(g, 8.5, 17, 17), std::domain_error);  // sin(pi x) = 0 everywhere
    CHECK_THROWS_AS(box_state(g, 8.5, 17, 0), std::domain_error);
}

TEST_CASE("box state validates geometry") {
    const Grid g({18});
    CHECK_THROWS_AS(box_state(g, 8.5, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(box_state(g, 8.5, 40, 1), std::invalid_argument);  // wider than the grid
    CHECK_THROWS_AS(box_state(Grid({8, 8}), 4.0, 4, 1), std::invalid_argument);
}

TEST_CASE("hermite recurrence matches closed forms") {
    CHECK(detail::hermite(0, 0.73) == 1.0);
    CHECK(detail::hermite(1, 0.73) == Catch::Approx(2.0 * 0.73).epsilon(1e-15));
    CHECK(detail::hermite(2, 0.73) == Catch::Approx(4.0 * 0.73 * 0.73 - 2.0).epsilon(1e-14));
    CHECK(detail::hermite(3, -1.1) ==
          Catch::Approx(8.0 * std::pow(-1.1, 3) - 12.0 * (-1.1)).epsilon(1e-14));
}

TEST_CASE("harmonic states have definite parity about the center") {
    const Grid g({400});
    const double x_c = 199.5;
    for (long n : {0L, 1L, 2L, 3L, 7L}) {
        const WaveField f = harmonic_state(g, x_c, 400.0 / 12.0, n);
        CHECK(std::abs(total_probability(f) - 1.0) < 1e-13);
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t x = 0; x < 200; ++x) {
            const std::size_t mirror = 399 - x;
            CHECK(f.amp[x].real() == Catch::Approx(sign * f.amp[mirror].real()).margin(1e-15));
        }
    }
}

TEST_CASE("harmonic ground state peaks at the center cells") {
    const Grid g({400});
    const WaveField f = harmonic_state(g, 199.5, 400.0 / 12.0, 0);
    const BornProbability p = born_probability(f);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < 400; ++i)
        if (p.per_cell[i] > p.per_cell[peak]) peak = i;
    CHECK((peak == 199u || peak == 200u));
}

TEST_CASE("harmonic state rejects bad arguments") {
    const Grid g({400});
    CHECK_THROWS_AS(harmonic_state(g, 199.5, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_state(g, 199.5, 30.0, -1), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_state(g, 199.5, 30.0, 65), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_state(Grid({8, 8}), 4.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("product state combines per-axis factors") {
    const Grid gx({16});
    const Grid gy({12});
    const Grid g2({16, 12});
    const WaveField fx = gaussian_packet(gx, {0.3}, {8.0}, {3.0});
    const WaveField fy = gaussian_packet(gy, {-0.2}, {6.0}, {2.5});
    const WaveField f = product_state(g2, {fx, fy});
    CHECK(std::abs(total_probability(f) - 1.0) < 1e-13);
    for (std::size_t x = 0; x < 16; ++x)
        for (std::size_t y = 0; y < 12; ++y) {
            const cplx expect = fx.amp[x] * fy.amp[y];
            CHECK(std::abs(f.amp[g2.index(x, y)] - expect) < 1e-12);
        }
}

TEST_CASE("product state validates factor extents") {
    const Grid g2({16, 12});
    const WaveField fx = gaussian_packet(Grid({16}), {0.0}, {8.0}, {3.0});
    CHECK_THROWS_AS(product_state(g2, {fx}), std::invalid_argument);
    CHECK_THROWS_AS(product_state(g2, {fx, fx}), std::invalid_argument);
}
