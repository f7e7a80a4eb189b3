#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sca/grid.hpp"
#include "sca/hamiltonian.hpp"
#include "sca/wavefield.hpp"

namespace sca {

// Full-precision decimal for all numeric text output: 17 significant digits
// round-trip any double exactly.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void put_u8(std::ostream& os, std::uint8_t v) {
    os.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::ostream& os, double v) {
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline std::uint8_t get_u8(std::istream& is) {
    const int c = is.get();
    if (c < 0) throw std::runtime_error("unexpected end of file");
    return static_cast<std::uint8_t>(c);
}

inline std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(is)) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_u8(is)) << (8 * i);
    return v;
}

inline double get_f64(std::istream& is) {
    return std::bit_cast<double>(get_u64(is));
}

inline void put_magic(std::ostream& os, const char (&m)[5]) {
    os.write(m, 4);
}

inline void check_magic(std::istream& is, const char (&m)[5], const char* what) {
    char got[4];
    is.read(got, 4);
    if (!is || got[0] != m[0] || got[1] != m[1] || got[2] != m[2] || got[3] != m[3])
        throw std::runtime_error(std::string(what) + ": bad magic");
}

inline Grid read_grid_header(std::istream& is) {
    const std::uint8_t nd = get_u8(is);
    std::vector<std::size_t> dims(nd);
    for (auto& d : dims) d = static_cast<std::size_t>(get_u64(is));
    return Grid(dims);
}

}  // namespace detail

// Amplitude dump: magic "SCAG", u32 version, u8 ndim, u64 axis sizes, then
// row-major little-endian (re, im) float64 pairs. Bit-exact round trip.
inline void write_field_dump(const std::filesystem::path& path, const WaveField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    detail::put_magic(os, "SCAG");
    detail::put_u32(os, 1);
    detail::put_u8(os, static_cast<std::uint8_t>(f.grid.ndim()));
    for (int a = 0; a < f.grid.ndim(); ++a) detail::put_u64(os, f.grid.extent(a));
    for (const cplx& c : f.amp) {
        detail::put_f64(os, c.real());
        detail::put_f64(os, c.imag());
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline WaveField read_field_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    detail::check_magic(is, "SCAG", "field dump");
    const std::uint32_t version = detail::get_u32(is);
    if (version != 1) throw std::runtime_error("field dump: unsupported version");
    WaveField f(detail::read_grid_header(is));
    for (cplx& c : f.amp) {
        const double re = detail::get_f64(is);
        const double im = detail::get_f64(is);
        c = cplx{re, im};
    }
    if (!is) throw std::runtime_error("field dump: truncated");
    return f;
}

// Field configuration sidecar: magic "SCAF", header as above, then per cell
// v, g_x, g_y, g_z, theta_override as float64 and a reflect byte.
inline void write_fields_dump(const std::filesystem::path& path, const FieldConfig& fields,
                              const Grid& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    detail::put_magic(os, "SCAF");
    detail::put_u32(os, 1);
    detail::put_u8(os, static_cast<std::uint8_t>(grid.ndim()));
    for (int a = 0; a < grid.ndim(); ++a) detail::put_u64(os, grid.extent(a));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        detail::put_f64(os, fields.v[i]);
        for (int a = 0; a < grid.ndim(); ++a) detail::put_f64(os, fields.g[a][i]);
        detail::put_f64(os, fields.theta_override[i]);
        detail::put_u8(os, fields.reflect[i] ? 1 : 0);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

struct FieldsDump {
    Grid grid;
    FieldConfig fields;
};

inline FieldsDump read_fields_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    detail::check_magic(is, "SCAF", "fields dump");
    if (detail::get_u32(is) != 1) throw std::runtime_error("fields dump: unsupported version");
    Grid grid = detail::read_grid_header(is);
    FieldConfig fields(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        fields.v[i] = detail::get_f64(is);
        for (int a = 0; a < grid.ndim(); ++a) fields.g[a][i] = detail::get_f64(is);
        fields.theta_override[i] = detail::get_f64(is);
        fields.reflect[i] = detail::get_u8(is) != 0;
    }
    if (!is) throw std::runtime_error("fields dump: truncated");
    return FieldsDump{std::move(grid), std::move(fields)};
}

// Two-column CSV trace, e.g. cycle index vs a scalar observable.
inline void write_trace_csv(const std::filesystem::path& path, const std::string& value_name,
                            const std::vector<double>& values) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "cycle," << value_name << "\n";
    for (std::size_t t = 0; t < values.size(); ++t) os << t << "," << fmt17(values[t]) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline std::vector<double> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trace csv: empty file");
    std::vector<double> values;
    while (std::getline(is, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("trace csv: malformed row");
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return values;
}

// ----------------------------------------------------------------- images

struct Image {
    std::size_t width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, top row first

    void set(std::size_t col, std::size_t row, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const std::size_t i = 3 * (row * width + col);
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
};

enum class RenderMode { prob, real };

namespace detail {

inline std::uint8_t lerp8(double t, double a, double b) {
    return static_cast<std::uint8_t>(a + t * (b - a) + 0.5);
}

}  // namespace detail

// Heatmap of a 2D field. prob: light-blue-to-white ramp of |Psi|^2 (gamma-
// compressed, qualitative); real: diverging blue-white-red of Re(Psi).
// Overlays when fields are given: reflectors black, potential and modified-
// theta regions gray. Pixel rows run from high y to low (origin bottom-left).
inline Image render_heatmap(const WaveField& f, RenderMode mode,
                            const FieldConfig* fields = nullptr) {
    if (f.grid.ndim() != 2) throw std::invalid_argument("render_heatmap: 2D fields only");
    const std::size_t nx = f.grid.extent(0), ny = f.grid.extent(1);
    Image img;
    img.width = nx;
    img.height = ny;
    img.rgb.assign(3 * nx * ny, 0);

    double pmax = 0.0, rmax = 0.0;
    for (const cplx& a : f.amp) {
        pmax = std::max(pmax, std::norm(a));
        rmax = std::max(rmax, std::abs(a.real()));
    }
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
            const std::size_t i = f.grid.index(x, y);
            const std::size_t row = ny - 1 - y;
            if (fields) {
                if (fields->reflect[i]) {
                    img.set(x, row, 0, 0, 0);
                    continue;
                }
                if (fields->v[i] != 0.0 || fields->theta_override[i] > 0.0) {
                    img.set(x, row, 150, 150, 150);
                    continue;
                }
            }
            if (mode == RenderMode::prob) {
                const double t = pmax > 0.0 ? std::pow(std::norm(f.amp[i]) / pmax, 0.4) : 0.0;
                img.set(x, row, detail::lerp8(t, 198, 255), detail::lerp8(t, 222, 255),
                        detail::lerp8(t, 240, 255));
            } else {
                const double t = rmax > 0.0 ? f.amp[i].real() / rmax : 0.0;  // [-1, 1]
                if (t >= 0.0)
                    img.set(x, row, 255, detail::lerp8(t, 255, 40), detail::lerp8(t, 255, 40));
                else
                    img.set(x, row, detail::lerp8(-t, 255, 40), detail::lerp8(-t, 255, 60), 255);
            }
        }
    }
    return img;
}

inline void write_ppm(const std::filesystem::path& path, const Image& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()),
             static_cast<std::streamsize>(img.rgb.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace sca
