#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sca/evolution.hpp"
#include "sca/grid.hpp"
#include "sca/hamiltonian.hpp"
#include "sca/wavefield.hpp"
#include "sca/waveforms.hpp"

namespace sca {

// Declarative experiment description. Line-oriented sections; `#` starts a
// comment; painters in [fields] apply in file order, later entries win.
// Scalar potentials are given in rest-energy units, wavenumbers in rad/cell.

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, int line, const std::string& msg) {
    std::ostringstream os;
    os << where << ":" << line << ": " << msg;
    throw std::runtime_error(os.str());
}

// Minimal arithmetic expressions: numbers, pi, + - * /, parentheses.
class ExprParser {
public:
    explicit ExprParser(const std::string& s) : s_(s) {}

    double parse() {
        const double v = expr();
        skip_ws();
        if (pos_ != s_.size()) throw std::invalid_argument("trailing characters in expression");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) {
                const double d = factor();
                if (d == 0.0) throw std::invalid_argument("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double factor() {
        skip_ws();
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) throw std::invalid_argument("missing ')'");
            return v;
        }
        if (s_.compare(pos_, 2, "pi") == 0) {
            pos_ += 2;
            return std::numbers::pi;
        }
        const char* start = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) throw std::invalid_argument("expected a number");
        pos_ += static_cast<std::size_t>(end - start);
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

inline double eval_expr(const std::string& s) {
    return ExprParser(s).parse();
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// Inclusive index range "a..b", "a..b:step", or single "a".
struct IndexRange {
    long lo = 0, hi = 0, step = 1;
};

inline IndexRange parse_range(const std::string& s) {
    IndexRange r;
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        r.lo = r.hi = std::stol(s);
        return r;
    }
    r.lo = std::stol(s.substr(0, dots));
    std::string rest = s.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        r.step = std::stol(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
        if (r.step < 1) throw std::invalid_argument("range step must be >= 1");
    }
    r.hi = std::stol(rest);
    if (r.hi < r.lo) throw std::invalid_argument("descending range");
    return r;
}

}  // namespace detail

struct Painter {
    std::string shape;  // rect | line45 | cell | grid | solenoid | parabola
    std::map<std::string, std::string> args;
    int line = 0;
};

struct WaveformSpec {
    std::string type;  // plane | gaussian | box | harmonic
    std::vector<double> k, x0, sigma;
    double x_c = 0.0, rho = 0.0;
    long L = 0, n = 0;
};

struct Scenario {
    std::string name;
    std::vector<std::size_t> dims;
    double theta = 0.0;
    std::vector<Painter> painters;
    WaveformSpec waveform;
    long cycles = 0;
    long snapshot_every = 0;
    bool trace_imag_mass = false;
    std::string out_dir;
    std::optional<Schedule> schedule;
    std::map<std::string, std::string> analyze;  // raw keys of the [analyze] section

    Grid make_grid() const { return Grid(dims); }
};

namespace detail {

inline void apply_property(FieldConfig& fields, const Painter& p, const std::string& where,
                           std::size_t cell) {
    if (p.args.count("v")) fields.v[cell] = eval_expr(p.args.at("v"));
    else if (p.args.count("theta")) fields.theta_override[cell] = eval_expr(p.args.at("theta"));
    else if (p.args.count("reflect")) fields.reflect[cell] = true;
    else parse_fail(where, p.line, "painter assigns no property (need v=, theta=, or reflect)");
}

inline void paint(FieldConfig& fields, const Grid& grid, const Painter& p, double theta,
                  const std::string& where) {
    const auto arg = [&](const char* key) -> const std::string& {
        const auto it = p.args.find(key);
        if (it == p.args.end()) parse_fail(where, p.line, std::string("missing key '") + key + "'");
        return it->second;
    };
    const auto check = [&](long v, int axis) {
        if (v < 0 || v >= static_cast<long>(grid.extent(axis)))
            parse_fail(where, p.line, "region outside grid on axis " + std::to_string(axis));
        return static_cast<std::size_t>(v);
    };

    if (p.shape == "rect" || p.shape == "grid") {
        static const char* names[3] = {"x", "y", "z"};
        IndexRange r[3];
        for (int a = 0; a < grid.ndim(); ++a) {
            if (p.args.count(names[a])) {
                r[a] = parse_range(p.args.at(names[a]));
                check(r[a].lo, a);
                check(r[a].hi, a);
            } else {
                r[a] = IndexRange{0, static_cast<long>(grid.extent(a)) - 1, 1};
            }
        }
        std::vector<std::size_t> c(static_cast<std::size_t>(grid.ndim()));
        for (long x = r[0].lo; x <= r[0].hi; x += r[0].step) {
            c[0] = static_cast<std::size_t>(x);
            if (grid.ndim() == 1) {
                apply_property(fields, p, where, grid.index_of(c));
                continue;
            }
            for (long y = r[1].lo; y <= r[1].hi; y += r[1].step) {
                c[1] = static_cast<std::size_t>(y);
                if (grid.ndim() == 2) {
                    apply_property(fields, p, where, grid.index_of(c));
                    continue;
                }
                for (long z = r[2].lo; z <= r[2].hi; z += r[2].step) {
                    c[2] = static_cast<std::size_t>(z);
                    apply_property(fields, p, where, grid.index_of(c));
                }
            }
        }
    } else if (p.shape == "cell") {
        std::vector<std::size_t> c(static_cast<std::size_t>(grid.ndim()));
        static const char* names[3] = {"x", "y", "z"};
        for (int a = 0; a < grid.ndim(); ++a) c[a] = check(std::stol(arg(names[a])), a);
        apply_property(fields, p, where, grid.index_of(c));
    } else if (p.shape == "line45") {
        if (grid.ndim() != 2) parse_fail(where, p.line, "line45 requires a 2D grid");
        const long x0 = std::stol(arg("x0"));
        const long y0 = std::stol(arg("y0"));
        const long len = std::stol(arg("len"));
        const std::string dir = arg("dir");
        if (dir != "/" && dir != "\\") parse_fail(where, p.line, "dir must be / or \\");
        const long dy = dir == "/" ? 1 : -1;
        for (long i = 0; i < len; ++i) {
            const std::size_t cx = check(x0 + i, 0);
            const std::size_t cy = check(y0 + dy * i, 1);
            apply_property(fields, p, where, grid.index(cx, cy));
        }
    } else if (p.shape == "parabola") {
        // Harmonic potential 0.5 kappa (x - center)^2, with kappa given in
        // absolute lattice units; the stored v is in rest-energy units.
        if (grid.ndim() != 1) parse_fail(where, p.line, "parabola requires a 1D grid");
        const double kappa = eval_expr(arg("kappa"));
        const double center = eval_expr(arg("center"));
        for (std::size_t x = 0; x < grid.extent(0); ++x) {
            const double u = static_cast<double>(x) - center;
            fields.v[x] = 0.5 * kappa * u * u / theta;
        }
    } else if (p.shape == "solenoid") {
        if (grid.ndim() != 2) parse_fail(where, p.line, "solenoid requires a 2D grid");
        const double k = eval_expr(arg("K"));
        const double xc = eval_expr(arg("x"));
        const double yc = eval_expr(arg("y"));
        const double excl =
            p.args.count("exclude") ? eval_expr(p.args.at("exclude")) : 1.5;
        for (std::size_t x = 0; x < grid.extent(0); ++x) {
            for (std::size_t y = 0; y < grid.extent(1); ++y) {
                const double dx = static_cast<double>(x) - xc;
                const double dy = static_cast<double>(y) - yc;
                const double r2 = dx * dx + dy * dy;
                const std::size_t i = grid.index(x, y);
                if (r2 < excl * excl) {
                    fields.g[0][i] = 0.0;
                    fields.g[1][i] = 0.0;
                } else {
                    // A hop across one link advances the phase by 2 g, so
                    // half the azimuthal field K / r makes loops enclosing
                    // the core wind by exactly 2 pi K.
                    fields.g[0][i] = -0.5 * k * dy / r2;
                    fields.g[1][i] = 0.5 * k * dx / r2;
                }
            }
        }
    } else {
        parse_fail(where, p.line, "unknown painter shape '" + p.shape + "'");
    }
}

}  // namespace detail

// Resolve all painters into a concrete field configuration.
inline FieldConfig resolve_fields(const Scenario& sc, const Grid& grid) {
    FieldConfig fields(grid);
    for (const Painter& p : sc.painters) detail::paint(fields, grid, p, sc.theta, sc.name);
    return fields;
}

// Construct the initial state described by [waveform].
inline WaveField make_initial_field(const Scenario& sc, const Grid& grid,
                                    std::string* warning = nullptr) {
    const WaveformSpec& w = sc.waveform;
    if (w.type == "plane") {
        std::vector<double> x0 = w.x0;
        if (x0.empty()) x0.assign(static_cast<std::size_t>(grid.ndim()), 0.0);
        return plane_wave(grid, w.k, x0);
    }
    if (w.type == "gaussian") return gaussian_packet(grid, w.k, w.x0, w.sigma, warning);
    if (w.type == "box") return box_state(grid, w.x_c, w.L, w.n);
    if (w.type == "harmonic") return harmonic_state(grid, w.x_c, w.rho, w.n);
    throw std::runtime_error(sc.name + ": unknown waveform type '" + w.type + "'");
}

inline Scenario parse_scenario(std::istream& is, const std::string& name) {
    Scenario sc;
    sc.name = name;
    std::string section;
    std::string line;
    int ln = 0;
    bool have_dims = false, have_theta = false, have_cycles = false;

    while (std::getline(is, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = 0, e = line.size();
        while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
        line = line.substr(b, e - b);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') detail::parse_fail(name, ln, "malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "lattice" && section != "fields" && section != "waveform" &&
                section != "run" && section != "schedule" && section != "analyze")
                detail::parse_fail(name, ln, "unknown section [" + section + "]");
            if (section == "schedule") sc.schedule.emplace();
            continue;
        }
        if (section.empty()) detail::parse_fail(name, ln, "content before any section");

        if (section == "fields") {
            const auto toks = detail::split_ws(line);
            Painter p;
            p.shape = toks[0];
            p.line = ln;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const auto eq = toks[i].find('=');
                if (eq == std::string::npos) p.args[toks[i]] = "";
                else p.args[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
            }
            sc.painters.push_back(std::move(p));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::parse_fail(name, ln, "expected key = value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        std::size_t vb = 0;
        while (vb < val.size() && std::isspace(static_cast<unsigned char>(val[vb]))) ++vb;
        val = val.substr(vb);
        if (key.empty() || val.empty()) detail::parse_fail(name, ln, "expected key = value");

        try {
            if (section == "lattice") {
                if (key == "dims") {
                    for (const auto& tok : detail::split_ws(val))
                        sc.dims.push_back(static_cast<std::size_t>(std::stol(tok)));
                    have_dims = true;
                } else if (key == "theta") {
                    sc.theta = detail::eval_expr(val);
                    have_theta = true;
                } else {
                    detail::parse_fail(name, ln, "unknown [lattice] key '" + key + "'");
                }
            } else if (section == "waveform") {
                WaveformSpec& w = sc.waveform;
                if (key == "type") w.type = val;
                else if (key == "k")
                    for (const auto& t : detail::split_ws(val)) w.k.push_back(detail::eval_expr(t));
                else if (key == "x0")
                    for (const auto& t : detail::split_ws(val)) w.x0.push_back(detail::eval_expr(t));
                else if (key == "sigma")
                    for (const auto& t : detail::split_ws(val))
                        w.sigma.push_back(detail::eval_expr(t));
                else if (key == "x_c") w.x_c = detail::eval_expr(val);
                else if (key == "rho") w.rho = detail::eval_expr(val);
                else if (key == "L") w.L = std::stol(val);
                else if (key == "n") w.n = std::stol(val);
                else detail::parse_fail(name, ln, "unknown [waveform] key '" + key + "'");
            } else if (section == "run") {
                if (key == "cycles") {
                    sc.cycles = std::stol(val);
                    have_cycles = true;
                } else if (key == "snapshot-every") {
                    sc.snapshot_every = std::stol(val);
                } else if (key == "trace") {
                    for (const auto& t : detail::split_ws(val)) {
                        if (t == "imag-mass") sc.trace_imag_mass = true;
                        else detail::parse_fail(name, ln, "unknown trace '" + t + "'");
                    }
                } else if (key == "out") {
                    sc.out_dir = val;
                } else {
                    detail::parse_fail(name, ln, "unknown [run] key '" + key + "'");
                }
            } else if (section == "schedule") {
                Schedule& s = *sc.schedule;
                if (key == "t_s") s.t_s = std::stol(val);
                else if (key == "alpha") s.alpha = detail::eval_expr(val);
                else if (key == "s_max") s.s_max = detail::eval_expr(val);
                else if (key == "cadence") s.cadence = std::stol(val);
                else detail::parse_fail(name, ln, "unknown [schedule] key '" + key + "'");
            } else if (section == "analyze") {
                sc.analyze[key] = val;
            }
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& ex) {
            detail::parse_fail(name, ln, std::string("bad value for '") + key + "': " + ex.what());
        }
    }

    if (!have_dims) throw std::runtime_error(name + ": missing [lattice] dims");
    if (!have_theta) throw std::runtime_error(name + ": missing [lattice] theta");
    if (!have_cycles) throw std::runtime_error(name + ": missing [run] cycles");
    if (sc.waveform.type.empty()) throw std::runtime_error(name + ": missing [waveform] type");
    if (sc.cycles < 0) throw std::runtime_error(name + ": negative cycle count");

    // Fail fast on bad geometry: grid validation plus painter bounds.
    const Grid grid = sc.make_grid();
    (void)resolve_fields(sc, grid);
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario: " + path.string());
    Scenario sc = parse_scenario(is, path.filename().string());
    if (sc.out_dir.empty()) sc.out_dir = "runs/" + path.stem().string();
    return sc;
}

}  // namespace sca
