#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sca/analysis.hpp"
#include "sca/evolution.hpp"
#include "sca/io.hpp"
#include "sca/scenario.hpp"

namespace sca {

// Orchestration shared by the command-line tool and the test suites:
// execute a scenario into a run directory, then derive reports from the
// artifacts. Runs are deterministic and contain no timestamps, so repeated
// executions produce byte-identical files.

struct RunOverrides {
    std::optional<long> cycles;
    std::optional<long> snapshot_every;
    std::optional<std::string> out_dir;
};

struct RunResult {
    std::filesystem::path out_dir;
    double max_prob_drift = 0.0;  // max |P(t) - 1|
    std::string waveform_warning;
};

namespace detail {

inline std::string snapshot_name(long t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "t%09ld.scag", t);
    return buf;
}

inline nlohmann::json manifest_json(const Scenario& sc, long cycles, long snapshot_every) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["dims"] = sc.dims;
    j["theta"] = sc.theta;
    nlohmann::json w;
    w["type"] = sc.waveform.type;
    w["k"] = sc.waveform.k;
    w["x0"] = sc.waveform.x0;
    w["sigma"] = sc.waveform.sigma;
    w["x_c"] = sc.waveform.x_c;
    w["rho"] = sc.waveform.rho;
    w["L"] = sc.waveform.L;
    w["n"] = sc.waveform.n;
    j["waveform"] = w;
    j["cycles"] = cycles;
    j["snapshot_every"] = snapshot_every;
    j["trace_imag_mass"] = sc.trace_imag_mass;
    if (sc.schedule) {
        nlohmann::json s;
        s["t_s"] = sc.schedule->t_s;
        s["alpha"] = sc.schedule->alpha;
        s["s_max"] = sc.schedule->s_max;
        s["cadence"] = sc.schedule->cadence;
        j["schedule"] = s;
    }
    j["analyze"] = sc.analyze;
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace detail

inline RunResult run_scenario(const Scenario& sc, const RunOverrides& ov = {}) {
    const long cycles = ov.cycles.value_or(sc.cycles);
    const long snapshot_every = ov.snapshot_every.value_or(sc.snapshot_every);
    const std::filesystem::path out = ov.out_dir.value_or(sc.out_dir);

    const Grid grid = sc.make_grid();
    const FieldConfig fields = resolve_fields(sc, grid);
    const PhysicalParams params{sc.theta};

    RunResult result;
    result.out_dir = out;
    WaveField f = make_initial_field(sc, grid, &result.waveform_warning);

    std::filesystem::create_directories(out / "snapshots");
    std::filesystem::create_directories(out / "reports");
    if (grid.ndim() == 2) std::filesystem::create_directories(out / "images");

    detail::write_text(out / "manifest.json",
                       detail::manifest_json(sc, cycles, snapshot_every).dump(2) + "\n");
    write_fields_dump(out / "fields.scaf", fields, grid);

    EvolutionPlan plan(grid, params, fields);
    std::vector<double> prob_trace;
    std::vector<double> imag_trace;
    prob_trace.reserve(static_cast<std::size_t>(cycles) + 1);
    if (sc.trace_imag_mass) imag_trace.reserve(static_cast<std::size_t>(cycles) + 1);

    // A 2D scenario with a diffraction analysis gets its screen column
    // accumulated every cycle; the time-integrated exposure outlives the
    // transit of a finite wave train.
    const bool accumulate = grid.ndim() == 2 && sc.analyze.count("column") > 0;
    std::vector<double> screen_accum;
    std::size_t screen_col = 0;
    if (accumulate) {
        screen_col = static_cast<std::size_t>(detail::eval_expr(sc.analyze.at("column")));
        if (screen_col >= grid.extent(0))
            throw std::runtime_error("run: analyze column outside the grid");
        screen_accum.assign(grid.extent(1), 0.0);
    }

    long last_dumped = -1;
    const auto hook = [&](long t, const WaveField& snap) {
        prob_trace.push_back(total_probability(snap));
        if (sc.trace_imag_mass) imag_trace.push_back(imag_mass(snap));
        if (accumulate)
            for (std::size_t yy = 0; yy < screen_accum.size(); ++yy)
                screen_accum[yy] += std::norm(snap.amp[snap.grid.index(screen_col, yy)]);
        if (snapshot_every > 0 && t % snapshot_every == 0) {
            write_field_dump(out / "snapshots" / detail::snapshot_name(t), snap);
            last_dumped = t;
        }
    };
    plan.run(f, cycles, 1, hook, sc.schedule ? &*sc.schedule : nullptr);

    if (last_dumped != cycles)
        write_field_dump(out / "snapshots" / detail::snapshot_name(cycles), f);
    write_trace_csv(out / "probability.csv", "probability", prob_trace);
    if (sc.trace_imag_mass) write_trace_csv(out / "imag_mass.csv", "imag_mass", imag_trace);
    if (accumulate) {
        std::string csv = "y,intensity\n";
        for (std::size_t yy = 0; yy < screen_accum.size(); ++yy)
            csv += std::to_string(yy) + "," + fmt17(screen_accum[yy]) + "\n";
        detail::write_text(out / "screen_accum.csv", csv);
    }

    if (grid.ndim() == 2) {
        write_ppm(out / "images" / "final_prob.ppm",
                  render_heatmap(f, RenderMode::prob, &fields));
        write_ppm(out / "images" / "final_real.ppm",
                  render_heatmap(f, RenderMode::real, &fields));
    }

    for (double p : prob_trace)
        result.max_prob_drift = std::max(result.max_prob_drift, std::abs(p - 1.0));
    return result;
}

// ------------------------------------------------------------- analysis

struct SnapshotSet {
    std::vector<long> cycles;
    std::vector<WaveField> fields;
};

inline SnapshotSet load_snapshots(const std::filesystem::path& run_dir) {
    SnapshotSet set;
    std::vector<std::pair<long, std::filesystem::path>> found;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir / "snapshots")) {
        const std::string stem = entry.path().stem().string();
        if (stem.size() < 2 || stem[0] != 't') continue;
        found.emplace_back(std::stol(stem.substr(1)), entry.path());
    }
    std::sort(found.begin(), found.end());
    for (const auto& [t, path] : found) {
        set.cycles.push_back(t);
        set.fields.push_back(read_field_dump(path));
    }
    return set;
}

inline nlohmann::json load_manifest(const std::filesystem::path& run_dir) {
    std::ifstream is(run_dir / "manifest.json");
    if (!is) throw std::runtime_error("missing manifest: " + (run_dir / "manifest.json").string());
    nlohmann::json j;
    is >> j;
    return j;
}

namespace detail {

inline double analyze_key(const nlohmann::json& manifest, const std::string& key) {
    const auto& an = manifest.at("analyze");
    if (!an.contains(key))
        throw std::runtime_error("analyze: missing [analyze] key '" + key + "'");
    return eval_expr(an.at(key).get<std::string>());
}

}  // namespace detail

// Derive one report from a run directory. `report` overrides the scenario's
// own [analyze] report selection when non-empty.
inline nlohmann::json analyze_run(const std::filesystem::path& run_dir,
                                  std::string report = "") {
    const nlohmann::json manifest = load_manifest(run_dir);
    if (report.empty() && manifest.at("analyze").contains("report"))
        report = manifest.at("analyze").at("report").get<std::string>();
    if (report.empty())
        throw std::runtime_error("analyze: no report requested (pass --report or add [analyze])");

    const double theta = manifest.at("theta").get<double>();
    nlohmann::json out;
    out["report"] = report;

    if (report == "velocity") {
        const SnapshotSet snaps = load_snapshots(run_dir);
        if (snaps.fields.size() < 2) throw std::runtime_error("analyze velocity: need >= 2 snapshots");
        const std::string type = manifest.at("waveform").at("type").get<std::string>();
        const double k = manifest.at("waveform").at("k").at(0).get<double>();
        out["k"] = k;
        out["theta"] = theta;
        if (type == "plane") {
            const long stride = snaps.cycles[1] - snaps.cycles[0];
            out["v_p_measured"] = measure_phase_velocity(snaps.fields, static_cast<int>(stride));
            out["v_p_theory"] = phase_velocity_theory(theta, k);
            out["v_p_base_theory"] = base_phase_velocity(theta, k);
        } else {
            std::vector<double> times(snaps.cycles.begin(), snaps.cycles.end());
            out["v_g_measured"] = measure_group_velocity(snaps.fields, times);
            out["v_g_theory"] = group_velocity_theory(theta, k);
        }
        return out;
    }

    if (report == "period" || report == "spectrum") {
        const std::vector<double> series = read_trace_csv(run_dir / "imag_mass.csv");
        if (report == "period") {
            const PeriodReport rep = period_from_minima(series);
            out["minima_times"] = rep.minima_times;
            out["intervals"] = rep.intervals;
            out["cumulative"] = rep.cumulative;
            out["omega"] = rep.omega;
            out["mean_interval"] = rep.mean_interval;
            out["period"] = rep.period;
            return out;
        }
        std::size_t t0 = 0, t1 = series.size();
        if (manifest.at("analyze").contains("window")) {
            const auto toks =
                detail::split_ws(manifest.at("analyze").at("window").get<std::string>());
            if (toks.size() != 2) throw std::runtime_error("analyze spectrum: window needs two values");
            t0 = static_cast<std::size_t>(std::stol(toks[0]));
            t1 = static_cast<std::size_t>(std::stol(toks[1]));
        }
        const SpectrumReport rep = fft_spectrum(series, t0, t1);
        out["window"] = {t0, t1};
        out["series_length"] = rep.series_length;
        out["padded_length"] = rep.padded_length;
        out["dc_removed"] = rep.dc_removed;
        out["parseval_residual"] = rep.parseval_residual;
        out["fundamental_omega"] = rep.fundamental_omega;
        out["fundamental_magnitude"] = rep.fundamental_magnitude;
        // Persist only the low-frequency band; the rest is numerically empty
        // for I(t)-like inputs.
        const double band = 0.05;
        std::vector<double> freqs, mags;
        for (std::size_t b = 0; b < rep.frequencies.size() && rep.frequencies[b] <= band; ++b) {
            freqs.push_back(rep.frequencies[b]);
            mags.push_back(rep.magnitudes[b]);
        }
        out["frequencies"] = freqs;
        out["magnitudes"] = mags;
        return out;
    }

    if (report == "diffraction") {
        const auto x_star = static_cast<std::size_t>(detail::analyze_key(manifest, "column"));
        // The time-integrated exposure written by the run is preferred over
        // the final snapshot when present.
        DiffractionReport rep;
        if (std::filesystem::exists(run_dir / "screen_accum.csv")) {
            rep = diffraction_report_from_row(
                read_trace_csv(run_dir / "screen_accum.csv"), static_cast<double>(x_star),
                detail::analyze_key(manifest, "screen-x"), detail::analyze_key(manifest, "y-mid"),
                detail::analyze_key(manifest, "d"), detail::analyze_key(manifest, "b"),
                detail::analyze_key(manifest, "lambda"));
        } else {
            const SnapshotSet snaps = load_snapshots(run_dir);
            if (snaps.fields.empty()) throw std::runtime_error("analyze diffraction: no snapshots");
            rep = diffraction_slice(
                snaps.fields.back(), x_star, detail::analyze_key(manifest, "screen-x"),
                detail::analyze_key(manifest, "y-mid"), detail::analyze_key(manifest, "d"),
                detail::analyze_key(manifest, "b"), detail::analyze_key(manifest, "lambda"));
        }
        out["d"] = rep.d;
        out["b"] = rep.b;
        out["lambda"] = rep.lambda;
        out["x_star"] = rep.x_star;
        out["x_screen"] = rep.x_screen;
        out["y_mid"] = rep.y_mid;
        out["window"] = {rep.win_lo, rep.win_hi};
        out["centroid"] = rep.centroid;
        out["y"] = rep.y;
        out["intensity"] = rep.intensity;
        out["sin_phi"] = rep.sin_phi;
        out["narrow_ref"] = rep.narrow_ref;
        out["wide_ref"] = rep.wide_ref;
        out["minima_y"] = slice_minima(rep);
        return out;
    }

    throw std::runtime_error("analyze: unknown report '" + report + "'");
}

inline std::filesystem::path write_report(const std::filesystem::path& run_dir,
                                          const nlohmann::json& report) {
    const std::filesystem::path path =
        run_dir / "reports" / (report.at("report").get<std::string>() + ".json");
    detail::write_text(path, report.dump(2) + "\n");
    return path;
}

}  // namespace sca
