// Command-line front end: scenario execution, parameter sweeps, heatmap
// rendering, dense-oracle self checks, and report extraction.

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sca/analysis.hpp"
#include "sca/io.hpp"
#include "sca/oracle.hpp"
#include "sca/runner.hpp"
#include "sca/scenario.hpp"

namespace {

using namespace sca;

int cmd_run(const std::string& path, const RunOverrides& ov) {
    const Scenario sc = load_scenario(path);
    const RunResult res = run_scenario(sc, ov);
    if (!res.waveform_warning.empty()) std::cerr << "warning: " << res.waveform_warning << "\n";
    std::cout << "run " << sc.name << " -> " << res.out_dir.string() << "\n";
    std::cout << "max |P(t) - 1| = " << fmt17(res.max_prob_drift) << "\n";
    if (sc.analyze.count("report")) {
        const auto rep = analyze_run(res.out_dir);
        const auto out = write_report(res.out_dir, rep);
        std::cout << "report -> " << out.string() << "\n";
    }
    return 0;
}

struct SweepPoint {
    double value = 0.0;
    double measured = 0.0;
    double theory = 0.0;
    double omega = 0.0;
};

SweepPoint sweep_point(Scenario sc, const std::string& param, double value) {
    if (param == "k") {
        if (sc.waveform.k.empty()) throw std::runtime_error("sweep: waveform has no k");
        sc.waveform.k[0] = value;
    } else if (param == "theta") {
        sc.theta = value;
    } else {
        throw std::runtime_error("sweep: unsupported parameter '" + param + "' (use k or theta)");
    }

    const Grid grid = sc.make_grid();
    const FieldConfig fields = resolve_fields(sc, grid);
    EvolutionPlan plan(grid, PhysicalParams{sc.theta}, fields);
    WaveField f = make_initial_field(sc, grid);

    long every = sc.snapshot_every;
    if (every <= 0) every = sc.waveform.type == "plane" ? 2 : std::max<long>(1, sc.cycles / 8);

    std::vector<WaveField> snaps;
    std::vector<double> times;
    const auto hook = [&](long t, const WaveField& snap) {
        snaps.push_back(snap);
        times.push_back(static_cast<double>(t));
    };
    plan.run(f, sc.cycles, every, hook, sc.schedule ? &*sc.schedule : nullptr);

    SweepPoint pt;
    pt.value = value;
    const double k = sc.waveform.k.empty() ? 0.0 : sc.waveform.k[0];
    pt.omega = dispersion_omega(sc.theta, k);
    if (sc.waveform.type == "plane") {
        pt.measured = measure_phase_velocity(snaps, static_cast<int>(every));
        pt.theory = phase_velocity_theory(sc.theta, k);
    } else {
        pt.measured = measure_group_velocity(snaps, times);
        pt.theory = group_velocity_theory(sc.theta, k);
    }
    return pt;
}

int cmd_sweep(const std::string& path, const std::string& spec, const std::string& out_file) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw std::runtime_error("sweep: expected --param name=lo..hi:count");
    const std::string name = spec.substr(0, eq);
    const std::string range = spec.substr(eq + 1);
    const auto dots = range.find("..");
    if (dots == std::string::npos) throw std::runtime_error("sweep: expected --param name=lo..hi:count");
    const std::string lo_s = range.substr(0, dots);
    std::string hi_s = range.substr(dots + 2);
    long count = 1;
    if (const auto colon = hi_s.rfind(':'); colon != std::string::npos) {
        count = std::stol(hi_s.substr(colon + 1));
        hi_s = hi_s.substr(0, colon);
    }
    if (count < 1) throw std::runtime_error("sweep: point count must be >= 1");
    const double lo = sca::detail::eval_expr(lo_s);
    const double hi = sca::detail::eval_expr(hi_s);

    const Scenario sc = load_scenario(path);
    std::vector<double> values(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        values[static_cast<std::size_t>(i)] =
            count == 1 ? lo
                       : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);

    // One independent evolution per point; workers capped by SCA_THREADS.
    std::vector<SweepPoint> points(values.size());
    std::vector<std::string> errors(values.size());
    const unsigned workers =
        std::min<unsigned>(EvolutionPlan::threads_from_env(), static_cast<unsigned>(values.size()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < std::max(1u, workers); ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= values.size()) return;
                try {
                    points[i] = sweep_point(sc, name, values[i]);
                } catch (const std::exception& ex) {
                    errors[i] = ex.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (!err.empty()) throw std::runtime_error("sweep point failed: " + err);

    std::ostringstream os;
    const char* measured_name = sc.waveform.type == "plane" ? "v_p_measured" : "v_g_measured";
    const char* theory_name = sc.waveform.type == "plane" ? "v_p_theory" : "v_g_theory";
    os << name << "," << measured_name << "," << theory_name << ",omega_theory\n";
    for (const SweepPoint& pt : points)
        os << fmt17(pt.value) << "," << fmt17(pt.measured) << "," << fmt17(pt.theory) << ","
           << fmt17(pt.omega) << "\n";
    if (out_file.empty()) {
        std::cout << os.str();
    } else {
        sca::detail::write_text(out_file, os.str());
        std::cout << "sweep -> " << out_file << "\n";
    }
    return 0;
}

int cmd_render(const std::string& dump, const std::string& mode, const std::string& fields_path,
               std::string out_file) {
    const WaveField f = read_field_dump(dump);
    FieldConfig fields;
    const FieldConfig* fp = nullptr;
    if (!fields_path.empty()) {
        auto fd = read_fields_dump(fields_path);
        if (!(fd.grid == f.grid)) throw std::runtime_error("render: fields grid mismatch");
        fields = std::move(fd.fields);
        fp = &fields;
    }
    const RenderMode rm = mode == "real" ? RenderMode::real : RenderMode::prob;
    if (out_file.empty())
        out_file = std::filesystem::path(dump).replace_extension("." + mode + ".ppm").string();
    write_ppm(out_file, render_heatmap(f, rm, fp));
    std::cout << "render -> " << out_file << "\n";
    return 0;
}

bool check(const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    return ok;
}

int cmd_oracle_check(long max_n) {
    const double theta = std::numbers::pi / 24.0;
    bool all = true;

    {
        const std::size_t n = static_cast<std::size_t>(std::min<long>(max_n, 64));
        std::mt19937 rng(7);
        std::normal_distribution<double> dist(0.0, 1.0);
        DenseOperator h(n);
        for (std::size_t i = 0; i < n; ++i) {
            h.at(i, i) = cplx{dist(rng), 0.0};
            for (std::size_t j = i + 1; j < n; ++j) {
                h.at(i, j) = cplx{dist(rng), dist(rng)};
                h.at(j, i) = std::conj(h.at(i, j));
            }
        }
        const EigenDecomposition d = jacobi_eig(h);
        DenseOperator rec(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cplx s{0.0, 0.0};
                for (std::size_t k = 0; k < n; ++k)
                    s += d.vectors.at(i, k) * d.values[k] * std::conj(d.vectors.at(j, k));
                rec.at(i, j) = s;
            }
        const double err = max_abs_diff(rec, h);
        all &= check("eigendecomposition reconstructs H", err < 1e-11,
                     "n=" + std::to_string(n) + " max dev " + fmt17(err));
        const double uerr = unitarity_error(exact_step(h, theta));
        all &= check("exact step is unitary", uerr < 1e-12, "max dev " + fmt17(uerr));
    }

    {
        const Grid grid({16});
        const FieldConfig free_fields(grid);
        const PhysicalParams params{theta};
        const DenseOperator h = dense_hamiltonian(grid, params, free_fields);
        double row_dev = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            cplx s{0.0, 0.0};
            for (std::size_t j = 0; j < 16; ++j) s += h.at(i, j);
            row_dev = std::max(row_dev, std::abs(s));
        }
        all &= check("free Hamiltonian rows sum to zero", row_dev < 1e-14,
                     "max |row sum| " + fmt17(row_dev));

        const auto pair_error = [&](double th) {
            const PhysicalParams p{th};
            const DenseOperator ue = dense_substep(grid, p, free_fields, 0, 0);
            const DenseOperator uo = dense_substep(grid, p, free_fields, 0, 1);
            const DenseOperator pair = matmul(matmul(ue, uo), matmul(uo, ue));
            return operator_norm_error(pair, exact_step(h, 2.0 * th));
        };
        const double ratio = pair_error(theta) / pair_error(theta / 2.0);
        all &= check("alternated pair error is third order", ratio > 6.5 && ratio < 9.5,
                     "halving ratio " + fmt17(ratio));

        const auto single_error = [&](double th) {
            const PhysicalParams p{th};
            const DenseOperator ue = dense_substep(grid, p, free_fields, 0, 0);
            const DenseOperator uo = dense_substep(grid, p, free_fields, 0, 1);
            return operator_norm_error(matmul(uo, ue), exact_step(h, th));
        };
        const double ratio2 = single_error(theta) / single_error(theta / 2.0);
        all &= check("unalternated step error is second order", ratio2 > 3.3 && ratio2 < 4.7,
                     "halving ratio " + fmt17(ratio2));
    }

    {
        const Grid g2({8, 8});
        const Grid g1({8});
        const PhysicalParams params{theta};
        const FieldConfig f2(g2), f1(g1);
        const DenseOperator ux =
            matmul(dense_substep(g1, params, f1, 0, 1), dense_substep(g1, params, f1, 0, 0));
        const DenseOperator full = kron_operator(ux, ux);

        WaveField psi(g2);
        std::mt19937 rng(11);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (cplx& a : psi.amp) a = cplx{dist(rng), dist(rng)};
        normalize(psi);
        const std::vector<cplx> direct = matvec(full, psi.amp);
        EvolutionPlan plan(g2, params, f2);
        plan.step(psi);
        double dev = 0.0;
        for (std::size_t i = 0; i < direct.size(); ++i)
            dev = std::max(dev, std::abs(direct[i] - psi.amp[i]));
        all &= check("2D sweep equals Kronecker product", dev < 1e-12, "max dev " + fmt17(dev));
    }

    {
        const std::size_t n = 16;
        const DenseOperator u = grossing_step(theta, n);
        const double nu = max_abs_diff(matmul(dagger(u), u), DenseOperator::identity(n));
        all &= check("first-order operator is non-unitary", nu > 1e-3,
                     "max |U*U - I| " + fmt17(nu));
    }

    return all ? 0 : 1;
}

int cmd_analyze(const std::string& run_dir, const std::string& report) {
    const auto rep = analyze_run(run_dir, report);
    const auto out = write_report(run_dir, rep);
    for (const char* key : {"v_p_measured", "v_g_measured", "v_p_theory", "v_g_theory", "period",
                            "mean_interval", "fundamental_omega", "centroid"})
        if (rep.contains(key)) std::cout << key << " = " << fmt17(rep[key].get<double>()) << "\n";
    std::cout << "report -> " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unitary cellular-automaton wave simulator"};
    app.require_subcommand(1);

    std::string scenario_path, dump_path, run_dir;
    std::string mode = "prob", fields_path, out_path, report, param_spec;
    long max_n = 64;
    RunOverrides ov;
    long cycles = -1, snap = -1;

    auto* run = app.add_subcommand("run", "Execute a scenario file");
    run->add_option("scenario", scenario_path)->required();
    run->add_option("--cycles", cycles, "Override the cycle count");
    run->add_option("--snapshot-every", snap, "Override the snapshot cadence");
    run->add_option("--out", out_path, "Override the output directory");

    auto* sweep = app.add_subcommand("sweep", "Run a scenario across a parameter range");
    sweep->add_option("scenario", scenario_path)->required();
    sweep->add_option("--param", param_spec, "name=lo..hi:count, e.g. k=pi/8..pi/2:7")->required();
    sweep->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* render = app.add_subcommand("render", "Render a field dump to a PPM heatmap");
    render->add_option("dump", dump_path)->required();
    render->add_option("--mode", mode, "prob or real")->check(CLI::IsMember({"prob", "real"}));
    render->add_option("--fields", fields_path, "Fields sidecar for overlays");
    render->add_option("--out", out_path, "Output image path");

    auto* oracle = app.add_subcommand("oracle-check", "Dense-oracle self checks");
    oracle->add_option("--max-n", max_n, "Largest dense dimension to exercise");

    auto* analyze = app.add_subcommand("analyze", "Derive a report from a run directory");
    analyze->add_option("run-dir", run_dir)->required();
    analyze->add_option("--report", report, "velocity|period|spectrum|diffraction");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (cycles >= 0) ov.cycles = cycles;
            if (snap >= 0) ov.snapshot_every = snap;
            if (!out_path.empty()) ov.out_dir = out_path;
            return cmd_run(scenario_path, ov);
        }
        if (sweep->parsed()) return cmd_sweep(scenario_path, param_spec, out_path);
        if (render->parsed()) return cmd_render(dump_path, mode, fields_path, out_path);
        if (oracle->parsed()) return cmd_oracle_check(max_n);
        if (analyze->parsed()) return cmd_analyze(run_dir, report);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
