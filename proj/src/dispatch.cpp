#include "stefanlab/dispatch.hpp"

#include "stefanlab/report_io.hpp"

#include <chrono>
#include <filesystem>
#include <map>

namespace stefanlab {

namespace {

struct OutputSink {
    std::string dir;
    std::map<std::string, std::string> checksums; // file -> fnv1a

    void write(const std::string& name, const std::string& content) {
        write_text_file(dir + "/" + name, content);
        checksums[name] = fnv1a_hex(content);
    }
};

int run_simulate(const ResolvedConfig& cfg, OutputSink& sink) {
    const LabContext ctx = build_context(cfg);
    const SemilinearSystem sys = ctx.system();
    const BrownianDriver driver =
        sample_paths(cfg.seed, cfg.modes, cfg.solver.horizon, cfg.solver.dt);
    auto [traj, exits] = run_trajectory(cfg.solver, sys, driver, ctx.initial);

    sink.write("trajectory.csv", trajectory_csv(traj, ctx.grid));
    sink.write("norms.csv", norms_csv(traj));
    const PhysicalFrame frame = reconstruct_physical(
        traj, ctx.grid, cfg.x_star0 - ctx.grid.length - 1.0, cfg.x_star0 + ctx.grid.length + 1.0,
        2 * ctx.grid.n_points);
    sink.write("frame.csv", frame_csv(frame));
    Json rep = trajectory_summary(traj, exits);
    rep["frame_range_warning"] = frame.range_warning;
    sink.write("report.json", rep.dump(2) + "\n");
    return traj.status == RunStatus::completed ? 0 : 1;
}

int run_wz_convergence(const ResolvedConfig& cfg, OutputSink& sink, int threads) {
    const LabContext ctx = build_context(cfg);
    const ConvergenceReport rep = wz_convergence_study(
        ctx.system(), ctx.initial, cfg.solver.horizon, cfg.m_list, cfg.n_list, cfg.samples, cfg.p,
        cfg.stop_radius, cfg.stop_epsilon, cfg.solver.sobolev_order, cfg.seed, threads);

    // verdict: errors nonincreasing in m at the largest n, within two sigma
    bool monotone = true;
    const int n_max = rep.n_list.back();
    for (size_t i = 1; i < rep.m_list.size(); ++i) {
        const auto& a = rep.cell(rep.m_list[i - 1], n_max).stopped_error;
        const auto& b = rep.cell(rep.m_list[i], n_max).stopped_error;
        if (b.mean > a.mean + 2.0 * (a.std_error + b.std_error)) monotone = false;
    }
    Json j = to_json(rep);
    j["monotone_in_m"] = monotone;
    sink.write("report.json", j.dump(2) + "\n");
    sink.write("matrix.csv", convergence_matrix_csv(rep));
    return (!rep.flagged && monotone) ? 0 : 1;
}

int run_phase_separation(const ResolvedConfig& cfg, OutputSink& sink, int threads) {
    const LabContext ctx = build_context(cfg);
    const PhaseSeparationReport rep =
        phase_separation_experiment(ctx.system(), ctx.initial, cfg.solver, cfg.samples, cfg.seed,
                                    threads, cfg.allow_violating);
    sink.write("report.json", to_json(rep).dump(2) + "\n");
    sink.write("margins.csv", margins_csv(rep));
    return rep.pass ? 0 : 1;
}

int run_ode_reduction(const ResolvedConfig& cfg, OutputSink& sink, int threads) {
    const OdeReductionReport rep = ode_reduction_check(cfg.sigma_const, cfg.solver.horizon,
                                                       cfg.m_list, cfg.samples, cfg.seed, threads);
    sink.write("report.json", to_json(rep).dump(2) + "\n");
    return rep.pass ? 0 : 1;
}

int run_validate_assumptions(const ResolvedConfig& cfg, OutputSink& sink) {
    const LabContext ctx = build_context(cfg);
    std::vector<double> xs;
    for (int i = 0; i < ctx.grid.n_points; ++i) xs.push_back(ctx.grid.node(i));
    xs.push_back(0.0);
    const AssumptionReport inward = validate_inward_pointing(ctx.coeffs, xs);
    SampleBox box;
    box.x_max = ctx.grid.length;
    const AssumptionReport growth =
        validate_growth(ctx.coeffs, cfg.growth_mode, box, cfg.envelope);
    Json j;
    j["inward_pointing"] = to_json(inward);
    j["growth"] = to_json(growth);
    const bool pass = inward.all_pass() && growth.all_pass();
    j["pass"] = pass;
    sink.write("report.json", j.dump(2) + "\n");
    return pass ? 0 : 1;
}

int run_exit_time_consistency(const ResolvedConfig& cfg, OutputSink& sink, int threads) {
    const LabContext ctx = build_context(cfg);
    const ExitConsistencyReport synthetic =
        exit_time_consistency_synthetic(1.0, 1e-3);
    const ExitConsistencyReport recorded = exit_time_consistency_trajectories(
        ctx.system(), ctx.initial, cfg.solver, cfg.m_list, cfg.families, cfg.seed, threads);
    Json j;
    j["synthetic"] = to_json(synthetic);
    j["trajectories"] = to_json(recorded);
    const bool pass = synthetic.pass && recorded.pass;
    j["pass"] = pass;
    sink.write("report.json", j.dump(2) + "\n");
    return pass ? 0 : 1;
}

} // namespace

int dispatch(const ResolvedConfig& cfg, const std::string& out_dir, int threads, bool dry_run) {
    std::filesystem::create_directories(out_dir);
    OutputSink sink{out_dir, {}};

    const auto t0 = std::chrono::steady_clock::now();
    int status = 0;
    if (!dry_run) {
        if (cfg.experiment == "simulate")
            status = run_simulate(cfg, sink);
        else if (cfg.experiment == "wz_convergence")
            status = run_wz_convergence(cfg, sink, threads);
        else if (cfg.experiment == "phase_separation")
            status = run_phase_separation(cfg, sink, threads);
        else if (cfg.experiment == "ode_reduction")
            status = run_ode_reduction(cfg, sink, threads);
        else if (cfg.experiment == "validate_assumptions")
            status = run_validate_assumptions(cfg, sink);
        else if (cfg.experiment == "exit_time_consistency")
            status = run_exit_time_consistency(cfg, sink, threads);
        else
            throw ConfigError("dispatch: unknown experiment '" + cfg.experiment + "'");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json manifest;
    manifest["version"] = kVersion;
    manifest["experiment"] = cfg.experiment;
    manifest["seed"] = cfg.seed;
    manifest["dry_run"] = dry_run;
    manifest["wall_clock_seconds"] = wall;
    manifest["config_text"] = cfg.canonical_text();
    Json outputs = Json::array();
    for (const auto& [file, sum] : sink.checksums) {
        Json o;
        o["file"] = file;
        o["fnv1a"] = sum;
        outputs.push_back(o);
    }
    manifest["outputs"] = outputs;
    manifest["status"] = status;
    write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return status;
}

} // namespace stefanlab
