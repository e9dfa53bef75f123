#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stefanlab/experiments.hpp"

#include <cmath>

using namespace stefanlab;

namespace {

struct Fixture {
    HalfLineGrid grid;
    CoefficientSet coeffs;
    SpectralOperator op_plus, op_minus;
    std::shared_ptr<const Kernel> kernel;
    NoiseBasis basis;

    Fixture(BoundarySpec bc, std::shared_ptr<const Kernel> k, int modes, int n_points = 32)
        : grid(build_grid(6.0, n_points)),
          kernel(std::move(k)),
          basis(build_basis(kernel, modes, -16.0, 16.0, 0.02)) {
        coeffs.boundary = bc;
        op_plus = assemble_operator(grid, bc, 1.0, 1.0, Phase::plus);
        op_minus = assemble_operator(grid, bc, 1.0, 1.0, Phase::minus);
    }

    SemilinearSystem sys() const { return {grid, coeffs, op_plus, op_minus, basis}; }
};

Field bump(const HalfLineGrid& g, double amp, double center, double width) {
    Field f(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.node(i);
        f[i] = amp * std::exp(-(x - center) * (x - center) / (2.0 * width * width));
    }
    return f;
}

void smooth_small_coeffs(CoefficientSet& c) {
    c.mu_plus = make_mu("affine", {{"cy", -0.3}});
    c.mu_minus = make_mu("affine", {{"cy", -0.3}});
    c.sigma_plus = make_sigma("linear_y", {{"s", 0.4}});
    c.sigma_minus = make_sigma("linear_y", {{"s", 0.4}});
    c.rho = make_rho("difference", {{"kappa", 0.3}});
}

} // namespace

TEST_CASE("batch mean estimates") {
    std::vector<double> vals;
    for (int i = 0; i < 100; ++i) vals.push_back(1.0 + (i % 2 == 0 ? 0.1 : -0.1));
    const McEstimate e = batch_mean_estimate(vals);
    CHECK(e.mean == doctest::Approx(1.0));
    CHECK(e.samples == 100);
    CHECK(e.std_error >= 0.0);
    CHECK(batch_mean_estimate({}).samples == 0);
}

TEST_CASE("parallel sample loop is order-deterministic") {
    std::vector<double> out1(64), out4(64);
    parallel_for_samples(64, 1, [&](int i) { out1[i] = std::sin(i * 0.1) * i; });
    parallel_for_samples(64, 4, [&](int i) { out4[i] = std::sin(i * 0.1) * i; });
    for (int i = 0; i < 64; ++i) CHECK(out1[i] == out4[i]);

    CHECK_THROWS_AS(
        parallel_for_samples(8, 3, [](int i) { if (i == 5) throw ConfigError("boom"); }),
        ConfigError);
}

TEST_CASE("wz convergence study") {
    SUBCASE("zero noise leaves only the integrator difference") {
        Fixture fx(robin_boundary(1.0, 1.0),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 4);
        smooth_small_coeffs(fx.coeffs);
        fx.coeffs.sigma_plus = make_sigma("zero", {});
        fx.coeffs.sigma_minus = make_sigma("zero", {});
        const SystemState x0(bump(fx.grid, 1.0, 2.0, 0.8), bump(fx.grid, -1.0, 2.0, 0.8), 0.0);
        const ConvergenceReport rep = wz_convergence_study(
            fx.sys(), x0, 0.25, {4, 8}, {2, 4}, 30, 1, 50.0, 1.0, 1, 7, 2);
        CHECK_FALSE(rep.flagged);
        for (const auto& c : rep.cells) {
            CHECK(c.stopped_error.mean >= 0.0);
            CHECK(c.stopped_error.mean < 1e-4);
        }
        // integrator difference shrinks with m
        CHECK(rep.cell(8, 4).stopped_error.mean <= rep.cell(4, 4).stopped_error.mean + 1e-12);
    }
    SUBCASE("rank-1 noise makes the mode truncation exact") {
        Fixture fx(robin_boundary(1.0, 1.0), std::make_shared<Rank1Kernel>(0, 8.0, 0.8, 4.0), 4);
        smooth_small_coeffs(fx.coeffs);
        const SystemState x0(bump(fx.grid, 1.0, 2.0, 0.8), bump(fx.grid, -1.0, 2.0, 0.8), 0.0);
        const ConvergenceReport rep = wz_convergence_study(
            fx.sys(), x0, 0.25, {4, 8}, {1, 4}, 30, 1, 50.0, 1.0, 1, 11, 2);
        // modes beyond the first carry no noise, so n = 1 already matches n = 4
        CHECK(rep.cell(8, 1).stopped_error.mean ==
              doctest::Approx(rep.cell(8, 4).stopped_error.mean).epsilon(1e-10));
        // and the m-limit strictly improves the estimate
        CHECK(rep.cell(8, 4).stopped_error.mean < rep.cell(4, 4).stopped_error.mean);
    }
    SUBCASE("input validation") {
        Fixture fx(robin_boundary(1.0, 1.0),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 4);
        const SystemState x0 = zero_state(fx.grid);
        CHECK_THROWS_AS(wz_convergence_study(fx.sys(), x0, 0.25, {8, 4}, {2}, 30, 1, 50.0, 1.0,
                                             1, 7, 1),
                        ConfigError); // m list not increasing
        CHECK_THROWS_AS(wz_convergence_study(fx.sys(), x0, 0.25, {4, 8}, {2}, 10, 1, 50.0, 1.0,
                                             1, 7, 1),
                        ConfigError); // too few samples
        CHECK_THROWS_AS(wz_convergence_study(fx.sys(), x0, 0.25, {4, 6}, {2}, 30, 1, 50.0, 1.0,
                                             1, 7, 1),
                        ConfigError); // 6 does not divide 8
    }
}

TEST_CASE("phase separation experiment") {
    SolverConfig solver;
    solver.horizon = 0.25;
    solver.dt = 1.25e-3;
    solver.interp_m = 10;
    solver.n_modes = 6;
    solver.sobolev_order = 1;

    SUBCASE("pure heat preserves positivity to rounding") {
        Fixture fx(dirichlet_boundary(),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 6);
        const SystemState x0(bump(fx.grid, 1.0, 2.0, 0.8), -1.0 * bump(fx.grid, 1.0, 2.0, 0.8),
                             0.0);
        const PhaseSeparationReport rep =
            phase_separation_experiment(fx.sys(), x0, solver, 10, 3, 2, false);
        CHECK(rep.pass);
        CHECK(rep.baseline_dip < 1e-12);
        for (const auto& m : rep.margins) {
            CHECK(m.ito_margin >= -1e-12);
            CHECK(m.wz_margin >= -1e-12);
        }
    }
    SUBCASE("parallel noise with inward drift stays in the cone") {
        Fixture fx(dirichlet_boundary(),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 6);
        fx.coeffs.mu_plus = make_mu("affine", {{"c0", 0.2}, {"cy", -0.4}});
        fx.coeffs.mu_minus = make_mu("affine", {{"c0", -0.2}, {"cy", -0.4}});
        fx.coeffs.sigma_plus = make_sigma("linear_y", {{"s", 0.5}});
        fx.coeffs.sigma_minus = make_sigma("linear_y", {{"s", 0.5}});
        fx.coeffs.rho = make_rho("difference", {{"kappa", 0.3}});
        const SystemState x0(bump(fx.grid, 1.0, 2.0, 0.8), -1.0 * bump(fx.grid, 1.0, 2.0, 0.8),
                             0.0);
        const PhaseSeparationReport rep =
            phase_separation_experiment(fx.sys(), x0, solver, 25, 7, 2, false);
        CHECK(rep.validator_pass);
        CHECK(rep.pass);
        CHECK(rep.violating_samples.empty());
    }
    SUBCASE("outward drift is refused, then detected under the explicit flag") {
        Fixture fx(dirichlet_boundary(),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 6);
        fx.coeffs.mu_plus = make_mu("affine", {{"c0", -1.0}});
        // u1 touches zero on a whole interval, so the outward drift must bite
        Field u1(fx.grid.n_points);
        for (int i = 0; i < fx.grid.n_points; ++i) {
            const double x = fx.grid.node(i);
            u1[i] = std::max(x - 2.0, 0.0) * std::exp(-x);
        }
        const SystemState x0(u1, -1.0 * u1, 0.0);
        CHECK_THROWS_AS(phase_separation_experiment(fx.sys(), x0, solver, 5, 11, 1, false),
                        ConfigError);
        const PhaseSeparationReport rep =
            phase_separation_experiment(fx.sys(), x0, solver, 5, 11, 1, true);
        CHECK_FALSE(rep.validator_pass);
        CHECK_FALSE(rep.pass);
        CHECK_FALSE(rep.violating_samples.empty());
    }
    SUBCASE("initial state must sit in the cone") {
        Fixture fx(dirichlet_boundary(),
                   std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 6);
        const SystemState bad(-1.0 * bump(fx.grid, 1.0, 2.0, 0.8),
                              -1.0 * bump(fx.grid, 1.0, 2.0, 0.8), 0.0);
        CHECK_THROWS_AS(phase_separation_experiment(fx.sys(), bad, solver, 5, 1, 1, false),
                        ConfigError);
    }
}

TEST_CASE("exit time consistency on synthetic families") {
    const ExitConsistencyReport rep = exit_time_consistency_synthetic(1.0, 1e-3);
    CHECK(rep.pass);
    REQUIRE(rep.families.size() == 3);
    for (const auto& f : rep.families) {
        CHECK(f.one_sided_ok);
        CHECK(f.sandwich_ok);
        CHECK(f.limit_ok);
    }
    // the tangent family separates the open and closed exits
    const ExitFamilyResult& tangent = rep.families[1];
    CHECK(tangent.s_inf < tangent.t_inf);
    CHECK(tangent.t_inf == 1.0);
}

TEST_CASE("exit time consistency on recorded trajectories") {
    Fixture fx(robin_boundary(1.0, 1.0),
               std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0), 6);
    smooth_small_coeffs(fx.coeffs);
    SolverConfig solver;
    solver.horizon = 0.25;
    solver.dt = 0.25 / 64.0;
    solver.n_modes = 6;
    solver.sobolev_order = 1;
    const SystemState x0(bump(fx.grid, 1.0, 2.0, 0.8), bump(fx.grid, -1.0, 2.0, 0.8), 0.0);
    const ExitConsistencyReport rep =
        exit_time_consistency_trajectories(fx.sys(), x0, solver, {4, 8, 16}, 3, 5, 2);
    CHECK(rep.pass);
    CHECK(rep.families.size() == 3);
}

TEST_CASE("scalar reduction") {
    SUBCASE("zero volatility collapses all three solutions") {
        const OdeReductionReport rep = ode_reduction_check(0.0, 1.0, {8, 16}, 50, 21, 2);
        CHECK(rep.pass);
        CHECK(rep.zero_noise_discrepancy < 1e-12);
    }
    SUBCASE("geometric brownian fixture at reduced scale") {
        const OdeReductionReport rep = ode_reduction_check(0.5, 1.0, {16, 64}, 150, 22, 2);
        CHECK(rep.strong_order_slope > 0.35);
        CHECK(rep.strong_order_slope < 0.65);
        CHECK(rep.fraction_improved >= 0.9);
        CHECK(rep.uncorrected_mean_log_gap ==
              doctest::Approx(rep.expected_log_gap).epsilon(0.1));
        // corrected endpoint gaps shrink with the interpolation level
        CHECK(rep.corrected_gap_mean.back() < rep.corrected_gap_mean.front());
    }
}

TEST_CASE("physical frame reconstruction") {
    const HalfLineGrid g = build_grid(6.0, 64);
    Field u1(g.n_points), u2(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.node(i);
        u1[i] = std::exp(-x) * (1.0 + 0.3 * std::sin(2.0 * x));
        u2[i] = -std::exp(-0.7 * x);
    }

    // interface positions are grid-aligned so probe nodes land exactly
    const double h = g.h;
    Trajectory traj;
    traj.dt = 0.1;
    traj.norm_path = {0.0, 0.0, 0.0};
    traj.snapshots = {SystemState(u1, u2, 0.0), SystemState(u1, u2, 5.0 * h),
                      SystemState(u1, u2, 10.0 * h)};
    traj.snapshot_steps = {0, 1, 2};

    SUBCASE("centered interface glues the phases") {
        // lab grid spacing equals h, so field nodes are lab nodes
        const PhysicalFrame f = reconstruct_physical(traj, g, -6.0, 7.5, 145);
        CHECK_FALSE(f.range_warning);
        auto lab_index = [&](double x) {
            return static_cast<int>(std::llround((x - (-6.0)) / h));
        };
        for (int i : {3, 10, 30}) {
            const double x = g.node(i);
            CHECK(f.values(0, lab_index(x)) == doctest::Approx(u1[i]).epsilon(1e-12));
            CHECK(f.values(0, lab_index(-x)) == doctest::Approx(u2[i]).epsilon(1e-12));
        }
    }
    SUBCASE("a drifting interface translates the features rigidly") {
        const PhysicalFrame f = reconstruct_physical(traj, g, -6.0, 7.5, 145);
        auto lab_index = [&](double x) {
            return static_cast<int>(std::llround((x - (-6.0)) / h));
        };
        const double probe = 16.0 * h; // offset from the interface, grid-aligned
        CHECK(f.values(0, lab_index(0.0 + probe)) ==
              doctest::Approx(f.values(1, lab_index(5.0 * h + probe))).epsilon(1e-12));
        CHECK(f.values(1, lab_index(5.0 * h + probe)) ==
              doctest::Approx(f.values(2, lab_index(10.0 * h + probe))).epsilon(1e-12));
    }
    SUBCASE("round trip recovers the centred fields at second order") {
        const PhysicalFrame f = reconstruct_physical(traj, g, -8.0, 8.0, 1281);
        const SystemState back = recenter_physical(f, 1, 5.0 * h, g);
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < g.n_points - 1; ++i) { // last node sits at the wall taper
            err = std::max(err, std::abs(back.u1[i] - u1[i]));
            scale = std::max(scale, std::abs(u1[i]));
        }
        CHECK(err < 0.01 * scale);
    }
    SUBCASE("uncovered interface warns") {
        const PhysicalFrame f = reconstruct_physical(traj, g, -2.0, 2.0, 161);
        CHECK(f.range_warning);
    }
}
