#pragma once

#include "stefanlab/assumptions.hpp"
#include "stefanlab/solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stefanlab {

/// Monte-Carlo estimate with a batch-means standard error (10 batches).
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

McEstimate batch_mean_estimate(const std::vector<double>& values, int batches = 10);

/// Run fn(sample_index) over a worker pool; outputs must be written to
/// per-index slots so the reduction is independent of the thread count.
void parallel_for_samples(int samples, int threads, const std::function<void(int)>& fn);

// --- Wong-Zakai convergence study -------------------------------------------

struct ConvergenceCell {
    int m = 0, n = 0;
    McEstimate stopped_error; // E sup_{t<=stop} |X - Z_{m,n}|^{2p}_{Hk}
    int incomplete = 0;       // samples dropped by explosion, flagged not hidden
};

struct ConvergenceReport {
    std::vector<int> m_list, n_list;
    std::vector<ConvergenceCell> cells; // row-major: for each m, all n
    int samples = 0, p = 1, sobolev_order = 1;
    double stop_radius = 0.0, stop_epsilon = 0.0;
    bool flagged = false; // too few completed samples somewhere

    const ConvergenceCell& cell(int m, int n) const;
};

/// For every seed: one Ito reference with all basis modes on the finest time
/// step, and the matrix of Wong-Zakai runs on coupled drivers. The sup-norm
/// difference is stopped at tau^(r) of the reference wedge sigma^(r+eps) of
/// the approximation. Time steps scale as dt_m = (T/m)/m so the integrator
/// error vanishes relative to the interpolation limit.
ConvergenceReport wz_convergence_study(const SemilinearSystem& sys, const SystemState& initial,
                                       double horizon, const std::vector<int>& m_list,
                                       const std::vector<int>& n_list, int samples, int p,
                                       double stop_radius, double stop_epsilon, int sobolev_order,
                                       std::uint64_t seed, int threads);

// --- Phase separation ---------------------------------------------------------

struct PhaseSeparationReport {
    int samples = 0;
    double tol_sep = 0.0;
    double calibration_c = 0.0;       // tol_sep = C * (h^2 + dt)
    double baseline_dip = 0.0;        // worst cone dip of the noiseless run
    bool validator_pass = false;
    struct SampleMargin {
        int sample = 0;
        double ito_margin = 0.0;      // most negative cone margin over the run
        double wz_margin = 0.0;
    };
    std::vector<SampleMargin> margins;
    std::vector<int> violating_samples;
    bool pass = false;
};

/// Runs Ito and Wong-Zakai ensembles from a cone initial state and reports
/// the worst cone margin per sample. Refuses to run when the coefficients
/// fail the inward-pointing validator, unless allow_violating is set (the
/// negative-control mode); detections still fail the verdict.
PhaseSeparationReport phase_separation_experiment(const SemilinearSystem& sys,
                                                  const SystemState& initial, SolverConfig solver,
                                                  int samples, std::uint64_t seed, int threads,
                                                  bool allow_violating);

// --- Exit-time consistency ----------------------------------------------------

struct ExitFamilyResult {
    std::string name;
    bool one_sided_ok = true;  // robust forms of the liminf/limsup laws
    bool sandwich_ok = true;   // sigma^(r) <= tau^(r) <= sigma^(r+eps) <= tau^(r+eps)
    bool limit_ok = true;      // family-specific convergence expectations
    double t_inf = 0.0, s_inf = 0.0;
};

struct ExitConsistencyReport {
    std::vector<ExitFamilyResult> families;
    bool pass = false;
};

/// Checks the exit-time laws on constructed families with known limits.
ExitConsistencyReport exit_time_consistency_synthetic(double horizon, double dt);

/// Same laws on recorded trajectory families: Wong-Zakai runs with increasing
/// m against the coupled Ito reference.
ExitConsistencyReport exit_time_consistency_trajectories(const SemilinearSystem& sys,
                                                         const SystemState& initial,
                                                         SolverConfig solver,
                                                         const std::vector<int>& m_list,
                                                         int families, std::uint64_t seed,
                                                         int threads);

// --- Scalar (spatially degenerate) reduction -----------------------------------

struct OdeReductionReport {
    double sigma = 0.0, horizon = 0.0;
    std::vector<double> dt_levels, rms_errors;
    double strong_order_slope = 0.0;
    std::vector<int> m_list;
    std::vector<double> corrected_gap_mean;   // |Z_m(T) - X_T| per level
    double fraction_improved = 0.0;           // gap(m_max) < gap(m_min) per sample
    double uncorrected_mean_log_gap = 0.0;
    double expected_log_gap = 0.0;            // sigma^2 T / 2
    double zero_noise_discrepancy = 0.0;      // max |ito - wz| when sigma = 0
    bool pass = false;
};

/// Degenerate configuration (one effective node, T_zeta e_1 = 1, no drift
/// content): the steppers reduce to scalar schemes for dX = sigma X dbeta and
/// its Wong-Zakai equation, compared against the geometric Brownian closed
/// form; includes the uncorrected negative control.
OdeReductionReport ode_reduction_check(double sigma_const, double horizon,
                                       const std::vector<int>& m_list, int samples,
                                       std::uint64_t seed, int threads);

// --- Physical-frame reconstruction ---------------------------------------------

struct PhysicalFrame {
    Eigen::VectorXd lab_nodes;
    std::vector<double> times;
    Eigen::MatrixXd values; // one row per recorded snapshot
    bool range_warning = false;
};

/// Lab-frame field v with v(x* + x) = u1(x), v(x* - x) = u2(x), linearly
/// interpolated onto a fixed grid. Warns when the lab grid fails to cover
/// x*(t) +- L.
PhysicalFrame reconstruct_physical(const Trajectory& traj, const HalfLineGrid& grid,
                                   double lab_lo, double lab_hi, int lab_points);

/// Inverse of the reconstruction at one snapshot; used by round-trip checks.
SystemState recenter_physical(const PhysicalFrame& frame, int snapshot_row, double x_star,
                              const HalfLineGrid& grid);

} // namespace stefanlab
