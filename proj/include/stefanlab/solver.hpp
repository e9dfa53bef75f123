#pragma once

#include "stefanlab/brownian.hpp"
#include "stefanlab/dynamics.hpp"

#include <optional>
#include <vector>

namespace stefanlab {

enum class SolverMode { ito, wong_zakai };

struct SolverConfig {
    double horizon = 1.0;
    double dt = 1e-3;
    SolverMode mode = SolverMode::ito;
    int n_modes = 1;
    int interp_m = 1;                         // interpolation level, WZ only
    std::optional<double> truncation_radius;  // none: untruncated dynamics
    double alpha = 0.5;                       // exponent of the truncation norm
    int sobolev_order = 1;                    // k of the exit-time norms
    std::vector<double> exit_radii;
    int snapshot_stride = 1;
    double explosion_norm = 1e6;
};

enum class RunStatus { completed, exploded };

struct Trajectory {
    double dt = 0.0;
    std::vector<double> norm_path;      // exit norm at every step, incl. t = 0
    std::vector<SystemState> snapshots; // strided states, always incl. t = 0
    std::vector<int> snapshot_steps;
    RunStatus status = RunStatus::completed;
    double end_time = 0.0;              // horizon, or the explosion time

    double time_of(int step) const { return step * dt; }
};

struct ExitTimeReport {
    double radius = 0.0;
    double tau_closed = 0.0;  // first time the norm exceeds the radius
    double sigma_open = 0.0;  // first time the norm reaches the radius
};

/// Immutable problem data shared by every step of a run.
struct SemilinearSystem {
    const HalfLineGrid& grid;
    const CoefficientSet& coeffs;
    const SpectralOperator& op_plus;
    const SpectralOperator& op_minus;
    const NoiseBasis& basis;

    double shift() const { return op_plus.shift; }
};

/// Exponential-Euler stepping engine; precomputes the semigroup matrices for
/// one fixed time step. Truncation, when set, scales the drift and the noise
/// directions by h_r(|X|_a^2) and the correction by its square.
class Stepper {
public:
    Stepper(const SemilinearSystem& sys, double dt, int n_modes,
            std::optional<double> truncation_radius, double alpha);

    /// X <- S_dt [ X + dt B(X) + sum_k sigma_k(X) dbeta_k ].
    SystemState step_ito(const SystemState& x, const Eigen::VectorXd& dbeta) const;

    /// X <- S_dt [ X + dt (B(X) - Sigma_inf(X) + sum_k sigma_k(X) slope_k) ].
    SystemState step_wz(const SystemState& x, const Eigen::VectorXd& slopes) const;

    const SemilinearSystem& system() const { return sys_; }
    double dt() const { return dt_; }
    int n_modes() const { return n_modes_; }
    double truncation_factor(const SystemState& x) const;

private:
    SystemState weighted_noise_sum(const SystemState& x, const Eigen::VectorXd& w) const;
    SystemState apply_semigroup(const SystemState& x) const;

    SemilinearSystem sys_;
    double dt_;
    int n_modes_;
    std::optional<TruncationProfile> trunc_;
    double alpha_;
    Eigen::MatrixXd sg_plus_, sg_minus_;
    double sg_scalar_;
};

/// Steps to the horizon or to explosion, recording the exit norm at every
/// step and strided state snapshots; reports closed/open-ball exit times for
/// every requested radius (inf of the empty set is the horizon).
std::pair<Trajectory, std::vector<ExitTimeReport>> run_trajectory(
    const SolverConfig& config, const SemilinearSystem& sys, const BrownianDriver& driver,
    const SystemState& initial);

enum class BallKind { open, closed };

/// First grid time with norm > r (closed) or >= r (open); horizon if never.
double exit_time(const std::vector<double>& norm_path, double dt, double horizon, double r,
                 BallKind kind);

} // namespace stefanlab
