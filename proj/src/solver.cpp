#include "stefanlab/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stefanlab {

Stepper::Stepper(const SemilinearSystem& sys, double dt, int n_modes,
                 std::optional<double> truncation_radius, double alpha)
    : sys_(sys), dt_(dt), n_modes_(n_modes), alpha_(alpha) {
    if (!(dt > 0.0)) throw ConfigError("stepper: dt must be positive");
    if (n_modes < 0 || n_modes > sys.basis.n_modes)
        throw ConfigError("stepper: n_modes exceeds the basis size");
    if (truncation_radius) {
        if (!(*truncation_radius > 0.0))
            throw ConfigError("stepper: truncation radius must be positive");
        trunc_ = TruncationProfile{*truncation_radius};
    }
    sg_plus_ = semigroup_matrix(sys.op_plus, dt);
    sg_minus_ = semigroup_matrix(sys.op_minus, dt);
    sg_scalar_ = std::exp(-sys.shift() * dt);
}

double Stepper::truncation_factor(const SystemState& x) const {
    if (!trunc_) return 1.0;
    return truncate_factor(x, *trunc_, sys_.op_plus, sys_.op_minus, alpha_);
}

SystemState Stepper::weighted_noise_sum(const SystemState& x, const Eigen::VectorXd& w) const {
    SystemState out = zero_state(sys_.grid);
    const int n = sys_.grid.n_points;
    for (int i = 0; i < n; ++i) {
        const double xi = sys_.grid.node(i);
        const double s1 = sys_.coeffs.sigma_plus.eval(xi, x.u1[i]);
        const double s2 = sigma2_deriv(sys_.coeffs.sigma_minus, 0, 0, xi, x.u2[i]);
        if (s1 != 0.0) out.u1[i] = s1 * sys_.basis.weighted_cols_at(0, x.x_star + xi, w);
        if (s2 != 0.0) out.u2[i] = s2 * sys_.basis.weighted_cols_at(0, x.x_star - xi, w);
    }
    return out;
}

SystemState Stepper::apply_semigroup(const SystemState& x) const {
    SystemState out;
    out.u1 = sg_plus_ * x.u1;
    out.u2 = sg_minus_ * x.u2;
    out.x_star = sg_scalar_ * x.x_star;
    return out;
}

SystemState Stepper::step_ito(const SystemState& x, const Eigen::VectorXd& dbeta) const {
    if (dbeta.size() != n_modes_) throw ConfigError("step_ito: increment size mismatch");
    const double f = truncation_factor(x);
    SystemState y = x;
    if (f != 0.0) {
        y += (dt_ * f) * assemble_drift(x, sys_.coeffs, sys_.grid, sys_.shift());
        y += f * weighted_noise_sum(x, dbeta);
    }
    return apply_semigroup(y);
}

SystemState Stepper::step_wz(const SystemState& x, const Eigen::VectorXd& slopes) const {
    if (slopes.size() != n_modes_) throw ConfigError("step_wz: slope size mismatch");
    const double f = truncation_factor(x);
    SystemState y = x;
    if (f != 0.0) {
        SystemState rhs = assemble_drift(x, sys_.coeffs, sys_.grid, sys_.shift());
        rhs += (-f) * correction_sigma_inf(x, sys_.coeffs, sys_.grid, sys_.basis);
        rhs += weighted_noise_sum(x, slopes);
        y += (dt_ * f) * rhs;
    }
    return apply_semigroup(y);
}

double exit_time(const std::vector<double>& norm_path, double dt, double horizon, double r,
                 BallKind kind) {
    for (size_t j = 0; j < norm_path.size(); ++j) {
        const bool out = (kind == BallKind::closed) ? norm_path[j] > r : norm_path[j] >= r;
        if (out) return j * dt;
    }
    return horizon;
}

std::pair<Trajectory, std::vector<ExitTimeReport>> run_trajectory(
    const SolverConfig& config, const SemilinearSystem& sys, const BrownianDriver& driver,
    const SystemState& initial) {
    const double T = config.horizon;
    const long n_steps = std::llround(T / config.dt);
    if (n_steps < 1 || std::abs(n_steps * config.dt - T) > 1e-9 * T)
        throw ConfigError("run_trajectory: dt must divide the horizon");
    if (config.n_modes > driver.n_modes)
        throw ConfigError("run_trajectory: n_modes exceeds the sampled driver modes");
    if (std::abs(driver.horizon - T) > 1e-12 * std::max(1.0, T))
        throw ConfigError("run_trajectory: driver horizon differs from the solver horizon");

    const long fine_stride = std::llround(config.dt / driver.dt_fine);
    if (fine_stride < 1 || std::abs(fine_stride * driver.dt_fine - config.dt) > 1e-9 * config.dt)
        throw ConfigError("run_trajectory: dt must be a multiple of the fine path step");

    WZInterpolant interp;
    long steps_per_interval = 0;
    if (config.mode == SolverMode::wong_zakai) {
        interp = interpolate(driver, config.interp_m);
        steps_per_interval = n_steps / config.interp_m;
        if (steps_per_interval * config.interp_m != n_steps)
            throw ConfigError("run_trajectory: dt = " + std::to_string(config.dt) +
                              " must divide the interpolation interval T/m = " +
                              std::to_string(T / config.interp_m));
    }

    Stepper stepper(sys, config.dt, config.n_modes, config.truncation_radius, config.alpha);

    Trajectory traj;
    traj.dt = config.dt;
    traj.norm_path.reserve(n_steps + 1);
    SystemState x = initial;
    traj.norm_path.push_back(state_exit_norm(sys.grid, x, config.sobolev_order));
    traj.snapshots.push_back(x);
    traj.snapshot_steps.push_back(0);
    traj.status = RunStatus::completed;
    traj.end_time = T;

    Eigen::VectorXd noise_w(config.n_modes);
    for (long j = 0; j < n_steps; ++j) {
        if (config.mode == SolverMode::ito) {
            const long f0 = j * fine_stride, f1 = (j + 1) * fine_stride;
            for (int k = 0; k < config.n_modes; ++k)
                noise_w[k] = driver.increment(k, static_cast<int>(f0), static_cast<int>(f1));
            x = stepper.step_ito(x, noise_w);
        } else {
            const int interval = static_cast<int>(j / steps_per_interval);
            for (int k = 0; k < config.n_modes; ++k) noise_w[k] = interp.slopes(k, interval);
            x = stepper.step_wz(x, noise_w);
        }
        const bool finite = x.finite();
        const double nrm =
            finite ? state_exit_norm(sys.grid, x, config.sobolev_order)
                   : std::numeric_limits<double>::infinity();
        traj.norm_path.push_back(nrm);
        const long step = j + 1;
        if (step % config.snapshot_stride == 0 || step == n_steps) {
            traj.snapshots.push_back(x);
            traj.snapshot_steps.push_back(static_cast<int>(step));
        }
        if (!finite || nrm > config.explosion_norm) {
            traj.status = RunStatus::exploded;
            traj.end_time = step * config.dt;
            break;
        }
    }

    std::vector<ExitTimeReport> exits;
    exits.reserve(config.exit_radii.size());
    for (double r : config.exit_radii) {
        ExitTimeReport e;
        e.radius = r;
        e.tau_closed = exit_time(traj.norm_path, config.dt, T, r, BallKind::closed);
        e.sigma_open = exit_time(traj.norm_path, config.dt, T, r, BallKind::open);
        exits.push_back(e);
    }
    return {std::move(traj), std::move(exits)};
}

} // namespace stefanlab
