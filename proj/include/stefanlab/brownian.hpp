#pragma once

#include "stefanlab/grid.hpp"

#include <Eigen/Core>
#include <cstdint>

namespace stefanlab {

/// Deterministic seed split: one master seed, one stream per trajectory.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// Seeded Brownian paths beta_k on the fine time grid {j * dt_fine}.
/// One fine path per seed; every interpolation level derives from it, so
/// refining m never changes the underlying randomness.
struct BrownianDriver {
    std::uint64_t seed = 0;
    int n_modes = 0;
    double horizon = 0.0;
    double dt_fine = 0.0;
    int n_fine = 0;             // number of fine intervals
    Eigen::MatrixXd path;       // (n_modes x n_fine+1), beta_k(0) = 0

    double value(int k, int j) const { return path(k, j); }
    /// beta_k(t1) - beta_k(t0) for fine-grid indices j0 <= j1.
    double increment(int k, int j0, int j1) const { return path(k, j1) - path(k, j0); }
};

BrownianDriver sample_paths(std::uint64_t seed, int n_modes, double horizon, double dt_fine);

/// Piecewise-linear interpolant on the level-m partition: delta_m = T/m.
/// The slope is constant on each [i delta_m, (i+1) delta_m) and depends only
/// on the path values at the two bracketing partition nodes.
struct WZInterpolant {
    int m = 0;
    double delta = 0.0;         // T / m
    double horizon = 0.0;
    Eigen::MatrixXd node_values; // (n_modes x m+1)
    Eigen::MatrixXd slopes;      // (n_modes x m)

    int interval_of(double t) const;
    double value(int k, double t) const;
    double slope(int k, double t) const { return slopes(k, interval_of(t)); }
};

WZInterpolant interpolate(const BrownianDriver& driver, int m);

} // namespace stefanlab
