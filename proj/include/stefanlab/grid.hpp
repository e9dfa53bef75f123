#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace stefanlab {

/// Discretised field on the truncated half-line; one value per grid node.
using Field = Eigen::VectorXd;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Phase { plus, minus };

/// Uniform grid on (0, L] with interior-node convention: x_i = (i+1)*h,
/// h = L / n_points. The inner boundary x = 0 and the artificial far wall
/// live on ghost positions, not on stored nodes.
struct HalfLineGrid {
    double length = 0.0;
    int n_points = 0;
    double h = 0.0;

    double node(int i) const { return (i + 1) * h; }
    Eigen::VectorXd nodes() const;
};

HalfLineGrid build_grid(double length, int n_points);

enum class BoundaryKind { dirichlet, robin };

/// Inner boundary condition at x = 0 for the two phases. Robin encodes
/// du/dx(0) = kappa * u(0); Dirichlet is the kappa -> infinity limit.
/// The far end at x = L is always a homogeneous Dirichlet wall.
struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::dirichlet;
    double kappa_plus = 1.0;
    double kappa_minus = 1.0;

    double kappa(Phase p) const { return p == Phase::plus ? kappa_plus : kappa_minus; }
};

inline BoundarySpec dirichlet_boundary() { return {BoundaryKind::dirichlet, 0.0, 0.0}; }
inline BoundarySpec robin_boundary(double kp, double km) {
    if (kp <= 0.0 || km <= 0.0) throw ConfigError("robin boundary requires kappa > 0");
    return {BoundaryKind::robin, kp, km};
}

void check_field(const HalfLineGrid& grid, const Field& f, const char* what);

/// Plain h-weighted discrete L2 norm.
double l2_norm(const HalfLineGrid& grid, const Field& f);
double l2_inner(const HalfLineGrid& grid, const Field& f, const Field& g);

/// Discrete Sobolev norms via difference quotients:
///   |u|_{H1,h}^2 = |u|^2 + |D+ u|^2,  H2 adds the centred second quotient.
double sobolev_norm(const HalfLineGrid& grid, const Field& f, int order);

/// Boundary trace u(0+) by quadratic extrapolation from the first three nodes.
double boundary_value(const HalfLineGrid& grid, const Field& f);

/// One-sided second-order derivative at x = 0 given the boundary value u(0).
double boundary_derivative(const HalfLineGrid& grid, const Field& f, double u0);

/// Centred first derivative on all nodes. u(0) is supplied by the caller
/// (0 for Dirichlet, extrapolated trace for Robin); the far ghost is 0.
Field central_derivative(const HalfLineGrid& grid, const Field& f, double u0);

} // namespace stefanlab
