#include "stefanlab/grid.hpp"

#include <cmath>
#include <string>

namespace stefanlab {

Eigen::VectorXd HalfLineGrid::nodes() const {
    Eigen::VectorXd x(n_points);
    for (int i = 0; i < n_points; ++i) x[i] = node(i);
    return x;
}

HalfLineGrid build_grid(double length, int n_points) {
    if (!(length > 0.0)) throw ConfigError("grid length must be positive");
    if (n_points < 3) throw ConfigError("grid needs at least 3 points");
    HalfLineGrid g;
    g.length = length;
    g.n_points = n_points;
    g.h = length / n_points;
    return g;
}

void check_field(const HalfLineGrid& grid, const Field& f, const char* what) {
    if (f.size() != grid.n_points)
        throw NumericError(std::string(what) + ": field length " + std::to_string(f.size()) +
                           " does not match grid (" + std::to_string(grid.n_points) + ")");
}

double l2_inner(const HalfLineGrid& grid, const Field& f, const Field& g) {
    check_field(grid, f, "l2_inner");
    check_field(grid, g, "l2_inner");
    return grid.h * f.dot(g);
}

double l2_norm(const HalfLineGrid& grid, const Field& f) {
    check_field(grid, f, "l2_norm");
    return std::sqrt(grid.h) * f.norm();
}

double sobolev_norm(const HalfLineGrid& grid, const Field& f, int order) {
    check_field(grid, f, "sobolev_norm");
    if (order < 0 || order > 2) throw ConfigError("sobolev_norm supports orders 0..2");
    const int n = grid.n_points;
    const double h = grid.h;
    double sq = grid.h * f.squaredNorm();
    if (order >= 1) {
        for (int i = 0; i + 1 < n; ++i) {
            const double d = (f[i + 1] - f[i]) / h;
            sq += h * d * d;
        }
    }
    if (order >= 2) {
        for (int i = 1; i + 1 < n; ++i) {
            const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
            sq += h * d2 * d2;
        }
    }
    return std::sqrt(sq);
}

double boundary_value(const HalfLineGrid& grid, const Field& f) {
    check_field(grid, f, "boundary_value");
    return 3.0 * f[0] - 3.0 * f[1] + f[2];
}

double boundary_derivative(const HalfLineGrid& grid, const Field& f, double u0) {
    check_field(grid, f, "boundary_derivative");
    return (-3.0 * u0 + 4.0 * f[0] - f[1]) / (2.0 * grid.h);
}

Field central_derivative(const HalfLineGrid& grid, const Field& f, double u0) {
    check_field(grid, f, "central_derivative");
    const int n = grid.n_points;
    Field d(n);
    const double two_h = 2.0 * grid.h;
    d[0] = (f[1] - u0) / two_h;
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / two_h;
    d[n - 1] = (0.0 - f[n - 2]) / two_h;
    return d;
}

} // namespace stefanlab
