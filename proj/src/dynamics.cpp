#include "stefanlab/dynamics.hpp"

#include <cmath>
#include <limits>

namespace stefanlab {

SystemState& SystemState::operator+=(const SystemState& o) {
    u1 += o.u1;
    u2 += o.u2;
    x_star += o.x_star;
    return *this;
}

SystemState& SystemState::operator*=(double a) {
    u1 *= a;
    u2 *= a;
    x_star *= a;
    return *this;
}

bool SystemState::finite() const {
    return u1.allFinite() && u2.allFinite() && std::isfinite(x_star);
}

SystemState zero_state(const HalfLineGrid& grid) {
    return SystemState(Field::Zero(grid.n_points), Field::Zero(grid.n_points), 0.0);
}

double state_alpha_norm(const SpectralOperator& op_plus, const SpectralOperator& op_minus,
                        double alpha, const SystemState& s) {
    const double a = alpha_norm(op_plus, alpha, s.u1);
    const double b = alpha_norm(op_minus, alpha, s.u2);
    return std::sqrt(a * a + b * b + s.x_star * s.x_star);
}

double state_exit_norm(const HalfLineGrid& grid, const SystemState& s, int sobolev_order) {
    return sobolev_norm(grid, s.u1, sobolev_order) + sobolev_norm(grid, s.u2, sobolev_order) +
           std::abs(s.x_star);
}

double state_sobolev_norm(const HalfLineGrid& grid, const SystemState& s, int sobolev_order) {
    const double a = sobolev_norm(grid, s.u1, sobolev_order);
    const double b = sobolev_norm(grid, s.u2, sobolev_order);
    return std::sqrt(a * a + b * b + s.x_star * s.x_star);
}

double interface_velocity(const SystemState& s, const CoefficientSet& coeffs,
                          const HalfLineGrid& grid) {
    double a, b;
    if (coeffs.boundary.kind == BoundaryKind::dirichlet) {
        a = boundary_derivative(grid, s.u1, 0.0);
        b = boundary_derivative(grid, s.u2, 0.0);
    } else {
        a = boundary_value(grid, s.u1);
        b = boundary_value(grid, s.u2);
    }
    const double v = coeffs.rho.eval(a, b);
    if (!std::isfinite(v)) throw NumericError("interface_velocity: rho returned non-finite value");
    return v;
}

namespace {

double trace_at_zero(const HalfLineGrid& grid, const Field& u, const BoundarySpec& bc) {
    return bc.kind == BoundaryKind::dirichlet ? 0.0 : boundary_value(grid, u);
}

} // namespace

SystemState assemble_drift(const SystemState& s, const CoefficientSet& coeffs,
                           const HalfLineGrid& grid, double shift_c) {
    const double rho_i = interface_velocity(s, coeffs, grid);
    const Field du1 = central_derivative(grid, s.u1, trace_at_zero(grid, s.u1, coeffs.boundary));
    const Field du2 = central_derivative(grid, s.u2, trace_at_zero(grid, s.u2, coeffs.boundary));

    SystemState b = zero_state(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        b.u1[i] = coeffs.mu_plus.eval(x, s.u1[i], du1[i]) + du1[i] * rho_i + shift_c * s.u1[i];
        b.u2[i] = mu2_eval(coeffs.mu_minus, x, s.u2[i], du2[i]) - du2[i] * rho_i +
                  shift_c * s.u2[i];
    }
    b.x_star = rho_i + shift_c * s.x_star;
    if (!b.finite()) throw NumericError("assemble_drift: non-finite drift");
    return b;
}

SystemState noise_mode(const SystemState& s, const CoefficientSet& coeffs,
                       const HalfLineGrid& grid, const NoiseBasis& basis, int k) {
    if (k < 0 || k >= basis.n_modes) throw ConfigError("noise_mode: mode index out of range");
    SystemState out = zero_state(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        out.u1[i] = coeffs.sigma_plus.eval(x, s.u1[i]) * basis.col(0, k, s.x_star + x);
        out.u2[i] =
            sigma2_deriv(coeffs.sigma_minus, 0, 0, x, s.u2[i]) * basis.col(0, k, s.x_star - x);
    }
    return out;
}

namespace {

// 1/2 * d_y sigma * sigma at each node, for both phase coefficients.
void dsigma_sigma(const SystemState& s, const CoefficientSet& coeffs, const HalfLineGrid& grid,
                  Field& f1, Field& f2) {
    f1.resize(grid.n_points);
    f2.resize(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        f1[i] = 0.5 * coeffs.sigma_plus.dy(x, s.u1[i]) * coeffs.sigma_plus.eval(x, s.u1[i]);
        f2[i] = 0.5 * sigma2_deriv(coeffs.sigma_minus, 0, 1, x, s.u2[i]) *
                sigma2_deriv(coeffs.sigma_minus, 0, 0, x, s.u2[i]);
    }
}

} // namespace

SystemState correction_sigma_n(const SystemState& s, const CoefficientSet& coeffs,
                               const HalfLineGrid& grid, const NoiseBasis& basis, int n) {
    if (n < 0 || n > basis.n_modes)
        throw ConfigError("correction_sigma_n: n exceeds the basis size");
    Field f1, f2;
    dsigma_sigma(s, coeffs, grid, f1, f2);
    SystemState out = zero_state(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        double sum_p = 0.0, sum_m = 0.0;
        for (int k = 0; k < n; ++k) {
            const double cp = basis.col(0, k, s.x_star + x);
            const double cm = basis.col(0, k, s.x_star - x);
            sum_p += cp * cp;
            sum_m += cm * cm;
        }
        out.u1[i] = f1[i] * sum_p;
        out.u2[i] = f2[i] * sum_m;
    }
    return out;
}

SystemState correction_sigma_inf(const SystemState& s, const CoefficientSet& coeffs,
                                 const HalfLineGrid& grid, const Kernel& kernel) {
    Field f1, f2;
    dsigma_sigma(s, coeffs, grid, f1, f2);
    SystemState out = zero_state(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        out.u1[i] = f1[i] * kernel.column_norm_sq(s.x_star + x);
        out.u2[i] = f2[i] * kernel.column_norm_sq(s.x_star - x);
    }
    return out;
}

SystemState correction_sigma_inf(const SystemState& s, const CoefficientSet& coeffs,
                                 const HalfLineGrid& grid, const NoiseBasis& basis) {
    Field f1, f2;
    dsigma_sigma(s, coeffs, grid, f1, f2);
    SystemState out = zero_state(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        out.u1[i] = f1[i] * basis.column_norm_sq(s.x_star + x);
        out.u2[i] = f2[i] * basis.column_norm_sq(s.x_star - x);
    }
    return out;
}

namespace {
double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double mollifier_d(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
} // namespace

double TruncationProfile::operator()(double s) const {
    const double lo = r * r, hi = (r + 1.0) * (r + 1.0);
    if (s <= lo) return 1.0;
    if (s >= hi) return 0.0;
    const double t = (s - lo) / (hi - lo);
    const double f = mollifier(t), g = mollifier(1.0 - t);
    return g / (f + g);
}

double TruncationProfile::derivative(double s) const {
    const double lo = r * r, hi = (r + 1.0) * (r + 1.0);
    if (s <= lo || s >= hi) return 0.0;
    const double t = (s - lo) / (hi - lo);
    const double f = mollifier(t), g = mollifier(1.0 - t);
    const double fd = mollifier_d(t), gd = -mollifier_d(1.0 - t);
    const double denom = (f + g) * (f + g);
    return ((gd * f - g * fd) / denom) / (hi - lo);
}

double truncate_factor(const SystemState& s, const TruncationProfile& profile,
                       const SpectralOperator& op_plus, const SpectralOperator& op_minus,
                       double alpha) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw ConfigError("truncate_factor: alpha must lie in [0, 1)");
    const double nrm = state_alpha_norm(op_plus, op_minus, alpha, s);
    return profile(nrm * nrm);
}

double nagumo_defect(const SystemState& s,
                     const std::function<SystemState(const SystemState&)>& drift,
                     const HalfLineGrid& grid, double eps) {
    if (!(eps > 0.0)) throw ConfigError("nagumo_defect: eps must be positive");
    SystemState y = s;
    y += eps * drift(s);
    double sq = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double v1 = std::min(y.u1[i], 0.0);
        const double v2 = std::max(y.u2[i], 0.0);
        sq += v1 * v1 + v2 * v2;
    }
    return std::sqrt(grid.h * sq) / eps;
}

std::pair<double, double> phase_separation_margin(const SystemState& s) {
    return {s.u1.minCoeff(), s.u2.maxCoeff()};
}

double cone_tolerance(const SystemState& s) {
    const double sup = std::max({s.u1.cwiseAbs().maxCoeff(), s.u2.cwiseAbs().maxCoeff(),
                                 std::abs(s.x_star)});
    return 10.0 * std::numeric_limits<double>::epsilon() * sup;
}

} // namespace stefanlab
