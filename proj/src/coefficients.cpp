#include "stefanlab/coefficients.hpp"

#include <cmath>
#include <string>

namespace stefanlab {

namespace {

// (d/dx)^i exp(-x^2/(2 w^2)) via probabilists' Hermite polynomials.
double gauss_deriv(int i, double x, double w) {
    const double u = x / w;
    double hm1 = 0.0, h = 1.0;
    for (int k = 0; k < i; ++k) {
        const double next = u * h - k * hm1;
        hm1 = h;
        h = next;
    }
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    return sign * h * std::exp(-0.5 * u * u) / std::pow(w, i);
}

double sin_deriv(int j, double omega, double y) {
    return std::pow(omega, j) * std::sin(omega * y + 0.5 * M_PI * j);
}

[[noreturn]] void bad_param(const std::string& what) { throw ConfigError(what); }

double get_param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

} // namespace

double MuCoefficient::eval(double x, double y, double z) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::affine:
            return c0 + ca * gauss_deriv(0, x, wx) + cy * y + cz * z + cyz * y * z + cxy * x * y;
        case Kind::logistic: return rate * y * (1.0 - y / cap);
        case Kind::cubic_y: return c3 * y * y * y;
    }
    return 0.0;
}

double MuCoefficient::dx(double x, double y, double /*z*/) const {
    return kind == Kind::affine ? ca * gauss_deriv(1, x, wx) + cxy * y : 0.0;
}

double MuCoefficient::dy(double x, double y, double z) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::affine: return cy + cyz * z + cxy * x;
        case Kind::logistic: return rate * (1.0 - 2.0 * y / cap);
        case Kind::cubic_y: return 3.0 * c3 * y * y;
    }
    return 0.0;
}

double MuCoefficient::dz(double /*x*/, double y, double /*z*/) const {
    return kind == Kind::affine ? cz + cyz * y : 0.0;
}

double SigmaCoefficient::deriv(int i, int j, double x, double y) const {
    if (i < 0 || j < 0 || i + j > 4)
        throw std::domain_error("sigma derivative order out of range (i + j <= 4)");
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::constant: return (i == 0 && j == 0) ? s : 0.0;
        case Kind::linear_y:
            if (i > 0) return 0.0;
            return j == 0 ? s * y : (j == 1 ? s : 0.0);
        case Kind::quad_y:
            if (i > 0) return 0.0;
            if (j == 0) return s * y * y;
            if (j == 1) return 2.0 * s * y;
            return j == 2 ? 2.0 * s : 0.0;
        case Kind::sin_y:
            if (i > 0) return 0.0;
            return s * sin_deriv(j, omega, y);
        case Kind::gauss_env_y: {
            const double yfac = (j == 0) ? y : (j == 1 ? 1.0 : 0.0);
            return s * gauss_deriv(i, x, w) * yfac;
        }
        case Kind::gauss_env_sin:
            return s * gauss_deriv(i, x, w) * sin_deriv(j, omega, y);
    }
    return 0.0;
}

double RhoCoefficient::eval(double a, double b) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::constant: return c0;
        case Kind::difference: return kappa * (b - a);
        case Kind::affine: return c0 + ca * a + cb * b;
    }
    return 0.0;
}

MuCoefficient make_mu(const std::string& name, const std::map<std::string, double>& params) {
    MuCoefficient m;
    if (name == "zero") {
        m.kind = MuCoefficient::Kind::zero;
    } else if (name == "affine") {
        m.kind = MuCoefficient::Kind::affine;
        m.c0 = get_param(params, "c0", 0.0);
        m.ca = get_param(params, "ca", 0.0);
        m.wx = get_param(params, "wx", 1.0);
        m.cy = get_param(params, "cy", 0.0);
        m.cz = get_param(params, "cz", 0.0);
        m.cyz = get_param(params, "cyz", 0.0);
        m.cxy = get_param(params, "cxy", 0.0);
        if (!(m.wx > 0.0)) bad_param("mu affine: wx must be positive");
    } else if (name == "logistic") {
        m.kind = MuCoefficient::Kind::logistic;
        m.rate = get_param(params, "rate", 1.0);
        m.cap = get_param(params, "cap", 1.0);
        if (m.cap == 0.0) bad_param("mu logistic: cap must be nonzero");
    } else if (name == "cubic_y") {
        m.kind = MuCoefficient::Kind::cubic_y;
        m.c3 = get_param(params, "c3", 1.0);
    } else {
        bad_param("unknown mu coefficient '" + name + "' (available: zero, affine, logistic, cubic_y)");
    }
    return m;
}

SigmaCoefficient make_sigma(const std::string& name, const std::map<std::string, double>& params) {
    SigmaCoefficient sc;
    sc.s = get_param(params, "s", 1.0);
    sc.omega = get_param(params, "omega", 1.0);
    sc.w = get_param(params, "w", 1.0);
    if (name == "zero")
        sc.kind = SigmaCoefficient::Kind::zero;
    else if (name == "constant")
        sc.kind = SigmaCoefficient::Kind::constant;
    else if (name == "linear_y")
        sc.kind = SigmaCoefficient::Kind::linear_y;
    else if (name == "quad_y")
        sc.kind = SigmaCoefficient::Kind::quad_y;
    else if (name == "sin_y")
        sc.kind = SigmaCoefficient::Kind::sin_y;
    else if (name == "gauss_env_y")
        sc.kind = SigmaCoefficient::Kind::gauss_env_y;
    else if (name == "gauss_env_sin")
        sc.kind = SigmaCoefficient::Kind::gauss_env_sin;
    else
        bad_param("unknown sigma coefficient '" + name +
                  "' (available: zero, constant, linear_y, quad_y, sin_y, gauss_env_y, gauss_env_sin)");
    if (!(sc.w > 0.0)) bad_param("sigma: envelope width w must be positive");
    return sc;
}

RhoCoefficient make_rho(const std::string& name, const std::map<std::string, double>& params) {
    RhoCoefficient r;
    if (name == "zero")
        r.kind = RhoCoefficient::Kind::zero;
    else if (name == "constant") {
        r.kind = RhoCoefficient::Kind::constant;
        r.c0 = get_param(params, "c0", 0.0);
    } else if (name == "difference") {
        r.kind = RhoCoefficient::Kind::difference;
        r.kappa = get_param(params, "kappa", 1.0);
    } else if (name == "affine") {
        r.kind = RhoCoefficient::Kind::affine;
        r.c0 = get_param(params, "c0", 0.0);
        r.ca = get_param(params, "ca", 0.0);
        r.cb = get_param(params, "cb", 0.0);
    } else {
        bad_param("unknown rho coefficient '" + name +
                  "' (available: zero, constant, difference, affine)");
    }
    return r;
}

double mu2_eval(const MuCoefficient& mu_minus, double x, double y, double z) {
    return mu_minus.eval(-x, y, -z);
}

double mu2_dy(const MuCoefficient& mu_minus, double x, double y, double z) {
    return mu_minus.dy(-x, y, -z);
}

double sigma2_deriv(const SigmaCoefficient& sigma_minus, int i, int j, double x, double y) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0; // chain rule through x -> -x
    return sign * sigma_minus.deriv(i, j, -x, y);
}

// --- Nemytskii calculus -----------------------------------------------------

namespace {
void check_finite(const Field& out, const char* what) {
    for (int i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw NumericError(std::string(what) + ": non-finite value at node " +
                               std::to_string(i));
}
} // namespace

Field nemytskii_eval(const MuCoefficient& mu, const HalfLineGrid& grid, const Field& u,
                     const Field& du) {
    check_field(grid, u, "nemytskii_eval");
    check_field(grid, du, "nemytskii_eval");
    Field out(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) out[i] = mu.eval(grid.node(i), u[i], du[i]);
    check_finite(out, "nemytskii_eval(mu)");
    return out;
}

Field nemytskii_eval(const SigmaCoefficient& sigma, const HalfLineGrid& grid, const Field& u) {
    check_field(grid, u, "nemytskii_eval");
    Field out(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) out[i] = sigma.eval(grid.node(i), u[i]);
    check_finite(out, "nemytskii_eval(sigma)");
    return out;
}

Field nemytskii_derivative(const SigmaCoefficient& sigma, const HalfLineGrid& grid, const Field& u,
                           const Field& v) {
    check_field(grid, u, "nemytskii_derivative");
    check_field(grid, v, "nemytskii_derivative");
    Field out(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) out[i] = sigma.dy(grid.node(i), u[i]) * v[i];
    check_finite(out, "nemytskii_derivative");
    return out;
}

Field nemytskii_second_derivative(const SigmaCoefficient& sigma, const HalfLineGrid& grid,
                                  const Field& u, const Field& v, const Field& w) {
    check_field(grid, u, "nemytskii_second_derivative");
    Field out(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i)
        out[i] = sigma.deriv(0, 2, grid.node(i), u[i]) * v[i] * w[i];
    check_finite(out, "nemytskii_second_derivative");
    return out;
}

// --- Noise operator Psi -------------------------------------------------------

Field psi_eval(const SigmaCoefficient& sigma, const NoiseBasis& basis, const HalfLineGrid& grid,
               const Field& u, double x_star, int k, Phase phase) {
    check_field(grid, u, "psi_eval");
    if (k < 0 || k >= basis.n_modes) throw ConfigError("psi_eval: mode index out of range");
    Field out(grid.n_points);
    const double sgn = (phase == Phase::plus) ? 1.0 : -1.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        out[i] = sigma.eval(x, u[i]) * basis.col(0, k, x_star + sgn * x);
    }
    return out;
}

Field psi_eval_direct(const SigmaCoefficient& sigma, const NoiseBasis& basis,
                      const HalfLineGrid& grid, const Field& u, double x_star, int k,
                      Phase phase) {
    check_field(grid, u, "psi_eval_direct");
    Field out(grid.n_points);
    const double sgn = (phase == Phase::plus) ? 1.0 : -1.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        out[i] = sigma.eval(x, u[i]) * basis.col_direct(0, k, x_star + sgn * x);
    }
    return out;
}

double psi_hs_norm(const SigmaCoefficient& sigma, const NoiseBasis& basis,
                   const HalfLineGrid& grid, const Field& u, double x_star, int sobolev_order,
                   Phase phase) {
    if (sobolev_order < 0 || sobolev_order > 2)
        throw ConfigError("psi_hs_norm: sobolev_order must be 0, 1 or 2");
    double sq = 0.0;
    for (int k = 0; k < basis.n_modes; ++k) {
        const Field col = psi_eval(sigma, basis, grid, u, x_star, k, phase);
        const double nk = sobolev_norm(grid, col, sobolev_order);
        sq += nk * nk;
    }
    return std::sqrt(sq);
}

} // namespace stefanlab
