#pragma once

#include "stefanlab/grid.hpp"
#include "stefanlab/noise_basis.hpp"

#include <map>
#include <string>

namespace stefanlab {

/// Drift coefficient mu(x, y, z) from a named family with exact first
/// partials. Families:
///   zero      -- 0
///   affine    -- c0 + ca*exp(-x^2/(2 wx^2)) + cy*y + cz*z + cyz*y*z + cxy*x*y
///   logistic  -- rate * y * (1 - y / cap)
///   cubic_y   -- c3 * y^3
struct MuCoefficient {
    enum class Kind { zero, affine, logistic, cubic_y } kind = Kind::zero;
    double c0 = 0.0, ca = 0.0, wx = 1.0, cy = 0.0, cz = 0.0, cyz = 0.0, cxy = 0.0;
    double rate = 0.0, cap = 1.0, c3 = 0.0;

    double eval(double x, double y, double z) const;
    double dx(double x, double y, double z) const;
    double dy(double x, double y, double z) const;
    double dz(double x, double y, double z) const;
};

/// Diffusion coefficient sigma(x, y) with closed partials up to total
/// order 4. Families:
///   zero          -- 0
///   constant      -- s                       (violates sigma(x,0)=0; test use)
///   linear_y      -- s * y
///   quad_y        -- s * y^2
///   sin_y         -- s * sin(omega y)
///   gauss_env_y   -- s * exp(-x^2/(2 w^2)) * y
///   gauss_env_sin -- s * exp(-x^2/(2 w^2)) * sin(omega y)
struct SigmaCoefficient {
    enum class Kind { zero, constant, linear_y, quad_y, sin_y, gauss_env_y, gauss_env_sin } kind =
        Kind::zero;
    double s = 0.0, omega = 1.0, w = 1.0;

    /// d^{i+j} sigma / dx^i dy^j, i + j <= 4.
    double deriv(int i, int j, double x, double y) const;
    double eval(double x, double y) const { return deriv(0, 0, x, y); }
    double dy(double x, double y) const { return deriv(0, 1, x, y); }
};

/// Interface response rho(a, b). Families: zero, constant, difference
/// (kappa*(b-a), the classical Stefan flux imbalance), affine.
struct RhoCoefficient {
    enum class Kind { zero, constant, difference, affine } kind = Kind::zero;
    double c0 = 0.0, ca = 0.0, cb = 0.0, kappa = 0.0;

    double eval(double a, double b) const;
};

struct CoefficientSet {
    MuCoefficient mu_plus, mu_minus;
    SigmaCoefficient sigma_plus, sigma_minus;
    RhoCoefficient rho;
    double eta_plus = 1.0, eta_minus = 1.0;
    BoundarySpec boundary;
};

MuCoefficient make_mu(const std::string& name, const std::map<std::string, double>& params);
SigmaCoefficient make_sigma(const std::string& name, const std::map<std::string, double>& params);
RhoCoefficient make_rho(const std::string& name, const std::map<std::string, double>& params);

/// Reflected coefficients of the centred system:
///   mu2(x, y, z)   = mu_minus(-x, y, -z)
///   sigma2(x, y)   = sigma_minus(-x, y)
/// The sign of mu2 is fixed so that the inward-pointing conditions
/// (mu_minus <= 0 on the zero section) keep u2 inside the negative cone.
double mu2_eval(const MuCoefficient& mu_minus, double x, double y, double z);
double mu2_dy(const MuCoefficient& mu_minus, double x, double y, double z);
double sigma2_deriv(const SigmaCoefficient& sigma_minus, int i, int j, double x, double y);

// --- Nemytskii calculus -----------------------------------------------------

/// N(u)(x_i) = mu(x_i, u_i, du_i); non-finite output reports the node index.
Field nemytskii_eval(const MuCoefficient& mu, const HalfLineGrid& grid, const Field& u,
                     const Field& du);
Field nemytskii_eval(const SigmaCoefficient& sigma, const HalfLineGrid& grid, const Field& u);

/// DN(u)v = (d_y sigma)(x, u) .* v
Field nemytskii_derivative(const SigmaCoefficient& sigma, const HalfLineGrid& grid, const Field& u,
                           const Field& v);

/// D2N(u)[v, w] = (d_yy sigma)(x, u) .* v .* w
Field nemytskii_second_derivative(const SigmaCoefficient& sigma, const HalfLineGrid& grid,
                                  const Field& u, const Field& v, const Field& w);

// --- Noise operator Psi ------------------------------------------------------

/// Psi(u, x*) e_k on the grid: sigma(x_i, u_i) * (T_zeta e_k)(x* + x_i) for the
/// plus phase, argument x* - x_i for the minus phase. `sigma` is already the
/// centred coefficient of the phase (sigma1 or sigma2).
Field psi_eval(const SigmaCoefficient& sigma, const NoiseBasis& basis, const HalfLineGrid& grid,
               const Field& u, double x_star, int k, Phase phase);

/// Same value by direct quadrature of the kernel columns (oracle path).
Field psi_eval_direct(const SigmaCoefficient& sigma, const NoiseBasis& basis,
                      const HalfLineGrid& grid, const Field& u, double x_star, int k, Phase phase);

/// Hilbert-Schmidt norm sqrt(sum_k |Psi(u,x*) e_k|^2_{H^n,h}) over the basis.
double psi_hs_norm(const SigmaCoefficient& sigma, const NoiseBasis& basis,
                   const HalfLineGrid& grid, const Field& u, double x_star, int sobolev_order,
                   Phase phase = Phase::plus);

} // namespace stefanlab
