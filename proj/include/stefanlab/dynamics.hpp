#pragma once

#include "stefanlab/coefficients.hpp"
#include "stefanlab/noise_basis.hpp"
#include "stefanlab/spectral.hpp"

#include <functional>

namespace stefanlab {

/// State X = (u1, u2, x*) of the centred two-phase system on L2 + L2 + R.
struct SystemState {
    Field u1, u2;
    double x_star = 0.0;

    SystemState() = default;
    SystemState(Field a, Field b, double x) : u1(std::move(a)), u2(std::move(b)), x_star(x) {}

    SystemState& operator+=(const SystemState& o);
    SystemState& operator*=(double a);
    friend SystemState operator+(SystemState l, const SystemState& r) { return l += r; }
    friend SystemState operator*(double a, SystemState s) { return s *= a; }

    bool finite() const;
};

SystemState zero_state(const HalfLineGrid& grid);

/// sqrt(|u1|_a^2 + |u2|_a^2 + x*^2) in the operator pair's fractional norms.
double state_alpha_norm(const SpectralOperator& op_plus, const SpectralOperator& op_minus,
                        double alpha, const SystemState& s);

/// |u1|_{Hk,h} + |u2|_{Hk,h} + |x*| -- the exit-time functional.
double state_exit_norm(const HalfLineGrid& grid, const SystemState& s, int sobolev_order);

/// Hilbertian difference norm sqrt(|u1|_{Hk}^2 + |u2|_{Hk}^2 + x*^2).
double state_sobolev_norm(const HalfLineGrid& grid, const SystemState& s, int sobolev_order);

/// rho applied to the interface data: one-sided derivatives at 0 under
/// Dirichlet conditions, extrapolated boundary traces under Robin.
double interface_velocity(const SystemState& s, const CoefficientSet& coeffs,
                          const HalfLineGrid& grid);

/// Nonlinear drift triple B(X) including the +c*Id compensation that cancels
/// the -c*Id inside the linear part (on all three components).
SystemState assemble_drift(const SystemState& s, const CoefficientSet& coeffs,
                           const HalfLineGrid& grid, double shift_c);

/// k-th noise direction sigma_k(X) = C(X) e_k; third component is 0.
SystemState noise_mode(const SystemState& s, const CoefficientSet& coeffs,
                       const HalfLineGrid& grid, const NoiseBasis& basis, int k);

/// Finite-mode Wong-Zakai correction Sigma_n(X) = 1/2 sum_k D sigma_k sigma_k.
SystemState correction_sigma_n(const SystemState& s, const CoefficientSet& coeffs,
                               const HalfLineGrid& grid, const NoiseBasis& basis, int n);

/// Closed-form limit correction using |zeta(x* +- x, .)|^2 by direct quadrature.
SystemState correction_sigma_inf(const SystemState& s, const CoefficientSet& coeffs,
                                 const HalfLineGrid& grid, const Kernel& kernel);

/// Same using the norm column tabulated in the basis (fast path for solvers).
SystemState correction_sigma_inf(const SystemState& s, const CoefficientSet& coeffs,
                                 const HalfLineGrid& grid, const NoiseBasis& basis);

/// Smooth cutoff h_r: equal to 1 on [0, r^2], 0 on [(r+1)^2, inf), with
/// derivative bounds uniform in r.
struct TruncationProfile {
    double r = 1.0;
    double operator()(double s) const;   // h_r(s)
    double derivative(double s) const;   // h_r'(s)
};

/// h_r(|X|_a^2) with |X|_a^2 = |u1|_a^2 + |u2|_a^2 + x*^2.
double truncate_factor(const SystemState& s, const TruncationProfile& profile,
                       const SpectralOperator& op_plus, const SpectralOperator& op_minus,
                       double alpha);

/// eps^-1 dist(X + eps Phi(X); M) for the sign cone M = {u1 >= 0, u2 <= 0},
/// via the minimal projection (clip u1 below 0, u2 above 0).
double nagumo_defect(const SystemState& s,
                     const std::function<SystemState(const SystemState&)>& drift,
                     const HalfLineGrid& grid, double eps);

/// (min over nodes of u1, max over nodes of u2); membership in the discrete
/// cone means first >= -tol and second <= tol.
std::pair<double, double> phase_separation_margin(const SystemState& s);

double cone_tolerance(const SystemState& s);

} // namespace stefanlab
