#pragma once

#include "stefanlab/grid.hpp"

#include <Eigen/Core>
#include <vector>

namespace stefanlab {

/// Eigendecomposition of the shifted negative Laplacian  -A = eta*(-Lap) + c
/// on the grid, with the inner boundary condition folded into the first row
/// and a homogeneous Dirichlet ghost at the far wall. Carries the full
/// spectral calculus: fractional powers, semigroup, interpolation norms.
///
/// Immutable after construction; eigenvectors are orthonormal with respect
/// to the diagonal quadrature weight `weights` (plain h for Dirichlet, h with
/// a boundary-adjusted first entry for Robin, which restores self-adjointness
/// of the one-sided ghost elimination).
struct SpectralOperator {
    HalfLineGrid grid;
    BoundarySpec bc;
    Phase phase = Phase::plus;
    double eta = 1.0;
    double shift = 1.0;               // c > 0; spectrum lies in [c, inf)
    Eigen::VectorXd lambda;           // ascending eigenvalues of -A_h
    Eigen::MatrixXd modes;            // columns = eigenvectors, W-orthonormal
    Eigen::VectorXd weights;          // diagonal of the mass matrix W

    int n() const { return grid.n_points; }
};

/// Dense stencil matrix of -A_h (before diagonalisation). Exposed for
/// direct-application cross-checks.
Eigen::MatrixXd dense_operator_matrix(const HalfLineGrid& grid, const BoundarySpec& bc,
                                      Phase phase, double eta, double shift);

SpectralOperator assemble_operator(const HalfLineGrid& grid, const BoundarySpec& bc,
                                   double eta, double shift, Phase phase = Phase::plus);

/// (-A)^alpha f  =  V diag(lambda^alpha) V^T W f.
Field fractional_power_apply(const SpectralOperator& op, double alpha, const Field& f);

/// e^{tA} f  =  V diag(e^{-lambda t}) V^T W f;  t = 0 is the identity.
Field semigroup_apply(const SpectralOperator& op, double t, const Field& f);

/// Dense matrix of e^{tA}; solvers precompute this once per time step size.
Eigen::MatrixXd semigroup_matrix(const SpectralOperator& op, double t);

/// W-weighted norm of (-A)^alpha f.
double alpha_norm(const SpectralOperator& op, double alpha, const Field& f);

double weighted_norm(const SpectralOperator& op, const Field& f);
double weighted_inner(const SpectralOperator& op, const Field& f, const Field& g);

/// Empirical constant sup over samples of t^(alpha-beta) e^(ct) |S_t f|_alpha / |f|_beta.
/// Finite and stable under refinement of the t grid toward 0.
double verify_smoothing_bound(const SpectralOperator& op, double alpha, double beta,
                              const std::vector<double>& t_samples,
                              const std::vector<Field>& f_samples);

} // namespace stefanlab
