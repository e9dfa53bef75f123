#include "stefanlab/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace stefanlab {

Eigen::MatrixXd dense_operator_matrix(const HalfLineGrid& grid, const BoundarySpec& bc,
                                      Phase phase, double eta, double shift) {
    const int n = grid.n_points;
    const double h = grid.h;
    const double s = eta / (h * h);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * s + shift;
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < n) m(i, i + 1) = -s;
    }
    if (bc.kind == BoundaryKind::robin) {
        // Eliminate the ghost value u(0) with the one-sided second-order
        // stencil du/dx(0) = (-3 u(0) + 4 u_1 - u_2)/(2h) = kappa u(0).
        const double d = 2.0 * bc.kappa(phase) * h + 3.0;
        m(0, 0) = s * (2.0 - 4.0 / d) + shift;
        m(0, 1) = -s * (1.0 - 1.0 / d);
    }
    // Dirichlet keeps the plain stencil: ghost u(0) = 0. The far wall beyond
    // the last node is a Dirichlet ghost in both cases.
    return m;
}

SpectralOperator assemble_operator(const HalfLineGrid& grid, const BoundarySpec& bc,
                                   double eta, double shift, Phase phase) {
    if (!(eta > 0.0)) throw ConfigError("assemble_operator: eta must be positive");
    if (!(shift > 0.0)) throw ConfigError("assemble_operator: shift c must be positive");

    const int n = grid.n_points;
    Eigen::MatrixXd m = dense_operator_matrix(grid, bc, phase, eta, shift);

    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, grid.h);
    if (bc.kind == BoundaryKind::robin) {
        // Unique first weight making the stencil W-self-adjoint:
        // w0 * m(0,1) = w1 * m(1,0).
        w[0] = grid.h * m(1, 0) / m(0, 1);
    }

    Eigen::VectorXd wsqrt = w.cwiseSqrt();
    Eigen::MatrixXd sym = wsqrt.asDiagonal() * m * wsqrt.cwiseInverse().asDiagonal();
    sym = 0.5 * (sym + sym.transpose()); // scrub rounding asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericError("assemble_operator: eigensolver failed");

    SpectralOperator op;
    op.grid = grid;
    op.bc = bc;
    op.phase = phase;
    op.eta = eta;
    op.shift = shift;
    op.lambda = es.eigenvalues();
    op.modes = wsqrt.cwiseInverse().asDiagonal() * es.eigenvectors();
    op.weights = w;

    if (op.lambda.minCoeff() < shift * (1.0 - 1e-10))
        throw NumericError("assemble_operator: spectrum not shifted to [c, inf)");
    return op;
}

namespace {

Eigen::VectorXd spectral_coefficients(const SpectralOperator& op, const Field& f) {
    check_field(op.grid, f, "spectral apply");
    return op.modes.transpose() * op.weights.cwiseProduct(f);
}

} // namespace

Field fractional_power_apply(const SpectralOperator& op, double alpha, const Field& f) {
    Eigen::VectorXd c = spectral_coefficients(op, f);
    if (alpha != 0.0)
        c.array() *= op.lambda.array().pow(alpha);
    return op.modes * c;
}

Field semigroup_apply(const SpectralOperator& op, double t, const Field& f) {
    if (t < 0.0) throw std::domain_error("semigroup_apply: t must be nonnegative");
    Eigen::VectorXd c = spectral_coefficients(op, f);
    if (t > 0.0)
        c.array() *= (-t * op.lambda.array()).exp();
    return op.modes * c;
}

Eigen::MatrixXd semigroup_matrix(const SpectralOperator& op, double t) {
    if (t < 0.0) throw std::domain_error("semigroup_matrix: t must be nonnegative");
    Eigen::VectorXd e = (-t * op.lambda.array()).exp();
    return op.modes * e.asDiagonal() * op.modes.transpose() * op.weights.asDiagonal();
}

double weighted_inner(const SpectralOperator& op, const Field& f, const Field& g) {
    check_field(op.grid, f, "weighted_inner");
    check_field(op.grid, g, "weighted_inner");
    return f.dot(op.weights.cwiseProduct(g));
}

double weighted_norm(const SpectralOperator& op, const Field& f) {
    return std::sqrt(weighted_inner(op, f, f));
}

double alpha_norm(const SpectralOperator& op, double alpha, const Field& f) {
    Eigen::VectorXd c = spectral_coefficients(op, f);
    if (alpha != 0.0)
        c.array() *= op.lambda.array().pow(alpha);
    return c.norm();
}

double verify_smoothing_bound(const SpectralOperator& op, double alpha, double beta,
                              const std::vector<double>& t_samples,
                              const std::vector<Field>& f_samples) {
    if (!(alpha > beta) || beta < 0.0)
        throw std::domain_error("verify_smoothing_bound requires alpha > beta >= 0");
    double best = 0.0;
    for (const Field& f : f_samples) {
        const double denom = alpha_norm(op, beta, f);
        if (denom <= 0.0) continue;
        for (double t : t_samples) {
            if (!(t > 0.0)) throw std::domain_error("verify_smoothing_bound: t must be positive");
            const Field sf = semigroup_apply(op, t, f);
            const double val =
                std::pow(t, alpha - beta) * std::exp(op.shift * t) * alpha_norm(op, alpha, sf) / denom;
            if (val > best) best = val;
        }
    }
    return best;
}

} // namespace stefanlab
