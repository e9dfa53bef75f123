#pragma once

#include "stefanlab/kernel.hpp"

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

namespace stefanlab {

/// Truncated CONS (e_k) on [-L_y, L_y] together with precomputed columns
/// T_zeta e_k, T_zeta' e_k, T_zeta'' e_k and |zeta(x,.)|^2 tabulated on a
/// uniform evaluation grid. Off-grid values come from cubic interpolation.
/// Immutable and shareable across threads.
struct NoiseBasis {
    std::shared_ptr<const Kernel> kernel;
    int n_modes = 0;
    double half_width = 0.0;   // L_y of the mode family (= kernel support)
    double x_lo = 0.0, x_hi = 0.0, resolution = 0.0;
    int n_eval = 0;
    Eigen::MatrixXd columns[3]; // (n_eval x K) for derivative orders 0,1,2
    Eigen::VectorXd norm_sq;    // |zeta(x_i,.)|_{L2}^2 on the eval grid

    double mode(int k, double y) const { return trig_mode(k, half_width, y); }

    /// Interpolated T_{zeta^(i)} e_k at x. Throws RangeError outside the grid.
    double col(int deriv, int k, double x) const;

    /// Direct Simpson evaluation of the same column (no tabulation).
    double col_direct(int deriv, int k, double x) const;

    /// All K interpolated columns at x in one stencil evaluation.
    Eigen::VectorXd cols_at(int deriv, double x) const;

    /// dot(w, cols_at(deriv, x)) without the temporary.
    double weighted_cols_at(int deriv, double x, const Eigen::VectorXd& w) const;

    /// Interpolated |zeta(x,.)|^2.
    double column_norm_sq(double x) const;

    void check_range(double x) const;
};

NoiseBasis build_basis(const std::shared_ptr<const Kernel>& kernel, int n_modes,
                       double x_lo, double x_hi, double resolution);

/// T_zeta w at the given points by direct quadrature, w a function of y.
Eigen::VectorXd apply_T_zeta(const Kernel& kernel, const std::function<double(double)>& w,
                             const std::vector<double>& x_points);

/// T_zeta w for w given by coefficients in the basis (uses the columns).
Eigen::VectorXd apply_T_zeta(const NoiseBasis& basis, const Eigen::VectorXd& coeffs,
                             const std::vector<double>& x_points);

/// |zeta(x,.)|^2 minus the partial Parseval sum over the retained modes;
/// nonnegative up to quadrature error by Bessel's inequality.
double parseval_defect(const NoiseBasis& basis, double x);

/// Gram matrix of the first K modes under the kernel's quadrature rule.
Eigen::MatrixXd basis_gram(const NoiseBasis& basis);

} // namespace stefanlab
