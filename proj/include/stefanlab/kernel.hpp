#pragma once

#include "stefanlab/grid.hpp"

#include <Eigen/Core>
#include <map>
#include <memory>
#include <string>

namespace stefanlab {

/// Orthonormal trigonometric family on [-L, L], zero-extended:
/// k = 0 the constant mode, then alternating cos/sin pairs.
double trig_mode(int k, double half_width, double y);

/// Integral kernel zeta(x, y) of the colouring operator T_zeta, with closed
/// x-derivatives up to order 4. `y_support` bounds the y-extent used by all
/// quadratures; beyond it the kernel columns are treated as negligible.
class Kernel {
public:
    virtual ~Kernel() = default;

    /// d^i/dx^i zeta(x, y), i in 0..4.
    virtual double deriv_x(int i, double x, double y) const = 0;
    double eval(double x, double y) const { return deriv_x(0, x, y); }

    virtual double y_support() const = 0;
    virtual std::string name() const = 0;

    int quadrature_intervals() const { return quad_intervals_; }
    void set_quadrature_intervals(int n) { quad_intervals_ = n; }

    /// |zeta^(i)(x, .)|_{L2}^2 over the support window, by Simpson.
    double column_norm_sq(int i, double x) const;
    double column_norm_sq(double x) const { return column_norm_sq(0, x); }

    /// sup_x |zeta^(i)(x,.)|_{L2} estimated on a sample of x values.
    double sup_column_norm(int i, double x_lo, double x_hi, int samples = 64) const;

private:
    int quad_intervals_ = 2048;
};

/// zeta(x, y) = amp * exp(-(x-y)^2 / (2 w^2)); smooth convolution kernel.
class GaussianConvolutionKernel final : public Kernel {
public:
    GaussianConvolutionKernel(double amplitude, double width, double y_support);
    double deriv_x(int i, double x, double y) const override;
    double y_support() const override { return support_; }
    std::string name() const override { return "gaussian_convolution"; }
    double amplitude() const { return amp_; }
    double width() const { return width_; }

private:
    double amp_, width_, support_;
};

/// Separable zeta(x, y) = phi(x) * e_mode(y) aligned with one basis mode.
/// phi is either identically `amp` or a Gaussian bump of the given width.
class Rank1Kernel final : public Kernel {
public:
    Rank1Kernel(int mode, double half_width, double amp, double phi_width /* <=0: flat */);
    double deriv_x(int i, double x, double y) const override;
    double y_support() const override { return half_width_; }
    std::string name() const override { return "rank1"; }
    int mode() const { return mode_; }

private:
    double phi_deriv(int i, double x) const;
    int mode_;
    double half_width_, amp_, phi_width_;
};

/// Kernel tabulated on a uniform (x, y) lattice, loaded from CSV.
/// x-derivatives are built by repeated centred differencing of the table;
/// evaluation uses separable cubic interpolation.
class TabulatedKernel final : public Kernel {
public:
    static TabulatedKernel from_csv(const std::string& path);
    TabulatedKernel(Eigen::VectorXd x_grid, Eigen::VectorXd y_grid, Eigen::MatrixXd values);

    double deriv_x(int i, double x, double y) const override;
    double y_support() const override { return support_; }
    std::string name() const override { return "tabulated"; }

private:
    Eigen::VectorXd xg_, yg_;
    Eigen::MatrixXd tables_[5]; // value and first four x-difference tables
    double support_;
};

std::shared_ptr<const Kernel> make_kernel(const std::string& name,
                                          const std::map<std::string, double>& params,
                                          const std::string& csv_path = {});

} // namespace stefanlab
