#include "stefanlab/noise_basis.hpp"

#include "stefanlab/interp.hpp"

#include <cmath>
#include <string>

namespace stefanlab {

namespace {

Eigen::VectorXd simpson_weights(double a, double b, int n_intervals) {
    if (n_intervals % 2 != 0) ++n_intervals;
    const double h = (b - a) / n_intervals;
    Eigen::VectorXd w(n_intervals + 1);
    w[0] = w[n_intervals] = h / 3.0;
    for (int i = 1; i < n_intervals; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    return w;
}

} // namespace

void NoiseBasis::check_range(double x) const {
    if (x < x_lo + resolution || x > x_hi - 2.0 * resolution)
        throw RangeError("noise basis evaluated at x = " + std::to_string(x) +
                         " outside precomputed range [" + std::to_string(x_lo) + ", " +
                         std::to_string(x_hi) + "]; enlarge eval_range");
}

double NoiseBasis::col(int deriv, int k, double x) const {
    check_range(x);
    return cubic_interp(columns[deriv].col(k), x_lo, resolution, x);
}

double NoiseBasis::col_direct(int deriv, int k, double x) const {
    const double L = half_width;
    return simpson([&](double y) { return kernel->deriv_x(deriv, x, y) * mode(k, y); }, -L, L,
                   kernel->quadrature_intervals());
}

double NoiseBasis::column_norm_sq(double x) const {
    check_range(x);
    return cubic_interp(norm_sq, x_lo, resolution, x);
}

namespace {
// Catmull-Rom stencil: weights on the four bracketing grid values.
struct CubicStencil {
    int j;
    double w[4];
};

CubicStencil cubic_stencil(double lo, double step, int n, double x) {
    double s = (x - lo) / step;
    int j = static_cast<int>(std::floor(s)) - 1;
    if (j < 0) j = 0;
    if (j > n - 4) j = n - 4;
    const double t = s - (j + 1);
    CubicStencil st;
    st.j = j;
    st.w[0] = t * (-0.5 + t * (1.0 - 0.5 * t));
    st.w[1] = 1.0 + t * t * (-2.5 + 1.5 * t);
    st.w[2] = t * (0.5 + t * (2.0 - 1.5 * t));
    st.w[3] = t * t * (-0.5 + 0.5 * t);
    return st;
}
} // namespace

Eigen::VectorXd NoiseBasis::cols_at(int deriv, double x) const {
    check_range(x);
    const CubicStencil st = cubic_stencil(x_lo, resolution, n_eval, x);
    const Eigen::MatrixXd& tab = columns[deriv];
    return st.w[0] * tab.row(st.j) + st.w[1] * tab.row(st.j + 1) + st.w[2] * tab.row(st.j + 2) +
           st.w[3] * tab.row(st.j + 3);
}

double NoiseBasis::weighted_cols_at(int deriv, double x, const Eigen::VectorXd& w) const {
    check_range(x);
    const CubicStencil st = cubic_stencil(x_lo, resolution, n_eval, x);
    const Eigen::MatrixXd& tab = columns[deriv];
    const int K = static_cast<int>(w.size());
    const auto block = tab.block(st.j, 0, 4, K);
    double acc = 0.0;
    for (int r = 0; r < 4; ++r) acc += st.w[r] * block.row(r).head(K).dot(w);
    return acc;
}

NoiseBasis build_basis(const std::shared_ptr<const Kernel>& kernel, int n_modes, double x_lo,
                       double x_hi, double resolution) {
    if (n_modes < 1) throw ConfigError("build_basis: need at least one mode");
    if (!(resolution > 0.0)) throw ConfigError("build_basis: resolution must be positive");
    if (x_hi - x_lo < 8.0 * resolution)
        throw ConfigError("build_basis: eval_range too small for the requested resolution");

    NoiseBasis b;
    b.kernel = kernel;
    b.n_modes = n_modes;
    b.half_width = kernel->y_support();
    b.x_lo = x_lo;
    b.x_hi = x_hi;
    b.resolution = resolution;
    b.n_eval = static_cast<int>(std::ceil((x_hi - x_lo) / resolution)) + 1;
    b.x_hi = x_lo + (b.n_eval - 1) * resolution;

    const int nq = kernel->quadrature_intervals();
    const Eigen::VectorXd qw = simpson_weights(-b.half_width, b.half_width, nq);
    const int nq_nodes = static_cast<int>(qw.size());
    Eigen::VectorXd yq(nq_nodes);
    for (int q = 0; q < nq_nodes; ++q)
        yq[q] = -b.half_width + 2.0 * b.half_width * q / (nq_nodes - 1);

    // mode values at quadrature nodes, weighted once
    Eigen::MatrixXd ew(nq_nodes, n_modes);
    for (int k = 0; k < n_modes; ++k)
        for (int q = 0; q < nq_nodes; ++q) ew(q, k) = qw[q] * b.mode(k, yq[q]);

    for (int d = 0; d < 3; ++d) b.columns[d].resize(b.n_eval, n_modes);
    b.norm_sq.resize(b.n_eval);

    Eigen::VectorXd kcol(nq_nodes);
    for (int i = 0; i < b.n_eval; ++i) {
        const double x = x_lo + i * resolution;
        for (int d = 0; d < 3; ++d) {
            for (int q = 0; q < nq_nodes; ++q) kcol[q] = kernel->deriv_x(d, x, yq[q]);
            b.columns[d].row(i) = (ew.transpose() * kcol).transpose();
            if (d == 0) b.norm_sq[i] = qw.dot(kcol.cwiseProduct(kcol));
        }
    }
    return b;
}

Eigen::VectorXd apply_T_zeta(const Kernel& kernel, const std::function<double(double)>& w,
                             const std::vector<double>& x_points) {
    const double L = kernel.y_support();
    Eigen::VectorXd out(x_points.size());
    for (size_t i = 0; i < x_points.size(); ++i) {
        const double x = x_points[i];
        out[i] = simpson([&](double y) { return kernel.eval(x, y) * w(y); }, -L, L,
                         kernel.quadrature_intervals());
    }
    return out;
}

Eigen::VectorXd apply_T_zeta(const NoiseBasis& basis, const Eigen::VectorXd& coeffs,
                             const std::vector<double>& x_points) {
    if (coeffs.size() > basis.n_modes)
        throw ConfigError("apply_T_zeta: more coefficients than basis modes");
    Eigen::VectorXd out(x_points.size());
    for (size_t i = 0; i < x_points.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * basis.col(0, k, x_points[i]);
        out[i] = acc;
    }
    return out;
}

double parseval_defect(const NoiseBasis& basis, double x) {
    double partial = 0.0;
    for (int k = 0; k < basis.n_modes; ++k) {
        const double v = basis.col(0, k, x);
        partial += v * v;
    }
    return basis.column_norm_sq(x) - partial;
}

Eigen::MatrixXd basis_gram(const NoiseBasis& basis) {
    const int K = basis.n_modes;
    const int nq = basis.kernel->quadrature_intervals();
    Eigen::MatrixXd g(K, K);
    for (int a = 0; a < K; ++a)
        for (int c = a; c < K; ++c) {
            const double v = simpson(
                [&](double y) { return basis.mode(a, y) * basis.mode(c, y); }, -basis.half_width,
                basis.half_width, nq);
            g(a, c) = g(c, a) = v;
        }
    return g;
}

} // namespace stefanlab
