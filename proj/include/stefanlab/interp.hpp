#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>

namespace stefanlab {

/// 4-point Lagrange cubic on a uniform grid {lo + i*step}. Clamps the stencil
/// at the edges, so callers should keep one cell of margin for full accuracy.
inline double cubic_interp(const Eigen::VectorXd& values, double lo, double step, double x) {
    const int n = static_cast<int>(values.size());
    double s = (x - lo) / step;
    int j = static_cast<int>(std::floor(s)) - 1;
    if (j < 0) j = 0;
    if (j > n - 4) j = n - 4;
    const double t = s - (j + 1);
    const double ym1 = values[j], y0 = values[j + 1], y1 = values[j + 2], y2 = values[j + 3];
    const double c0 = y0;
    const double c1 = 0.5 * (y1 - ym1);
    const double c2 = ym1 - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    const double c3 = 0.5 * (y2 - ym1) + 1.5 * (y0 - y1);
    return c0 + t * (c1 + t * (c2 + t * c3));
}

/// Composite Simpson over [a, b] with n_intervals subintervals (made even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n_intervals) {
    if (n_intervals < 2) n_intervals = 2;
    if (n_intervals % 2 != 0) ++n_intervals;
    const double h = (b - a) / n_intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < n_intervals; ++i)
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace stefanlab
