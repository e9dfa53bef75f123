#include "stefanlab/kernel.hpp"

#include "stefanlab/interp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace stefanlab {

double trig_mode(int k, double half_width, double y) {
    const double L = half_width;
    if (std::abs(y) > L) return 0.0;
    if (k == 0) return 1.0 / std::sqrt(2.0 * L);
    const int j = (k + 1) / 2;
    const double arg = j * M_PI * y / L;
    const double scale = 1.0 / std::sqrt(L);
    return (k % 2 == 1) ? scale * std::cos(arg) : scale * std::sin(arg);
}

double Kernel::column_norm_sq(int i, double x) const {
    const double L = y_support();
    return simpson([&](double y) { const double v = deriv_x(i, x, y); return v * v; },
                   -L, L, quadrature_intervals());
}

double Kernel::sup_column_norm(int i, double x_lo, double x_hi, int samples) const {
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double x = x_lo + (x_hi - x_lo) * s / (samples - 1);
        best = std::max(best, std::sqrt(column_norm_sq(i, x)));
    }
    return best;
}

// ---------------------------------------------------------------------------

GaussianConvolutionKernel::GaussianConvolutionKernel(double amplitude, double width,
                                                     double y_support)
    : amp_(amplitude), width_(width), support_(y_support) {
    if (!(width > 0.0) || !(y_support > 0.0))
        throw ConfigError("gaussian_convolution kernel needs positive width and y_support");
}

namespace {
// (d/du)^i exp(-u^2/2) = (-1)^i He_i(u) exp(-u^2/2), probabilists' Hermite.
double hermite_prob(int i, double u) {
    double hm1 = 0.0, h = 1.0;
    for (int k = 0; k < i; ++k) {
        const double next = u * h - k * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}
} // namespace

double GaussianConvolutionKernel::deriv_x(int i, double x, double y) const {
    const double u = (x - y) / width_;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    return amp_ * sign * hermite_prob(i, u) * std::exp(-0.5 * u * u) / std::pow(width_, i);
}

// ---------------------------------------------------------------------------

Rank1Kernel::Rank1Kernel(int mode, double half_width, double amp, double phi_width)
    : mode_(mode), half_width_(half_width), amp_(amp), phi_width_(phi_width) {
    if (mode < 0) throw ConfigError("rank1 kernel: mode index must be nonnegative");
    if (!(half_width > 0.0)) throw ConfigError("rank1 kernel: y_support must be positive");
}

double Rank1Kernel::phi_deriv(int i, double x) const {
    if (phi_width_ <= 0.0) return (i == 0) ? amp_ : 0.0;
    const double u = x / phi_width_;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    return amp_ * sign * hermite_prob(i, u) * std::exp(-0.5 * u * u) / std::pow(phi_width_, i);
}

double Rank1Kernel::deriv_x(int i, double x, double y) const {
    return phi_deriv(i, x) * trig_mode(mode_, half_width_, y);
}

// ---------------------------------------------------------------------------

TabulatedKernel::TabulatedKernel(Eigen::VectorXd x_grid, Eigen::VectorXd y_grid,
                                 Eigen::MatrixXd values)
    : xg_(std::move(x_grid)), yg_(std::move(y_grid)) {
    if (xg_.size() < 8 || yg_.size() < 8)
        throw ConfigError("tabulated kernel: need at least an 8x8 lattice");
    if (values.rows() != xg_.size() || values.cols() != yg_.size())
        throw ConfigError("tabulated kernel: value matrix shape mismatch");
    support_ = std::max(std::abs(yg_[0]), std::abs(yg_[yg_.size() - 1]));
    tables_[0] = std::move(values);
    const double dx = xg_[1] - xg_[0];
    for (int i = 1; i <= 4; ++i) {
        const Eigen::MatrixXd& prev = tables_[i - 1];
        Eigen::MatrixXd d(prev.rows(), prev.cols());
        for (int r = 0; r < prev.rows(); ++r) {
            const int rm = std::max(r - 1, 0), rp = std::min<int>(r + 1, prev.rows() - 1);
            d.row(r) = (prev.row(rp) - prev.row(rm)) / ((rp - rm) * dx);
        }
        tables_[i] = std::move(d);
    }
}

double TabulatedKernel::deriv_x(int i, double x, double y) const {
    if (i < 0 || i > 4) throw std::domain_error("tabulated kernel: derivative order 0..4");
    if (std::abs(y) > support_) return 0.0;
    const Eigen::MatrixXd& tab = tables_[i];
    const double dx = xg_[1] - xg_[0];
    const double dy = yg_[1] - yg_[0];
    // separable cubic: interpolate in y along the four x-rows, then in x
    double s = (x - xg_[0]) / dx;
    int j = static_cast<int>(std::floor(s)) - 1;
    j = std::max(0, std::min<int>(j, tab.rows() - 4));
    Eigen::VectorXd col(4);
    for (int r = 0; r < 4; ++r) {
        Eigen::VectorXd row = tab.row(j + r);
        col[r] = cubic_interp(row, yg_[0], dy, y);
    }
    return cubic_interp(col, xg_[j], dx, x);
}

TabulatedKernel TabulatedKernel::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("tabulated kernel: cannot open " + path);
    std::string line;
    std::vector<double> ys;
    std::vector<double> xs;
    std::vector<std::vector<double>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (header) {
            ys = vals;
            header = false;
        } else {
            xs.push_back(vals[0]);
            rows.emplace_back(vals.begin() + 1, vals.end());
        }
    }
    if (ys.empty() || rows.empty()) throw ConfigError("tabulated kernel: empty CSV " + path);
    Eigen::VectorXd xg = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
    Eigen::VectorXd yg = Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size());
    Eigen::MatrixXd values(xs.size(), ys.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != ys.size())
            throw ConfigError("tabulated kernel: ragged CSV row in " + path);
        values.row(r) = Eigen::Map<Eigen::VectorXd>(rows[r].data(), rows[r].size());
    }
    return TabulatedKernel(std::move(xg), std::move(yg), std::move(values));
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Kernel> make_kernel(const std::string& name,
                                          const std::map<std::string, double>& params,
                                          const std::string& csv_path) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    std::shared_ptr<Kernel> k;
    if (name == "gaussian_convolution") {
        k = std::make_shared<GaussianConvolutionKernel>(get("amplitude", 1.0), get("width", 0.5),
                                                        get("y_support", 8.0));
    } else if (name == "rank1") {
        k = std::make_shared<Rank1Kernel>(static_cast<int>(get("mode", 0)), get("y_support", 8.0),
                                          get("amplitude", 1.0), get("phi_width", -1.0));
    } else if (name == "tabulated") {
        if (csv_path.empty()) throw ConfigError("tabulated kernel requires a csv path");
        k = std::make_shared<TabulatedKernel>(TabulatedKernel::from_csv(csv_path));
    } else {
        throw ConfigError("unknown kernel '" + name +
                          "' (available: gaussian_convolution, rank1, tabulated)");
    }
    const double qp = get("quadrature_intervals", 0.0);
    if (qp > 0) k->set_quadrature_intervals(static_cast<int>(qp));
    return k;
}

} // namespace stefanlab
