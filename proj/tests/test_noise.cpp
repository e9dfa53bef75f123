#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stefanlab/brownian.hpp"
#include "stefanlab/interp.hpp"
#include "stefanlab/noise_basis.hpp"
#include "stefanlab/report_io.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace stefanlab;

TEST_CASE("gaussian convolution against the closed form") {
    const double A = 1.0, w = 0.5, v = 1.0;
    const auto kernel = std::make_shared<GaussianConvolutionKernel>(A, w, 8.0);
    auto bump = [v](double y) { return std::exp(-y * y / (2.0 * v * v)); };

    const std::vector<double> xs{0.0, 0.5, -1.0, 2.0};
    const Eigen::VectorXd got = apply_T_zeta(*kernel, bump, xs);
    const double s2 = w * w + v * v;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double exact = A * std::sqrt(2.0 * M_PI * w * w * v * v / s2) *
                             std::exp(-xs[i] * xs[i] / (2.0 * s2));
        CHECK(std::abs(got[i] - exact) < 1e-8);
    }

    const Eigen::VectorXd zero = apply_T_zeta(*kernel, [](double) { return 0.0; }, xs);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel derivative evaluators are consistent") {
    const GaussianConvolutionKernel kernel(0.7, 0.6, 8.0);
    const double eps = 1e-5;
    for (int i = 0; i < 4; ++i)
        for (double x : {-1.0, 0.3, 2.0})
            for (double y : {-0.5, 1.0}) {
                const double fd =
                    (kernel.deriv_x(i, x + eps, y) - kernel.deriv_x(i, x - eps, y)) / (2 * eps);
                CHECK(fd == doctest::Approx(kernel.deriv_x(i + 1, x, y)).epsilon(1e-5));
            }
}

TEST_CASE("basis construction") {
    const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.5, 8.0);
    const NoiseBasis basis = build_basis(kernel, 16, -12.0, 12.0, 0.02);

    SUBCASE("modes are orthonormal under the quadrature rule") {
        const Eigen::MatrixXd gram = basis_gram(basis);
        CHECK((gram - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("interpolated columns match direct quadrature") {
        for (int k : {0, 3, 11})
            for (double x : {-3.0, 0.1, 4.7}) {
                CHECK(basis.col(0, k, x) ==
                      doctest::Approx(basis.col_direct(0, k, x)).epsilon(1e-8));
            }
    }
    SUBCASE("column derivative tables are consistent") {
        const double r = 0.02;
        for (int k : {1, 5}) {
            const double fd = (basis.col(0, k, 1.0 + r) - basis.col(0, k, 1.0 - r)) / (2 * r);
            CHECK(std::abs(fd - basis.col(1, k, 1.0)) < 5.0 * r * r + 1e-7);
        }
    }
    SUBCASE("evaluation outside the grid raises a range error") {
        CHECK_THROWS_AS(basis.col(0, 0, 12.5), RangeError);
        CHECK_THROWS_AS(basis.col(0, 0, -12.5), RangeError);
    }
    SUBCASE("cols_at agrees with per-mode evaluation") {
        const Eigen::VectorXd all = basis.cols_at(0, 0.77);
        for (int k = 0; k < basis.n_modes; ++k)
            CHECK(all[k] == doctest::Approx(basis.col(0, k, 0.77)).epsilon(1e-12));
        Eigen::VectorXd wts = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
        CHECK(basis.weighted_cols_at(0, 0.77, wts) ==
              doctest::Approx(all.dot(wts)).epsilon(1e-12));
    }
}

TEST_CASE("rank-1 separable kernel isolates one mode") {
    const int mode = 0;
    const auto kernel = std::make_shared<Rank1Kernel>(mode, 8.0, 1.0, -1.0);
    const NoiseBasis basis = build_basis(kernel, 8, -10.0, 10.0, 0.05);
    for (double x : {-2.0, 0.0, 3.0}) {
        CHECK(basis.col(0, mode, x) == doctest::Approx(1.0).epsilon(1e-8));
        for (int k = 1; k < 8; ++k) CHECK(std::abs(basis.col(0, k, x)) < 1e-8);
        CHECK(std::abs(parseval_defect(basis, x)) < 1e-8);
    }
}

TEST_CASE("parseval defect") {
    const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.5, 8.0);
    const NoiseBasis b8 = build_basis(kernel, 8, -10.0, 10.0, 0.05);
    const NoiseBasis b16 = build_basis(kernel, 16, -10.0, 10.0, 0.05);
    const NoiseBasis b32 = build_basis(kernel, 32, -10.0, 10.0, 0.05);
    for (double x : {0.0, 1.3, -2.4}) {
        const double d8 = parseval_defect(b8, x);
        const double d16 = parseval_defect(b16, x);
        const double d32 = parseval_defect(b32, x);
        CHECK(d8 >= -1e-8);
        CHECK(d16 >= -1e-8);
        CHECK(d32 >= -1e-8);
        CHECK(d16 <= d8 + 1e-10);
        CHECK(d32 <= d16 + 1e-10);
    }
}

TEST_CASE("column translation is kernel-Lipschitz") {
    const GaussianConvolutionKernel kernel(1.0, 0.5, 8.0);
    const double sup_d1 = kernel.sup_column_norm(1, -4.0, 4.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double z = u(rng), x = u(rng), xt = u(rng);
        const double diff = simpson(
            [&](double y) {
                const double d = kernel.eval(z - x, y) - kernel.eval(z - xt, y);
                return d * d;
            },
            -8.0, 8.0, 1024);
        CHECK(std::sqrt(diff) <= std::abs(x - xt) * sup_d1 * (1.0 + 1e-6) + 1e-10);
    }
}

TEST_CASE("T_zeta is bounded from L2 into the sup norm") {
    const GaussianConvolutionKernel kernel(1.0, 0.5, 8.0);
    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    // random trig polynomial on the support window
    std::vector<double> coef(9);
    for (auto& c : coef) c = g(rng);
    auto wfun = [&](double y) {
        double acc = 0.0;
        for (int k = 0; k < 9; ++k) acc += coef[k] * trig_mode(k, 8.0, y);
        return acc;
    };
    const double w_norm = std::sqrt(
        simpson([&](double y) { return wfun(y) * wfun(y); }, -8.0, 8.0, 2048));
    const double sup_col = kernel.sup_column_norm(0, -6.0, 6.0);
    std::vector<double> xs;
    for (double x = -6.0; x <= 6.0; x += 0.37) xs.push_back(x);
    const Eigen::VectorXd vals = apply_T_zeta(kernel, wfun, xs);
    CHECK(vals.cwiseAbs().maxCoeff() <= sup_col * w_norm * (1.0 + 1e-6));
}

TEST_CASE("tabulated kernel reproduces its source") {
    const GaussianConvolutionKernel src(1.0, 0.8, 6.0);
    const int nx = 201, ny = 161;
    Eigen::VectorXd xg = Eigen::VectorXd::LinSpaced(nx, -8.0, 8.0);
    Eigen::VectorXd yg = Eigen::VectorXd::LinSpaced(ny, -6.0, 6.0);
    Eigen::MatrixXd vals(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) vals(i, j) = src.eval(xg[i], yg[j]);

    // CSV round trip
    std::string csv;
    char buf[40];
    for (int j = 0; j < ny; ++j) {
        std::snprintf(buf, sizeof(buf), "%s%.17g", j ? "," : "", yg[j]);
        csv += buf;
    }
    csv += "\n";
    for (int i = 0; i < nx; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", xg[i]);
        csv += buf;
        for (int j = 0; j < ny; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", vals(i, j));
            csv += buf;
        }
        csv += "\n";
    }
    const std::string path =
        (std::filesystem::temp_directory_path() / "stefanlab_kernel.csv").string();
    write_text_file(path, csv);
    const TabulatedKernel tab = TabulatedKernel::from_csv(path);

    CHECK(tab.y_support() == doctest::Approx(6.0));
    for (double x : {-1.0, 0.33, 2.4})
        for (double y : {-2.0, 0.7}) {
            CHECK(tab.eval(x, y) == doctest::Approx(src.eval(x, y)).epsilon(1e-5));
            CHECK(tab.deriv_x(1, x, y) == doctest::Approx(src.deriv_x(1, x, y)).epsilon(1e-2));
        }
}

TEST_CASE("brownian paths") {
    SUBCASE("deterministic from the seed") {
        const BrownianDriver a = sample_paths(123, 4, 1.0, 1.0 / 64);
        const BrownianDriver b = sample_paths(123, 4, 1.0, 1.0 / 64);
        CHECK((a.path - b.path).cwiseAbs().maxCoeff() == 0.0);
        const BrownianDriver c = sample_paths(124, 4, 1.0, 1.0 / 64);
        CHECK((a.path - c.path).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("starts at zero") {
        const BrownianDriver d = sample_paths(9, 3, 2.0, 0.25);
        for (int k = 0; k < 3; ++k) CHECK(d.value(k, 0) == 0.0);
    }
    SUBCASE("terminal variance matches the horizon") {
        const double T = 2.0;
        const int n = 10000;
        double sum = 0.0, sumsq = 0.0;
        for (int s = 0; s < n; ++s) {
            const BrownianDriver d = sample_paths(split_seed(777, s), 1, T, 0.5);
            const double bT = d.value(0, d.n_fine);
            sum += bT;
            sumsq += bT * bT;
        }
        const double var = sumsq / n - (sum / n) * (sum / n);
        CHECK(var == doctest::Approx(T).epsilon(0.05));
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(sample_paths(1, 1, 1.0, 0.3), ConfigError); // 0.3 does not divide 1
        CHECK_THROWS_AS(sample_paths(1, 0, 1.0, 0.5), ConfigError);
    }
}

TEST_CASE("piecewise-linear interpolants") {
    const double T = 1.0;
    const BrownianDriver d = sample_paths(42, 3, T, T / 512);

    SUBCASE("node and terminal agreement is exact") {
        for (int m : {4, 8, 64}) {
            const WZInterpolant w = interpolate(d, m);
            for (int k = 0; k < 3; ++k) {
                for (int i = 0; i <= m; ++i) {
                    const double t = i * T / m;
                    const int fine = i * (512 / m);
                    CHECK(w.value(k, t) == doctest::Approx(d.value(k, fine)).epsilon(1e-15));
                }
                CHECK(w.value(k, T) == d.value(k, d.n_fine));
            }
        }
    }
    SUBCASE("slope integrals telescope to the path") {
        const WZInterpolant w = interpolate(d, 16);
        for (int k = 0; k < 3; ++k) {
            double acc = 0.0;
            for (int i = 0; i < 16; ++i) {
                acc += w.slopes(k, i) * w.delta;
                CHECK(acc == doctest::Approx(d.value(k, (i + 1) * 32)).epsilon(1e-12));
            }
        }
    }
    SUBCASE("slopes depend only on the bracketing node values") {
        const WZInterpolant w = interpolate(d, 8);
        for (int i = 0; i < 8; ++i) {
            const double recomputed =
                (d.value(0, (i + 1) * 64) - d.value(0, i * 64)) / w.delta;
            CHECK(w.slopes(0, i) == recomputed);
        }
    }
    SUBCASE("incompatible level rejected") {
        CHECK_THROWS_AS(interpolate(d, 7), ConfigError);
        CHECK_THROWS_AS(interpolate(d, 1024), ConfigError);
    }
}

TEST_CASE("seed splitting decorrelates trajectories") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(99, 7) == split_seed(99, 7));
}
