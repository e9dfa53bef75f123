#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stefanlab/assumptions.hpp"
#include "stefanlab/coefficients.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

using namespace stefanlab;

namespace {

Field random_field(const HalfLineGrid& grid, unsigned seed, double scale = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    Field f(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) f[i] = g(rng);
    return f;
}

double observed_order(double e1, double e2, double ratio) {
    return std::log(e1 / e2) / std::log(ratio);
}

} // namespace

TEST_CASE("nemytskii evaluation") {
    const HalfLineGrid g = build_grid(6.0, 48);
    const Field u = random_field(g, 1);
    const Field du = random_field(g, 2);

    SUBCASE("identity coefficient returns the field") {
        const MuCoefficient mu = make_mu("affine", {{"cy", 1.0}});
        CHECK((nemytskii_eval(mu, g, u, du) - u).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("pure envelope samples the envelope") {
        const MuCoefficient mu = make_mu("affine", {{"ca", 1.0}, {"wx", 2.0}});
        const Field out = nemytskii_eval(mu, g, u, du);
        for (int i = 0; i < g.n_points; ++i) {
            const double x = g.node(i);
            CHECK(out[i] == doctest::Approx(std::exp(-x * x / 8.0)).epsilon(1e-14));
        }
    }
    SUBCASE("product coefficient is pointwise algebra") {
        const MuCoefficient mu = make_mu("affine", {{"cyz", 1.0}});
        Field su(g.n_points), cu(g.n_points);
        for (int i = 0; i < g.n_points; ++i) {
            su[i] = std::sin(g.node(i));
            cu[i] = std::cos(g.node(i));
        }
        const Field out = nemytskii_eval(mu, g, su, cu);
        for (int i = 0; i < g.n_points; ++i)
            CHECK(out[i] == doctest::Approx(su[i] * cu[i]).epsilon(1e-15));
    }
}

TEST_CASE("nemytskii first derivative") {
    const HalfLineGrid g = build_grid(6.0, 48);
    const Field u = random_field(g, 3);
    const Field v = random_field(g, 4);

    SUBCASE("quadratic coefficient") {
        const SigmaCoefficient sg = make_sigma("quad_y", {{"s", 1.0}});
        const Field dn = nemytskii_derivative(sg, g, u, v);
        for (int i = 0; i < g.n_points; ++i)
            CHECK(dn[i] == doctest::Approx(2.0 * u[i] * v[i]).epsilon(1e-14));
    }
    SUBCASE("sine coefficient at zero is the identity direction") {
        const SigmaCoefficient sg = make_sigma("sin_y", {{"s", 1.0}, {"omega", 1.0}});
        const Field zero = Field::Zero(g.n_points);
        const Field dn = nemytskii_derivative(sg, g, zero, v);
        CHECK((dn - v).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("central finite differences converge at second order") {
        const SigmaCoefficient sg = make_sigma("sin_y", {{"s", 0.8}, {"omega", 2.0}});
        const Field dn = nemytskii_derivative(sg, g, u, v);
        std::vector<double> errs;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const Field plus = nemytskii_eval(sg, g, u + eps * v);
            const Field minus = nemytskii_eval(sg, g, u - eps * v);
            errs.push_back(((plus - minus) / (2.0 * eps) - dn).cwiseAbs().maxCoeff());
        }
        CHECK(observed_order(errs[0], errs[1], 10.0) > 1.9);
        CHECK(observed_order(errs[1], errs[2], 10.0) > 1.9);
    }
}

TEST_CASE("nemytskii second derivative") {
    const HalfLineGrid g = build_grid(6.0, 48);
    const Field u = random_field(g, 5);
    const Field v = random_field(g, 6);
    const Field w = random_field(g, 7);

    SUBCASE("quadratic coefficient") {
        const SigmaCoefficient sg = make_sigma("quad_y", {{"s", 1.0}});
        const Field d2 = nemytskii_second_derivative(sg, g, u, v, w);
        for (int i = 0; i < g.n_points; ++i)
            CHECK(d2[i] == doctest::Approx(2.0 * v[i] * w[i]).epsilon(1e-14));
    }
    SUBCASE("linear coefficient vanishes") {
        const SigmaCoefficient sg = make_sigma("linear_y", {{"s", 2.0}});
        CHECK(nemytskii_second_derivative(sg, g, u, v, w).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("difference of first derivatives converges at second order") {
        const SigmaCoefficient sg = make_sigma("sin_y", {{"s", 0.8}, {"omega", 2.0}});
        const Field d2 = nemytskii_second_derivative(sg, g, u, v, w);
        std::vector<double> errs;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const Field plus = nemytskii_derivative(sg, g, u + eps * w, v);
            const Field minus = nemytskii_derivative(sg, g, u - eps * w, v);
            errs.push_back(((plus - minus) / (2.0 * eps) - d2).cwiseAbs().maxCoeff());
        }
        CHECK(observed_order(errs[0], errs[1], 10.0) > 1.9);
        CHECK(observed_order(errs[1], errs[2], 10.0) > 1.9);
    }
}

TEST_CASE("noise operator psi") {
    const HalfLineGrid g = build_grid(6.0, 32);
    const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0);
    const NoiseBasis basis = build_basis(kernel, 12, -16.0, 16.0, 0.02);
    const Field u = random_field(g, 8);
    const double x_star = 0.4;

    SUBCASE("zero sigma gives zero") {
        const SigmaCoefficient sg = make_sigma("zero", {});
        CHECK(psi_eval(sg, basis, g, u, x_star, 2, Phase::plus).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("unit sigma isolates the kernel column") {
        const SigmaCoefficient sg = make_sigma("constant", {{"s", 1.0}});
        const Field got = psi_eval(sg, basis, g, u, x_star, 3, Phase::plus);
        for (int i = 0; i < g.n_points; ++i)
            CHECK(got[i] == doctest::Approx(basis.col(0, 3, x_star + g.node(i))).epsilon(1e-14));
        const Field gotm = psi_eval(sg, basis, g, u, x_star, 3, Phase::minus);
        for (int i = 0; i < g.n_points; ++i)
            CHECK(gotm[i] == doctest::Approx(basis.col(0, 3, x_star - g.node(i))).epsilon(1e-14));
    }
    SUBCASE("interpolated and direct evaluation agree") {
        const SigmaCoefficient sg = make_sigma("linear_y", {{"s", 1.0}});
        const Field a = psi_eval(sg, basis, g, u, x_star, 1, Phase::plus);
        const Field b = psi_eval_direct(sg, basis, g, u, x_star, 1, Phase::plus);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("derivative in the interface position via the kernel x-derivative") {
        const SigmaCoefficient sg = make_sigma("sin_y", {{"s", 0.7}, {"omega", 1.5}});
        const int k = 4;
        // oracle by direct quadrature on both sides, no interpolation noise
        Field dpsi(g.n_points);
        for (int i = 0; i < g.n_points; ++i)
            dpsi[i] = sg.eval(g.node(i), u[i]) * basis.col_direct(1, k, x_star + g.node(i));
        std::vector<double> errs;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            Field fd(g.n_points);
            for (int i = 0; i < g.n_points; ++i) {
                const double cp = basis.col_direct(0, k, x_star + eps + g.node(i));
                const double cm = basis.col_direct(0, k, x_star - eps + g.node(i));
                fd[i] = sg.eval(g.node(i), u[i]) * (cp - cm) / (2.0 * eps);
            }
            errs.push_back((fd - dpsi).cwiseAbs().maxCoeff());
        }
        CHECK(observed_order(errs[0], errs[1], 10.0) > 1.9);
        CHECK(observed_order(errs[1], errs[2], 10.0) > 1.9);
    }
}

TEST_CASE("psi Hilbert-Schmidt norm") {
    const HalfLineGrid g = build_grid(6.0, 32);
    const Field u = random_field(g, 9);

    SUBCASE("zero sigma") {
        const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0);
        const NoiseBasis basis = build_basis(kernel, 8, -16.0, 16.0, 0.02);
        const SigmaCoefficient sg = make_sigma("zero", {});
        CHECK(psi_hs_norm(sg, basis, g, u, 0.0, 1) == 0.0);
    }
    SUBCASE("rank-1 kernel reduces to a single column norm") {
        const auto kernel = std::make_shared<Rank1Kernel>(0, 8.0, 1.0, 3.0);
        const NoiseBasis basis = build_basis(kernel, 8, -16.0, 16.0, 0.02);
        const SigmaCoefficient sg = make_sigma("linear_y", {{"s", 1.0}});
        const double x_star = 0.3;
        for (int order : {0, 1, 2}) {
            const double hs = psi_hs_norm(sg, basis, g, u, x_star, order);
            const Field single = psi_eval(sg, basis, g, u, x_star, 0, Phase::plus);
            CHECK(hs == doctest::Approx(sobolev_norm(g, single, order)).epsilon(1e-10));
        }
    }
    SUBCASE("monotone and stabilising in the number of modes") {
        const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0);
        const SigmaCoefficient sg = make_sigma("linear_y", {{"s", 1.0}});
        double prev = 0.0, last = 0.0;
        for (int K : {8, 16, 32, 64}) {
            const NoiseBasis basis = build_basis(kernel, K, -16.0, 16.0, 0.02);
            const double hs = psi_hs_norm(sg, basis, g, u, 0.2, 1);
            CHECK(hs >= prev - 1e-10);
            prev = hs;
            last = hs;
        }
        const NoiseBasis b32 = build_basis(kernel, 32, -16.0, 16.0, 0.02);
        CHECK(psi_hs_norm(sg, b32, g, u, 0.2, 1) > 0.98 * last);
    }
    SUBCASE("invariant under orthonormal remixing of the retained modes") {
        const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0);
        const int K = 10;
        const NoiseBasis basis = build_basis(kernel, K, -16.0, 16.0, 0.02);
        const SigmaCoefficient sg = make_sigma("linear_y", {{"s", 1.0}});
        const double x_star = 0.1;

        std::mt19937 rng(33);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd a(K, K);
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) a(i, j) = gauss(rng);
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();

        double direct_sq = 0.0, mixed_sq = 0.0;
        std::vector<Field> cols;
        for (int k = 0; k < K; ++k) {
            const Field col = psi_eval(sg, basis, g, u, x_star, k, Phase::plus);
            cols.push_back(col);
            const double nk = sobolev_norm(g, col, 1);
            direct_sq += nk * nk;
        }
        for (int k = 0; k < K; ++k) {
            Field mix = Field::Zero(g.n_points);
            for (int j = 0; j < K; ++j) mix += q(j, k) * cols[j];
            const double nk = sobolev_norm(g, mix, 1);
            mixed_sq += nk * nk;
        }
        CHECK(std::sqrt(mixed_sq) == doctest::Approx(std::sqrt(direct_sq)).epsilon(1e-8));
    }
    SUBCASE("bounded by the nemytskii factor times the kernel column norms") {
        const auto kernel = std::make_shared<GaussianConvolutionKernel>(1.0, 0.6, 8.0);
        const NoiseBasis basis = build_basis(kernel, 16, -16.0, 16.0, 0.02);
        const SigmaCoefficient sg = make_sigma("sin_y", {{"s", 0.5}, {"omega", 1.0}});
        const int order = 1;
        const double hs = psi_hs_norm(sg, basis, g, u, 0.2, order);
        double colsum = 0.0;
        for (int i = 0; i <= order; ++i) colsum += kernel->sup_column_norm(i, -8.0, 8.0);
        const double nem = sobolev_norm(g, nemytskii_eval(sg, g, u), order);
        CHECK(hs <= 5.0 * nem * colsum);
    }
}

TEST_CASE("reflection conventions of the centred system") {
    const MuCoefficient mu_minus =
        make_mu("affine", {{"c0", -0.3}, {"ca", 0.5}, {"wx", 1.5}, {"cy", 0.7}, {"cz", -0.2},
                           {"cyz", 0.4}, {"cxy", 0.1}});
    // mu(-x, y, -z) expressed again as an affine builtin (gaussian envelope even)
    const MuCoefficient reflected =
        make_mu("affine", {{"c0", -0.3}, {"ca", 0.5}, {"wx", 1.5}, {"cy", 0.7}, {"cz", 0.2},
                           {"cyz", -0.4}, {"cxy", -0.1}});
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const double x = u(rng), y = u(rng), z = u(rng);
        CHECK(mu2_eval(mu_minus, x, y, z) ==
              doctest::Approx(reflected.eval(x, y, z)).epsilon(1e-14));
        CHECK(mu2_dy(mu_minus, x, y, z) ==
              doctest::Approx(reflected.dy(x, y, z)).epsilon(1e-14));
    }

    const SigmaCoefficient sig = make_sigma("gauss_env_y", {{"s", 0.8}, {"w", 1.2}});
    for (int t = 0; t < 20; ++t) {
        const double x = u(rng), y = u(rng);
        CHECK(sigma2_deriv(sig, 0, 0, x, y) == doctest::Approx(sig.eval(-x, y)).epsilon(1e-14));
        CHECK(sigma2_deriv(sig, 1, 0, x, y) ==
              doctest::Approx(-sig.deriv(1, 0, -x, y)).epsilon(1e-14));
    }
}

TEST_CASE("banach algebra and multiplication bounds hold discretely") {
    auto ratio_h1 = [](const HalfLineGrid& g, unsigned seed) {
        const Field u = random_field(g, seed);
        const Field v = random_field(g, seed + 100);
        const Field uv = u.cwiseProduct(v);
        return sobolev_norm(g, uv, 1) / (sobolev_norm(g, u, 1) * sobolev_norm(g, v, 1));
    };
    const HalfLineGrid g1 = build_grid(6.0, 64);
    const HalfLineGrid g2 = build_grid(6.0, 128);
    double c1 = 0.0, c2 = 0.0;
    for (unsigned s = 0; s < 25; ++s) {
        c1 = std::max(c1, ratio_h1(g1, s));
        c2 = std::max(c2, ratio_h1(g2, s));
    }
    CHECK(c1 < 3.0);
    CHECK(c2 < 3.0);
    CHECK(std::abs(c1 - c2) < 0.8 * std::max(c1, c2));

    // |g u|_{Hn} <= c |g|_{Cn} |u|_{Hn} with a smooth bounded multiplier
    const HalfLineGrid g = build_grid(6.0, 96);
    Field smooth(g.n_points);
    for (int i = 0; i < g.n_points; ++i) smooth[i] = std::tanh(g.node(i));
    const double gc1 = 1.0 + 1.0; // sup|tanh| + sup|tanh'|
    for (unsigned s = 0; s < 10; ++s) {
        const Field u = random_field(g, 300 + s);
        CHECK(sobolev_norm(g, smooth.cwiseProduct(u), 1) <=
              2.0 * gc1 * sobolev_norm(g, u, 1));
    }
}

TEST_CASE("inward pointing validator") {
    std::vector<double> xs;
    for (double x = 0.0; x <= 8.0; x += 0.25) xs.push_back(x);

    CoefficientSet good;
    good.mu_plus = make_mu("affine", {{"c0", 1.0}});
    good.mu_minus = make_mu("affine", {{"c0", -1.0}});
    good.sigma_plus = make_sigma("linear_y", {{"s", 1.0}});
    good.sigma_minus = make_sigma("linear_y", {{"s", 1.0}});
    good.boundary = dirichlet_boundary();
    CHECK(validate_inward_pointing(good, xs).all_pass());

    CoefficientSet bad_drift = good;
    bad_drift.mu_plus = make_mu("affine", {{"c0", -1.0}});
    const AssumptionReport r1 = validate_inward_pointing(bad_drift, xs);
    CHECK_FALSE(r1.all_pass());
    const AssumptionCheck* c1 = r1.find("mu_plus(x,0,0) >= 0");
    REQUIRE(c1 != nullptr);
    CHECK(c1->verdict == Verdict::fail);
    CHECK(c1->witness.has_value());

    CoefficientSet bad_noise = good;
    bad_noise.sigma_plus = make_sigma("constant", {{"s", 1.0}});
    const AssumptionReport r2 = validate_inward_pointing(bad_noise, xs);
    CHECK_FALSE(r2.all_pass());
    CHECK(r2.find("sigma_plus(x,0) = 0")->verdict == Verdict::fail);

    CHECK_THROWS_AS(validate_inward_pointing(good, {}), ConfigError);
}

TEST_CASE("growth validator") {
    SampleBox box;
    box.x_max = 12.0;
    box.n_x = 49;

    CoefficientSet set;
    set.sigma_plus = make_sigma("linear_y", {{"s", 1.0}});
    set.sigma_minus = make_sigma("linear_y", {{"s", 1.0}});

    SUBCASE("envelope-plus-identity drift passes with the matching envelope") {
        set.mu_plus = make_mu("affine", {{"ca", 1.0}, {"wx", 2.0}, {"cy", 1.0}});
        set.mu_minus = make_mu("zero", {});
        EnvelopeSpec env;
        env.a_kind = EnvelopeSpec::AKind::gaussian;
        env.a_amp = 1.0;
        env.a_scale = 2.0;
        env.b0 = 1.0;
        env.b_degree = 1;
        const AssumptionReport r = validate_growth(set, GrowthMode::first_order, box, env);
        CHECK(r.all_pass());
        // the continuum-wide clauses stay inconclusive, never silently pass
        CHECK(r.find("uniformity beyond sample box")->verdict == Verdict::inconclusive);
    }
    SUBCASE("x*y drift violates any decaying envelope at large x") {
        set.mu_plus = make_mu("affine", {{"cxy", 1.0}});
        set.mu_minus = make_mu("zero", {});
        EnvelopeSpec env;
        env.a_kind = EnvelopeSpec::AKind::gaussian;
        env.a_amp = 2.0;
        env.a_scale = 2.0;
        env.b0 = 2.0;
        env.b_degree = 1;
        const AssumptionReport r = validate_growth(set, GrowthMode::first_order, box, env);
        const AssumptionCheck* c = r.find("mu_plus growth");
        REQUIRE(c != nullptr);
        CHECK(c->verdict == Verdict::fail);
        REQUIRE(c->witness.has_value());
        CHECK(std::abs((*c->witness)[0]) > 4.0);
    }
    SUBCASE("linear sigma passes all derivative orders") {
        set.mu_plus = make_mu("zero", {});
        set.mu_minus = make_mu("zero", {});
        EnvelopeSpec env;
        env.a_kind = EnvelopeSpec::AKind::gaussian;
        env.b0 = 1.0;
        env.b_degree = 1;
        const AssumptionReport r = validate_growth(set, GrowthMode::dirichlet, box, env);
        CHECK(r.find("sigma_plus derivative growth (orders <= 4)")->verdict == Verdict::pass);
    }
}

TEST_CASE("builtin catalogue rejects unknown names") {
    CHECK_THROWS_AS(make_mu("unknown", {}), ConfigError);
    CHECK_THROWS_AS(make_sigma("unknown", {}), ConfigError);
    CHECK_THROWS_AS(make_rho("unknown", {}), ConfigError);
    CHECK_THROWS_AS(make_sigma("linear_y", {{"s", 1.0}}).deriv(3, 2, 0.0, 0.0),
                    std::domain_error);
}
