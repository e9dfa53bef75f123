#include "stefanlab/assumptions.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace stefanlab {

bool AssumptionReport::all_pass() const {
    for (const auto& c : checks)
        if (c.verdict == Verdict::fail) return false;
    return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

AssumptionCheck sign_check(const std::string& name, const std::vector<double>& xs,
                           const std::function<double(double)>& f, bool want_nonneg) {
    AssumptionCheck c;
    c.name = name;
    double worst = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double v = want_nonneg ? f(x) : -f(x);
        if (v < worst) {
            worst = v;
            if (v < 0.0) c.witness = {{x, 0.0, 0.0}};
        }
    }
    c.margin = worst;
    c.verdict = worst >= 0.0 ? Verdict::pass : Verdict::fail;
    return c;
}

AssumptionCheck zero_check(const std::string& name, const std::vector<double>& xs,
                           const std::function<double(double)>& f) {
    AssumptionCheck c;
    c.name = name;
    double worst = 0.0;
    for (double x : xs) {
        const double v = std::abs(f(x));
        if (v > worst) {
            worst = v;
            c.witness = {{x, 0.0, 0.0}};
        }
    }
    c.margin = -worst;
    c.verdict = worst <= 1e-12 ? Verdict::pass : Verdict::fail;
    if (c.verdict == Verdict::pass) c.witness.reset();
    return c;
}

} // namespace

AssumptionReport validate_inward_pointing(const CoefficientSet& coeffs,
                                          const std::vector<double>& x_samples) {
    if (x_samples.empty()) throw ConfigError("validate_inward_pointing: empty sample set");
    AssumptionReport r;
    r.checks.push_back(sign_check(
        "mu_plus(x,0,0) >= 0", x_samples,
        [&](double x) { return coeffs.mu_plus.eval(x, 0.0, 0.0); }, true));
    r.checks.push_back(sign_check(
        "mu_minus(x,0,0) <= 0", x_samples,
        [&](double x) { return coeffs.mu_minus.eval(x, 0.0, 0.0); }, false));
    r.checks.push_back(zero_check("sigma_plus(x,0) = 0", x_samples, [&](double x) {
        return coeffs.sigma_plus.eval(x, 0.0);
    }));
    r.checks.push_back(zero_check("sigma_minus(x,0) = 0", x_samples, [&](double x) {
        return coeffs.sigma_minus.eval(x, 0.0);
    }));
    if (coeffs.boundary.kind == BoundaryKind::dirichlet) {
        std::vector<double> origin{0.0};
        r.checks.push_back(
            zero_check("sigma(0,0) = 0 (Dirichlet)", origin, [&](double x) {
                return std::abs(coeffs.sigma_plus.eval(x, 0.0)) +
                       std::abs(coeffs.sigma_minus.eval(x, 0.0));
            }));
    }
    return r;
}

double EnvelopeSpec::a(double x) const {
    switch (a_kind) {
        case AKind::zero: return 0.0;
        case AKind::gaussian: return a_amp * std::exp(-x * x / (2.0 * a_scale * a_scale));
        case AKind::exp_decay: return a_amp * std::exp(-std::abs(x) / a_scale);
    }
    return 0.0;
}

double EnvelopeSpec::b(double y, double z) const {
    return b0 * std::pow(1.0 + std::abs(y) + std::abs(z), b_degree);
}

namespace {

struct WorstPoint {
    double margin = std::numeric_limits<double>::infinity();
    std::array<double, 3> at{};
};

void scan(WorstPoint& w, double margin, double x, double y, double z) {
    if (margin < w.margin) {
        w.margin = margin;
        w.at = {x, y, z};
    }
}

AssumptionCheck from_worst(const std::string& name, const WorstPoint& w) {
    AssumptionCheck c;
    c.name = name;
    c.margin = w.margin;
    c.verdict = w.margin >= -1e-12 ? Verdict::pass : Verdict::fail;
    if (c.verdict == Verdict::fail) c.witness = w.at;
    return c;
}

} // namespace

AssumptionReport validate_growth(const CoefficientSet& coeffs, GrowthMode mode,
                                 const SampleBox& box, const EnvelopeSpec& env) {
    AssumptionReport r;
    const int max_sigma_order = (mode == GrowthMode::dirichlet) ? 4 : 3;

    auto lattice = [&](auto&& fn) {
        for (int ix = 0; ix < box.n_x; ++ix) {
            const double x = -box.x_max + 2.0 * box.x_max * ix / (box.n_x - 1);
            for (int iy = 0; iy < box.n_yz; ++iy) {
                const double y = -box.yz_max + 2.0 * box.yz_max * iy / (box.n_yz - 1);
                for (int iz = 0; iz < box.n_yz; ++iz) {
                    const double z = -box.yz_max + 2.0 * box.yz_max * iz / (box.n_yz - 1);
                    fn(x, y, z);
                }
            }
        }
    };

    for (const auto* mu : {&coeffs.mu_plus, &coeffs.mu_minus}) {
        const std::string tag = (mu == &coeffs.mu_plus) ? "mu_plus" : "mu_minus";
        WorstPoint wv, wd;
        lattice([&](double x, double y, double z) {
            const double bound = env.b(y, z) * (env.a(x) + std::abs(y) + std::abs(z));
            scan(wv, bound - std::abs(mu->eval(x, y, z)), x, y, z);
            if (mode == GrowthMode::dirichlet)
                scan(wd, bound - std::abs(mu->dx(x, y, z)), x, y, z);
            // first partials in (y,z) against the locally bounded envelope
            scan(wd, env.b(y, z) - std::abs(mu->dy(x, y, z)), x, y, z);
            scan(wd, env.b(y, z) - std::abs(mu->dz(x, y, z)), x, y, z);
        });
        r.checks.push_back(from_worst(tag + " growth", wv));
        r.checks.push_back(from_worst(tag + " derivative growth", wd));
    }

    for (const auto* sg : {&coeffs.sigma_plus, &coeffs.sigma_minus}) {
        const std::string tag = (sg == &coeffs.sigma_plus) ? "sigma_plus" : "sigma_minus";
        WorstPoint w;
        lattice([&](double x, double y, double /*z*/) {
            for (int i = 0; i <= max_sigma_order; ++i)
                for (int j = 0; i + j <= max_sigma_order; ++j) {
                    const double v = std::abs(sg->deriv(i, j, x, y));
                    const double bound =
                        (j == 0) ? env.b(y) * (env.a(x) + std::abs(y)) : env.b(y);
                    scan(w, bound - v, x, y, 0.0);
                }
        });
        r.checks.push_back(from_worst(tag + " derivative growth (orders <= " +
                                          std::to_string(max_sigma_order) + ")",
                                      w));
    }

    AssumptionCheck equi;
    equi.name = "equicontinuity of mixed derivatives";
    equi.verdict = Verdict::inconclusive;
    equi.note = "not mechanically checkable; certified only at the sampled resolution";
    r.checks.push_back(equi);

    AssumptionCheck scope;
    scope.name = "uniformity beyond sample box";
    scope.verdict = Verdict::inconclusive;
    scope.note = "bounds sampled on |x| <= " + std::to_string(box.x_max) +
                 ", |y|,|z| <= " + std::to_string(box.yz_max) + " only";
    r.checks.push_back(scope);
    return r;
}

} // namespace stefanlab
