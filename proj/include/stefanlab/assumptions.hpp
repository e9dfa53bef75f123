#pragma once

#include "stefanlab/coefficients.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace stefanlab {

enum class Verdict { pass, fail, inconclusive };

struct AssumptionCheck {
    std::string name;
    Verdict verdict = Verdict::pass;
    double margin = 0.0;              // worst slack found; negative means violated
    std::optional<std::array<double, 3>> witness; // (x, y, z) of the worst point
    std::string note;
};

/// Lattice audit of the standing assumptions. A fail always carries a
/// witness point; quantified-over-continuum statements are only certified
/// as "no violation found at this resolution".
struct AssumptionReport {
    std::vector<AssumptionCheck> checks;

    bool all_pass() const;
    const AssumptionCheck* find(const std::string& name) const;
};

/// Inward-pointing drift and parallel-to-the-boundary diffusion:
/// mu+(x,0,0) >= 0, mu-(x,0,0) <= 0, sigma+(x,0) = sigma-(x,0) = 0 at every
/// sample, plus sigma(0,0) = 0 under Dirichlet boundary conditions.
AssumptionReport validate_inward_pointing(const CoefficientSet& coeffs,
                                          const std::vector<double>& x_samples);

/// Envelope functions a(x), b(y) or b(y,z) for the growth bounds.
struct EnvelopeSpec {
    enum class AKind { zero, gaussian, exp_decay } a_kind = AKind::gaussian;
    double a_amp = 1.0;
    double a_scale = 1.0;
    double b0 = 1.0;     // b = b0 * (1 + |y| (+ |z|))^b_degree, locally bounded
    int b_degree = 1;

    double a(double x) const;
    double b(double y, double z = 0.0) const;
};

enum class GrowthMode { dirichlet, first_order };

struct SampleBox {
    double x_max = 10.0;
    double yz_max = 3.0;
    int n_x = 33;
    int n_yz = 17;
};

/// Samples |mu| <= b(y,z)(a(x)+|y|+|z|) and the sigma derivative bounds
/// (orders up to 4 for Dirichlet, up to 3 for first-order) over the lattice.
AssumptionReport validate_growth(const CoefficientSet& coeffs, GrowthMode mode,
                                 const SampleBox& box, const EnvelopeSpec& envelope);

} // namespace stefanlab
