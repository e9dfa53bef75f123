#pragma once

#include "stefanlab/assumptions.hpp"
#include "stefanlab/solver.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stefanlab {

/// Fully resolved run configuration: every default materialised, every
/// cross-field constraint checked. `echo` lists the canonical section/key
/// /value triples and regenerates a parseable config text.
struct ResolvedConfig {
    // grid
    double grid_length = 16.0;
    int grid_points = 128;

    // operator
    BoundarySpec boundary = robin_boundary(1.0, 1.0);
    double shift = 1.0;

    // coefficients
    std::string mu_plus_name = "zero", mu_minus_name = "zero";
    std::map<std::string, double> mu_plus_params, mu_minus_params;
    std::string sigma_plus_name = "zero", sigma_minus_name = "zero";
    std::map<std::string, double> sigma_plus_params, sigma_minus_params;
    std::string rho_name = "zero";
    std::map<std::string, double> rho_params;
    double eta_plus = 1.0, eta_minus = 1.0;

    // kernel
    std::string kernel_name = "gaussian_convolution";
    std::map<std::string, double> kernel_params;
    std::string kernel_csv;

    // noise
    int modes = 16;
    double eval_lo = -24.0, eval_hi = 24.0, resolution = 0.02;

    // solver
    SolverConfig solver;
    std::uint64_t seed = 42;

    // initial data
    std::string u1_name = "zero", u2_name = "zero";
    std::map<std::string, double> u1_params, u2_params;
    double x_star0 = 0.0;

    // experiment
    std::string experiment = "simulate";
    int samples = 50;
    std::vector<int> m_list{8, 16, 32, 64};
    std::vector<int> n_list{4, 8, 16};
    int p = 1;
    double stop_radius = 50.0, stop_epsilon = 1.0;
    bool allow_violating = false;
    double sigma_const = 0.5;
    GrowthMode growth_mode = GrowthMode::first_order;
    EnvelopeSpec envelope;
    int families = 20;

    std::vector<std::array<std::string, 3>> echo; // (section, key, value)
    std::string canonical_text() const;
};

ResolvedConfig parse_config(const std::string& path);
ResolvedConfig parse_config_text(const std::string& text);

/// Named initial profiles: zero, gaussian_bump(amp, center, width),
/// ramp_exp(amp, offset), sine_decay(amp, freq).
Field make_profile(const std::string& name, const std::map<std::string, double>& params,
                   const HalfLineGrid& grid);

/// The immutable problem objects a run needs, built once from the config.
struct LabContext {
    HalfLineGrid grid;
    CoefficientSet coeffs;
    SpectralOperator op_plus, op_minus;
    std::shared_ptr<const Kernel> kernel;
    NoiseBasis basis;
    SystemState initial;

    SemilinearSystem system() const {
        return SemilinearSystem{grid, coeffs, op_plus, op_minus, basis};
    }
};

LabContext build_context(const ResolvedConfig& cfg);

} // namespace stefanlab
