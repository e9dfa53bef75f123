#include "stefanlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stefanlab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct RawConfig {
    // section -> ordered (key, value); duplicates rejected
    std::map<std::string, std::map<std::string, std::string>> sections;
};

RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!raw.sections[section].emplace(key, value).second)
            throw ConfigError("config: duplicate key '" + section + "." + key + "'");
    }
    return raw;
}

class SectionReader {
public:
    SectionReader(const RawConfig& raw, const std::string& name) : name_(name) {
        auto it = raw.sections.find(name);
        if (it != raw.sections.end()) entries_ = it->second;
    }

    std::string take(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::string v = it->second;
        entries_.erase(it);
        return v;
    }

    void finish() const {
        if (!entries_.empty())
            throw ConfigError("config: unknown key '" + name_ + "." + entries_.begin()->first +
                              "'");
    }

private:
    std::string name_;
    std::map<std::string, std::string> entries_;
};

double to_double(const std::string& section_key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: " + section_key + " = '" + v + "' is not a number");
    }
}

int to_int(const std::string& section_key, const std::string& v) {
    const double d = to_double(section_key, v);
    const int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 1e-12)
        throw ConfigError("config: " + section_key + " = '" + v + "' is not an integer");
    return i;
}

bool to_bool(const std::string& section_key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + section_key + " = '" + v + "' is not a boolean");
}

// "name k=v k=v" -> (name, params)
std::pair<std::string, std::map<std::string, double>> to_spec(const std::string& section_key,
                                                              const std::string& v) {
    std::istringstream in(v);
    std::string name;
    in >> name;
    if (name.empty()) throw ConfigError("config: " + section_key + " is empty");
    std::map<std::string, double> params;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + section_key + ": expected param=value, got '" + tok +
                              "'");
        params[tok.substr(0, eq)] = to_double(section_key + "." + tok.substr(0, eq),
                                              tok.substr(eq + 1));
    }
    return {name, params};
}

std::vector<int> to_int_list(const std::string& section_key, const std::string& v) {
    std::istringstream in(v);
    std::vector<int> out;
    std::string tok;
    while (in >> tok) out.push_back(to_int(section_key, tok));
    if (out.empty()) throw ConfigError("config: " + section_key + " is an empty list");
    return out;
}

std::vector<double> to_double_list(const std::string& section_key, const std::string& v) {
    std::istringstream in(v);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(section_key, tok));
    return out;
}

std::string spec_to_string(const std::string& name, const std::map<std::string, double>& params) {
    std::string s = name;
    for (const auto& [k, v] : params) s += " " + k + "=" + fmt_double(v);
    return s;
}

template <typename T>
std::string list_to_string(const std::vector<T>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += " ";
        if constexpr (std::is_same_v<T, double>)
            s += fmt_double(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

} // namespace

std::string ResolvedConfig::canonical_text() const {
    std::string out;
    std::string current;
    for (const auto& e : echo) {
        if (e[0] != current) {
            if (!out.empty()) out += "\n";
            out += "[" + e[0] + "]\n";
            current = e[0];
        }
        out += e[1] + " = " + e[2] + "\n";
    }
    return out;
}

ResolvedConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ResolvedConfig parse_config_text(const std::string& text) {
    const RawConfig raw = parse_raw(text);
    for (const auto& [name, entries] : raw.sections) {
        static const char* known[] = {"grid",   "operator", "coefficients", "kernel",
                                      "noise",  "solver",   "initial",      "experiment"};
        if (std::find(std::begin(known), std::end(known), name) == std::end(known))
            throw ConfigError("config: unknown section '[" + name + "]'");
    }

    ResolvedConfig c;

    {
        SectionReader grid(raw, "grid");
        c.grid_length = to_double("grid.length", grid.take("length", "16.0"));
        c.grid_points = to_int("grid.points", grid.take("points", "128"));
        grid.finish();
    }
    {
        SectionReader op(raw, "operator");
        const std::string kind = op.take("boundary", "robin");
        const double kp = to_double("operator.kappa_plus", op.take("kappa_plus", "1.0"));
        const double km = to_double("operator.kappa_minus", op.take("kappa_minus", "1.0"));
        if (kind == "dirichlet")
            c.boundary = dirichlet_boundary();
        else if (kind == "robin")
            c.boundary = robin_boundary(kp, km);
        else
            throw ConfigError("config: operator.boundary must be dirichlet or robin, got '" +
                              kind + "'");
        c.shift = to_double("operator.shift", op.take("shift", "1.0"));
        if (!(c.shift > 0.0)) throw ConfigError("config: operator.shift must be positive");
        op.finish();
    }
    {
        SectionReader co(raw, "coefficients");
        std::tie(c.mu_plus_name, c.mu_plus_params) =
            to_spec("coefficients.mu_plus", co.take("mu_plus", "zero"));
        std::tie(c.mu_minus_name, c.mu_minus_params) =
            to_spec("coefficients.mu_minus", co.take("mu_minus", "zero"));
        std::tie(c.sigma_plus_name, c.sigma_plus_params) =
            to_spec("coefficients.sigma_plus", co.take("sigma_plus", "zero"));
        std::tie(c.sigma_minus_name, c.sigma_minus_params) =
            to_spec("coefficients.sigma_minus", co.take("sigma_minus", "zero"));
        std::tie(c.rho_name, c.rho_params) = to_spec("coefficients.rho", co.take("rho", "zero"));
        c.eta_plus = to_double("coefficients.eta_plus", co.take("eta_plus", "1.0"));
        c.eta_minus = to_double("coefficients.eta_minus", co.take("eta_minus", "1.0"));
        if (!(c.eta_plus > 0.0) || !(c.eta_minus > 0.0))
            throw ConfigError("config: eta_plus and eta_minus must be positive");
        co.finish();
        // reject unknown coefficient names early, with the builtin list
        make_mu(c.mu_plus_name, c.mu_plus_params);
        make_mu(c.mu_minus_name, c.mu_minus_params);
        make_sigma(c.sigma_plus_name, c.sigma_plus_params);
        make_sigma(c.sigma_minus_name, c.sigma_minus_params);
        make_rho(c.rho_name, c.rho_params);
    }
    {
        SectionReader ke(raw, "kernel");
        std::tie(c.kernel_name, c.kernel_params) =
            to_spec("kernel.type", ke.take("type", "gaussian_convolution width=0.5 y_support=8"));
        c.kernel_csv = ke.take("csv", "");
        ke.finish();
        if (c.kernel_name != "tabulated") make_kernel(c.kernel_name, c.kernel_params);
    }
    {
        SectionReader no(raw, "noise");
        c.modes = to_int("noise.modes", no.take("modes", "16"));
        c.eval_lo = to_double("noise.eval_lo", no.take("eval_lo", "-24.0"));
        c.eval_hi = to_double("noise.eval_hi", no.take("eval_hi", "24.0"));
        c.resolution = to_double("noise.resolution", no.take("resolution", "0.02"));
        if (c.modes < 1) throw ConfigError("config: noise.modes must be at least 1");
        if (!(c.eval_hi > c.eval_lo) || !(c.resolution > 0.0))
            throw ConfigError("config: noise eval range or resolution invalid");
        no.finish();
    }
    {
        SectionReader so(raw, "solver");
        c.solver.horizon = to_double("solver.horizon", so.take("horizon", "0.5"));
        c.solver.dt = to_double("solver.dt", so.take("dt", "0.001"));
        const std::string mode = so.take("mode", "ito");
        if (mode == "ito")
            c.solver.mode = SolverMode::ito;
        else if (mode == "wong_zakai")
            c.solver.mode = SolverMode::wong_zakai;
        else
            throw ConfigError("config: solver.mode must be ito or wong_zakai, got '" + mode + "'");
        c.solver.n_modes = to_int("solver.n_modes", so.take("n_modes", std::to_string(c.modes)));
        c.solver.interp_m = to_int("solver.interp_m", so.take("interp_m", "16"));
        const std::string trunc = so.take("truncation_radius", "none");
        if (trunc != "none")
            c.solver.truncation_radius = to_double("solver.truncation_radius", trunc);
        c.solver.alpha = to_double("solver.alpha", so.take("alpha", "0.5"));
        c.solver.sobolev_order = to_int("solver.sobolev_order",
                                        so.take("sobolev_order",
                                                c.boundary.kind == BoundaryKind::dirichlet
                                                    ? "2"
                                                    : "1"));
        c.solver.exit_radii = to_double_list("solver.exit_radii", so.take("exit_radii", ""));
        c.solver.snapshot_stride =
            to_int("solver.snapshot_stride", so.take("snapshot_stride", "1"));
        c.seed = static_cast<std::uint64_t>(
            to_double("solver.seed", so.take("seed", "42")));
        so.finish();
    }
    {
        SectionReader init(raw, "initial");
        std::tie(c.u1_name, c.u1_params) = to_spec("initial.u1", init.take("u1", "zero"));
        std::tie(c.u2_name, c.u2_params) = to_spec("initial.u2", init.take("u2", "zero"));
        c.x_star0 = to_double("initial.x_star", init.take("x_star", "0.0"));
        init.finish();
    }
    {
        SectionReader ex(raw, "experiment");
        c.experiment = ex.take("kind", "simulate");
        static const char* kinds[] = {"simulate",       "wz_convergence",
                                      "phase_separation", "ode_reduction",
                                      "validate_assumptions", "exit_time_consistency"};
        if (std::find(std::begin(kinds), std::end(kinds), c.experiment) == std::end(kinds))
            throw ConfigError("config: unknown experiment kind '" + c.experiment +
                              "' (available: simulate, wz_convergence, phase_separation, "
                              "ode_reduction, validate_assumptions, exit_time_consistency)");
        c.samples = to_int("experiment.samples", ex.take("samples", "50"));
        c.m_list = to_int_list("experiment.m_list", ex.take("m_list", "8 16 32 64"));
        c.n_list = to_int_list("experiment.n_list", ex.take("n_list", "4 8 16"));
        c.p = to_int("experiment.p", ex.take("p", "1"));
        c.stop_radius = to_double("experiment.stop_radius", ex.take("stop_radius", "50.0"));
        c.stop_epsilon = to_double("experiment.stop_epsilon", ex.take("stop_epsilon", "1.0"));
        c.allow_violating =
            to_bool("experiment.allow_violating", ex.take("allow_violating", "false"));
        c.sigma_const = to_double("experiment.sigma_const", ex.take("sigma_const", "0.5"));
        const std::string gm = ex.take("growth_mode", "first_order");
        if (gm == "dirichlet")
            c.growth_mode = GrowthMode::dirichlet;
        else if (gm == "first_order")
            c.growth_mode = GrowthMode::first_order;
        else
            throw ConfigError("config: experiment.growth_mode must be dirichlet or first_order");
        auto [aname, aparams] =
            to_spec("experiment.envelope_a", ex.take("envelope_a", "gaussian amp=2 scale=2"));
        if (aname == "zero")
            c.envelope.a_kind = EnvelopeSpec::AKind::zero;
        else if (aname == "gaussian")
            c.envelope.a_kind = EnvelopeSpec::AKind::gaussian;
        else if (aname == "exp_decay")
            c.envelope.a_kind = EnvelopeSpec::AKind::exp_decay;
        else
            throw ConfigError("config: envelope_a must be zero, gaussian or exp_decay");
        c.envelope.a_amp = aparams.count("amp") ? aparams["amp"] : 1.0;
        c.envelope.a_scale = aparams.count("scale") ? aparams["scale"] : 1.0;
        auto [bname, bparams] =
            to_spec("experiment.envelope_b", ex.take("envelope_b", "poly b0=2 degree=1"));
        if (bname != "poly") throw ConfigError("config: envelope_b must be 'poly b0=.. degree=..'");
        c.envelope.b0 = bparams.count("b0") ? bparams["b0"] : 1.0;
        c.envelope.b_degree = bparams.count("degree") ? static_cast<int>(bparams["degree"]) : 1;
        c.families = to_int("experiment.families", ex.take("families", "20"));
        ex.finish();
    }

    // cross-field constraints
    const double T = c.solver.horizon;
    if (!(T > 0.0) || !(c.solver.dt > 0.0))
        throw ConfigError("config: horizon and dt must be positive");
    {
        const long n = std::llround(T / c.solver.dt);
        if (n < 1 || std::abs(n * c.solver.dt - T) > 1e-9 * T)
            throw ConfigError("config: dt = " + fmt_double(c.solver.dt) +
                              " does not divide horizon = " + fmt_double(T));
    }
    if (c.solver.mode == SolverMode::wong_zakai) {
        if (c.solver.interp_m < 1) throw ConfigError("config: interp_m must be positive");
        const double delta_m = T / c.solver.interp_m;
        const long k = std::llround(delta_m / c.solver.dt);
        if (k < 1 || std::abs(k * c.solver.dt - delta_m) > 1e-9 * delta_m)
            throw ConfigError("config: dt = " + fmt_double(c.solver.dt) +
                              " does not divide the interpolation interval T/m = " +
                              fmt_double(delta_m));
    }
    if (c.solver.alpha < 0.0 || c.solver.alpha >= 1.0)
        throw ConfigError("config: solver.alpha must lie in [0, 1)");
    if (c.solver.sobolev_order < 1 || c.solver.sobolev_order > 2)
        throw ConfigError("config: solver.sobolev_order must be 1 or 2");
    for (double r : c.solver.exit_radii)
        if (!(r > 0.0)) throw ConfigError("config: exit radii must be positive");
    if (c.solver.n_modes < 0 || c.solver.n_modes > c.modes)
        throw ConfigError("config: solver.n_modes must lie in [0, noise.modes]");
    if (c.solver.truncation_radius && !(*c.solver.truncation_radius > 0.0))
        throw ConfigError("config: truncation_radius must be positive");
    if (c.solver.snapshot_stride < 1)
        throw ConfigError("config: snapshot_stride must be at least 1");
    for (size_t i = 1; i < c.m_list.size(); ++i)
        if (c.m_list[i] <= c.m_list[i - 1])
            throw ConfigError("config: m_list must be strictly increasing");
    for (size_t i = 1; i < c.n_list.size(); ++i)
        if (c.n_list[i] <= c.n_list[i - 1])
            throw ConfigError("config: n_list must be strictly increasing");
    if (!c.n_list.empty() && c.n_list.back() > c.modes)
        throw ConfigError("config: n_list exceeds noise.modes");
    if (c.experiment != "ode_reduction") {
        const double need_lo = c.x_star0 - c.grid_length - 1.0;
        const double need_hi = c.x_star0 + c.grid_length + 1.0;
        if (c.eval_lo > need_lo || c.eval_hi < need_hi)
            throw ConfigError("config: noise eval range [" + fmt_double(c.eval_lo) + ", " +
                              fmt_double(c.eval_hi) + "] does not cover x_star0 +- (grid length " +
                              "+ 1); enlarge it");
    }

    // canonical echo with every default materialised
    auto push = [&](const char* s, const char* k, const std::string& v) {
        c.echo.push_back({s, k, v});
    };
    push("grid", "length", fmt_double(c.grid_length));
    push("grid", "points", std::to_string(c.grid_points));
    push("operator", "boundary",
         c.boundary.kind == BoundaryKind::dirichlet ? "dirichlet" : "robin");
    push("operator", "kappa_plus", fmt_double(c.boundary.kappa_plus));
    push("operator", "kappa_minus", fmt_double(c.boundary.kappa_minus));
    push("operator", "shift", fmt_double(c.shift));
    push("coefficients", "mu_plus", spec_to_string(c.mu_plus_name, c.mu_plus_params));
    push("coefficients", "mu_minus", spec_to_string(c.mu_minus_name, c.mu_minus_params));
    push("coefficients", "sigma_plus", spec_to_string(c.sigma_plus_name, c.sigma_plus_params));
    push("coefficients", "sigma_minus", spec_to_string(c.sigma_minus_name, c.sigma_minus_params));
    push("coefficients", "rho", spec_to_string(c.rho_name, c.rho_params));
    push("coefficients", "eta_plus", fmt_double(c.eta_plus));
    push("coefficients", "eta_minus", fmt_double(c.eta_minus));
    push("kernel", "type", spec_to_string(c.kernel_name, c.kernel_params));
    if (!c.kernel_csv.empty()) push("kernel", "csv", c.kernel_csv);
    push("noise", "modes", std::to_string(c.modes));
    push("noise", "eval_lo", fmt_double(c.eval_lo));
    push("noise", "eval_hi", fmt_double(c.eval_hi));
    push("noise", "resolution", fmt_double(c.resolution));
    push("solver", "horizon", fmt_double(c.solver.horizon));
    push("solver", "dt", fmt_double(c.solver.dt));
    push("solver", "mode", c.solver.mode == SolverMode::ito ? "ito" : "wong_zakai");
    push("solver", "n_modes", std::to_string(c.solver.n_modes));
    push("solver", "interp_m", std::to_string(c.solver.interp_m));
    push("solver", "truncation_radius",
         c.solver.truncation_radius ? fmt_double(*c.solver.truncation_radius) : "none");
    push("solver", "alpha", fmt_double(c.solver.alpha));
    push("solver", "sobolev_order", std::to_string(c.solver.sobolev_order));
    push("solver", "exit_radii", list_to_string(c.solver.exit_radii));
    push("solver", "snapshot_stride", std::to_string(c.solver.snapshot_stride));
    push("solver", "seed", std::to_string(c.seed));
    push("initial", "u1", spec_to_string(c.u1_name, c.u1_params));
    push("initial", "u2", spec_to_string(c.u2_name, c.u2_params));
    push("initial", "x_star", fmt_double(c.x_star0));
    push("experiment", "kind", c.experiment);
    push("experiment", "samples", std::to_string(c.samples));
    push("experiment", "m_list", list_to_string(c.m_list));
    push("experiment", "n_list", list_to_string(c.n_list));
    push("experiment", "p", std::to_string(c.p));
    push("experiment", "stop_radius", fmt_double(c.stop_radius));
    push("experiment", "stop_epsilon", fmt_double(c.stop_epsilon));
    push("experiment", "allow_violating", c.allow_violating ? "true" : "false");
    push("experiment", "sigma_const", fmt_double(c.sigma_const));
    push("experiment", "growth_mode",
         c.growth_mode == GrowthMode::dirichlet ? "dirichlet" : "first_order");
    {
        std::map<std::string, double> ap{{"amp", c.envelope.a_amp}, {"scale", c.envelope.a_scale}};
        const char* an = c.envelope.a_kind == EnvelopeSpec::AKind::zero
                             ? "zero"
                             : (c.envelope.a_kind == EnvelopeSpec::AKind::gaussian ? "gaussian"
                                                                                   : "exp_decay");
        push("experiment", "envelope_a", spec_to_string(an, ap));
        std::map<std::string, double> bp{{"b0", c.envelope.b0},
                                         {"degree", double(c.envelope.b_degree)}};
        push("experiment", "envelope_b", spec_to_string("poly", bp));
    }
    push("experiment", "families", std::to_string(c.families));
    return c;
}

Field make_profile(const std::string& name, const std::map<std::string, double>& params,
                   const HalfLineGrid& grid) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    Field f = Field::Zero(grid.n_points);
    if (name == "zero") return f;
    if (name == "gaussian_bump") {
        const double amp = get("amp", 1.0), center = get("center", 2.0), w = get("width", 1.0);
        if (!(w > 0.0)) throw ConfigError("gaussian_bump: width must be positive");
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.node(i);
            f[i] = amp * std::exp(-(x - center) * (x - center) / (2.0 * w * w));
        }
        return f;
    }
    if (name == "ramp_exp") {
        const double amp = get("amp", 1.0), offset = get("offset", 1.0);
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.node(i);
            f[i] = amp * std::max(x - offset, 0.0) * std::exp(-x);
        }
        return f;
    }
    if (name == "sine_decay") {
        const double amp = get("amp", 1.0), freq = get("freq", 1.0);
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.node(i);
            f[i] = amp * std::sin(freq * x) * std::exp(-x);
        }
        return f;
    }
    throw ConfigError("unknown initial profile '" + name +
                      "' (available: zero, gaussian_bump, ramp_exp, sine_decay)");
}

LabContext build_context(const ResolvedConfig& cfg) {
    LabContext ctx;
    ctx.grid = build_grid(cfg.grid_length, cfg.grid_points);
    ctx.coeffs.mu_plus = make_mu(cfg.mu_plus_name, cfg.mu_plus_params);
    ctx.coeffs.mu_minus = make_mu(cfg.mu_minus_name, cfg.mu_minus_params);
    ctx.coeffs.sigma_plus = make_sigma(cfg.sigma_plus_name, cfg.sigma_plus_params);
    ctx.coeffs.sigma_minus = make_sigma(cfg.sigma_minus_name, cfg.sigma_minus_params);
    ctx.coeffs.rho = make_rho(cfg.rho_name, cfg.rho_params);
    ctx.coeffs.eta_plus = cfg.eta_plus;
    ctx.coeffs.eta_minus = cfg.eta_minus;
    ctx.coeffs.boundary = cfg.boundary;
    ctx.op_plus = assemble_operator(ctx.grid, cfg.boundary, cfg.eta_plus, cfg.shift, Phase::plus);
    ctx.op_minus =
        assemble_operator(ctx.grid, cfg.boundary, cfg.eta_minus, cfg.shift, Phase::minus);
    ctx.kernel = make_kernel(cfg.kernel_name, cfg.kernel_params, cfg.kernel_csv);
    ctx.basis = build_basis(ctx.kernel, cfg.modes, cfg.eval_lo, cfg.eval_hi, cfg.resolution);
    ctx.initial.u1 = make_profile(cfg.u1_name, cfg.u1_params, ctx.grid);
    ctx.initial.u2 = make_profile(cfg.u2_name, cfg.u2_params, ctx.grid);
    ctx.initial.x_star = cfg.x_star0;
    return ctx;
}

} // namespace stefanlab
