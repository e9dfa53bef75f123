#include "stefanlab/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stefanlab {

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json to_json(const AssumptionReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json j;
        j["name"] = c.name;
        j["verdict"] = c.verdict == Verdict::pass
                           ? "pass"
                           : (c.verdict == Verdict::fail ? "fail" : "inconclusive");
        j["margin"] = c.margin;
        if (c.witness) j["witness"] = {(*c.witness)[0], (*c.witness)[1], (*c.witness)[2]};
        if (!c.note.empty()) j["note"] = c.note;
        checks.push_back(j);
    }
    Json out;
    out["all_pass"] = r.all_pass();
    out["checks"] = checks;
    return out;
}

Json to_json(const ConvergenceReport& r) {
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json j;
        j["m"] = c.m;
        j["n"] = c.n;
        j["estimate"] = c.stopped_error.mean;
        j["std_error"] = c.stopped_error.std_error;
        j["completed"] = c.stopped_error.samples;
        j["incomplete"] = c.incomplete;
        cells.push_back(j);
    }
    Json out;
    out["m_list"] = r.m_list;
    out["n_list"] = r.n_list;
    out["samples"] = r.samples;
    out["p"] = r.p;
    out["sobolev_order"] = r.sobolev_order;
    out["stop_radius"] = r.stop_radius;
    out["stop_epsilon"] = r.stop_epsilon;
    out["flagged_incomplete"] = r.flagged;
    out["cells"] = cells;
    return out;
}

Json to_json(const PhaseSeparationReport& r) {
    Json margins = Json::array();
    for (const auto& m : r.margins) {
        Json j;
        j["sample"] = m.sample;
        j["ito_margin"] = m.ito_margin;
        j["wz_margin"] = m.wz_margin;
        margins.push_back(j);
    }
    Json out;
    out["pass"] = r.pass;
    out["samples"] = r.samples;
    out["validator_pass"] = r.validator_pass;
    out["tol_sep"] = r.tol_sep;
    out["calibration_c"] = r.calibration_c;
    out["baseline_dip"] = r.baseline_dip;
    out["violating_samples"] = r.violating_samples;
    out["margins"] = margins;
    return out;
}

Json to_json(const ExitConsistencyReport& r) {
    Json fams = Json::array();
    for (const auto& f : r.families) {
        Json j;
        j["name"] = f.name;
        j["one_sided_ok"] = f.one_sided_ok;
        j["sandwich_ok"] = f.sandwich_ok;
        j["limit_ok"] = f.limit_ok;
        j["tau_inf"] = f.t_inf;
        j["sigma_inf"] = f.s_inf;
        fams.push_back(j);
    }
    Json out;
    out["pass"] = r.pass;
    out["families"] = fams;
    return out;
}

Json to_json(const OdeReductionReport& r) {
    Json out;
    out["pass"] = r.pass;
    out["sigma"] = r.sigma;
    out["horizon"] = r.horizon;
    out["dt_levels"] = r.dt_levels;
    out["rms_errors"] = r.rms_errors;
    out["strong_order_slope"] = r.strong_order_slope;
    out["m_list"] = r.m_list;
    out["corrected_gap_mean"] = r.corrected_gap_mean;
    out["fraction_improved"] = r.fraction_improved;
    out["uncorrected_mean_log_gap"] = r.uncorrected_mean_log_gap;
    out["expected_log_gap"] = r.expected_log_gap;
    return out;
}

Json trajectory_summary(const Trajectory& traj, const std::vector<ExitTimeReport>& exits) {
    Json ex = Json::array();
    for (const auto& e : exits) {
        Json j;
        j["radius"] = e.radius;
        j["tau_closed"] = e.tau_closed;
        j["sigma_open"] = e.sigma_open;
        ex.push_back(j);
    }
    Json out;
    out["status"] = traj.status == RunStatus::completed ? "completed" : "exploded";
    out["end_time"] = traj.end_time;
    out["steps"] = traj.norm_path.size() - 1;
    out["final_norm"] = traj.norm_path.back();
    out["exit_times"] = ex;
    return out;
}

std::string convergence_matrix_csv(const ConvergenceReport& r) {
    std::string s = "m";
    for (int n : r.n_list) s += ",n=" + std::to_string(n);
    s += "\n";
    for (int m : r.m_list) {
        s += std::to_string(m);
        for (int n : r.n_list) s += "," + num(r.cell(m, n).stopped_error.mean);
        s += "\n";
    }
    return s;
}

std::string trajectory_csv(const Trajectory& traj, const HalfLineGrid& grid) {
    std::string s = "t,x_star,norm";
    for (int i = 0; i < grid.n_points; ++i) s += ",u1_" + std::to_string(i);
    for (int i = 0; i < grid.n_points; ++i) s += ",u2_" + std::to_string(i);
    s += "\n";
    for (size_t r = 0; r < traj.snapshots.size(); ++r) {
        const int step = traj.snapshot_steps[r];
        const SystemState& st = traj.snapshots[r];
        s += num(traj.time_of(step)) + "," + num(st.x_star) + "," + num(traj.norm_path[step]);
        for (int i = 0; i < st.u1.size(); ++i) s += "," + num(st.u1[i]);
        for (int i = 0; i < st.u2.size(); ++i) s += "," + num(st.u2[i]);
        s += "\n";
    }
    return s;
}

std::string norms_csv(const Trajectory& traj) {
    std::string s = "t,norm\n";
    for (size_t j = 0; j < traj.norm_path.size(); ++j)
        s += num(j * traj.dt) + "," + num(traj.norm_path[j]) + "\n";
    return s;
}

std::string margins_csv(const PhaseSeparationReport& r) {
    std::string s = "sample,ito_margin,wz_margin\n";
    for (const auto& m : r.margins)
        s += std::to_string(m.sample) + "," + num(m.ito_margin) + "," + num(m.wz_margin) + "\n";
    return s;
}

std::string frame_csv(const PhysicalFrame& frame) {
    std::string s = "t";
    for (int j = 0; j < frame.lab_nodes.size(); ++j) s += "," + num(frame.lab_nodes[j]);
    s += "\n";
    for (size_t r = 0; r < frame.times.size(); ++r) {
        s += num(frame.times[r]);
        for (int j = 0; j < frame.values.cols(); ++j) s += "," + num(frame.values(r, j));
        s += "\n";
    }
    return s;
}

} // namespace stefanlab
