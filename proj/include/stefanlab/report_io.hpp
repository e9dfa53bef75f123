#pragma once

#include "stefanlab/config.hpp"
#include "stefanlab/experiments.hpp"

#include <json.hpp>

#include <string>

namespace stefanlab {

using Json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& bytes);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

Json to_json(const AssumptionReport& r);
Json to_json(const ConvergenceReport& r);
Json to_json(const PhaseSeparationReport& r);
Json to_json(const ExitConsistencyReport& r);
Json to_json(const OdeReductionReport& r);
Json trajectory_summary(const Trajectory& traj, const std::vector<ExitTimeReport>& exits);

std::string convergence_matrix_csv(const ConvergenceReport& r);
std::string trajectory_csv(const Trajectory& traj, const HalfLineGrid& grid);
std::string norms_csv(const Trajectory& traj);
std::string margins_csv(const PhaseSeparationReport& r);
std::string frame_csv(const PhysicalFrame& frame);

} // namespace stefanlab
