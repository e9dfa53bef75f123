#pragma once

#include "stefanlab/config.hpp"

#include <string>

namespace stefanlab {

inline constexpr const char* kVersion = "stefanlab 0.1.0";

/// Runs the experiment named in the config, writing manifest.json, report.json
/// and the experiment's CSV artifacts under out_dir. Returns 0 when the
/// experiment's verdict passes, 1 otherwise. Configuration errors throw
/// ConfigError (the CLI maps them to exit status 2). With dry_run only the
/// manifest is written.
int dispatch(const ResolvedConfig& cfg, const std::string& out_dir, int threads, bool dry_run);

} // namespace stefanlab
