// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmcov/coverage.hpp"

namespace mmcov {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

std::string version_string();

/// Shortest round-trip-ish form: 9 significant digits, "-inf"/"inf"/"nan".
std::string format_double(double v);

/// Heatmap table, one row per grid point.
std::string heatmap_csv(const CoverageResult &result, const std::vector<double> &thresholds_db);
/// Sweep table, one row per (value, threshold).
std::string sweep_csv(const SweepResult &result);

nlohmann::json run_metadata(const RunConfig &config);

/// Command-line entry point. Never throws; returns the exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace mmcov
