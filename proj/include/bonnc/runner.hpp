#pragma once

#include "bonnc/config.hpp"
#include "bonnc/report.hpp"

namespace bonnc {

/// Runs every configured seed through the full pipeline for the configured
/// mode and aggregates the results. A module error aborts that seed only and
/// is recorded in its row.
RunReport run_experiment(const RunConfig& cfg);

/// One run_experiment per grid value with shared seeds.
SweepResult run_sweep(const RunConfig& cfg, const std::string& parameter,
                      const std::vector<double>& grid);

}  // namespace bonnc
