#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diland/config.hpp"
#include "diland/metrics.hpp"

namespace diland {

/// ">= 12 significant digits, decimal" formatting used in the CSVs: %.17g
/// with a ".0" appended to integral values so every mse field shows a
/// fraction. Deterministic for a given double.
std::string format_csv_double(double x);

/// Header `t,mse,rebuild_failures`, one row per record, LF line endings.
void emit_trajectory_csv(const Trajectory& traj, const std::string& path);

struct TrialOutcome {
    std::string label;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;       // when not ok
    double final_mse = 0.0;  // when ok
    std::int64_t rebuild_failures = 0;
    std::string csv_path;
};

struct ExperimentResult {
    int exit_code = 0;  // 0 all trials ok, 2 some trials failed
    std::vector<TrialOutcome> trials;
    nlohmann::json summary;
    std::string summary_path;
};

/// Worker pool size: DILAND_SIM_THREADS when set (>= 1), else hardware
/// concurrency, else 1.
int worker_pool_size();

/// Runs every (algorithm, seed) trial, writes one CSV per trial plus
/// summary.json under cfg.output_dir. A failing trial is recorded in the
/// summary and does not abort the others. Output bytes are deterministic for
/// a fixed config (timestamps live only in summary metadata).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace diland
