#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "diland/algorithms.hpp"
#include "diland/channel.hpp"
#include "diland/errors.hpp"

namespace diland {

/// Validation failure carrying every problem found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errors);
    std::vector<std::string> errors_;
};

struct AlgorithmSpec {
    std::string label;
    AlgorithmKind kind = AlgorithmKind::Diland;
    WeightSequence w;
    std::int64_t warmup_steps = 10;  // train_then_fixed only
    bool allow_non_square_summable = false;
};

/// Seed list, kept in the form the config used so serialization round-trips.
struct SeedSpec {
    bool is_list = false;
    std::vector<std::uint64_t> list;  // when is_list
    std::uint64_t base = 1;           // otherwise: base, base+1, ..
    std::int64_t trials = 1;

    std::vector<std::uint64_t> resolve() const;
};

struct ExperimentConfig {
    int dimension = 2;
    int n_sensors = 47;
    double comm_radius = 0.6;
    ChannelConfig channel;
    LinkModel links;
    CommNoiseModel comm_noise;
    std::string estimator = "running_average";
    std::vector<AlgorithmSpec> algorithms;
    std::int64_t horizon = 10000;
    SeedSpec seeds;
    std::string output_dir = "out";
};

/// Parse and validate; throws ConfigError listing every violation.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical JSON form; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialization; tags trajectories and summaries.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Per-algorithm trial settings implied by the experiment config.
TrialConfig trial_config(const ExperimentConfig& cfg, const AlgorithmSpec& spec);

/// Built-in configs reproducing the two standard experiments; name is "fig1"
/// or "fig2". Throws ConfigError for unknown names.
const std::string& preset_config_text(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace diland
