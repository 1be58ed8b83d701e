#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "diland/channel.hpp"
#include "diland/errors.hpp"
#include "diland/metrics.hpp"
#include "diland/network.hpp"

namespace diland {

/// Decaying step size alpha(t) = a / (t+1)^delta. delta in (0.5, 1] makes the
/// sequence square summable, which the randomized updates require.
struct WeightSequence {
    double a = 1.0;
    double delta = 0.55;

    bool square_summable() const { return delta > 0.5; }

    /// a / (t+1)^delta, unclamped.
    double weight(std::int64_t t) const;

    /// min(1, weight(t)): early weights above 1 are clamped so every update
    /// stays a convex combination.
    double clamped_weight(std::int64_t t) const;

    /// a > 0 and delta in (0, 1] (the sum of weights must diverge).
    void validate() const;
};

struct AlgorithmState {
    Eigen::MatrixXd X;  // M x m sensor state
    Eigen::MatrixXd U;  // (m+1) x m anchor positions; never mutated
    std::int64_t t = 0;
};

/// X <- P X + B U.
void diloc_step(AlgorithmState& state, const SystemMatrices& sys);

/// X <- (1 - alpha(t)) X + alpha(t) (P X + B U) with the state's t.
void diland_step(AlgorithmState& state, const WeightSequence& w, const SystemMatrices& sys);

/// Randomized weighted update: neighbor and anchor contributions are masked
/// by link activations e/q (unbiased compensation) and perturbed by the
/// received-value noise v. With all links active, q = 1 and v = 0 this is
/// exactly diland_step on the same matrices.
void dlre_step(AlgorithmState& state, const WeightSequence& w, const SystemMatrices& sys,
               const LinkRealization& links, const NoiseRealization& noise);

/// Same update as dlre_step (the difference is the caller's matrices: running
/// averages here, raw current samples there), but guarded: with link failures
/// or communication noise in play the weights must be square summable, else
/// WeightNotSquareSummable (override for experiments only).
void diland_random_step(AlgorithmState& state, const WeightSequence& w,
                        const SystemMatrices& sys, const LinkRealization& links,
                        const NoiseRealization& noise,
                        bool allow_non_square_summable = false);

enum class AlgorithmKind { Diloc, Dlre, Diland, DilandRandom, TrainThenFixed };

std::string to_string(AlgorithmKind k);
AlgorithmKind algorithm_kind_from_string(const std::string& s);

struct TrialConfig {
    AlgorithmKind kind = AlgorithmKind::Diland;
    std::string label;  // trajectory tag; defaults to the kind name
    WeightSequence w;
    LinkModel links;
    CommNoiseModel comm_noise;
    std::int64_t horizon = 10000;
    std::int64_t warmup_steps = 10;  // TrainThenFixed only
    bool allow_non_square_summable = false;
    int per_sensor_stride = 10;
    bool record_per_sensor = true;
};

/// One full simulated run: per iteration, measure every required pair through
/// the channel, update the running averages, rebuild P/B from the algorithm's
/// distance view (averages for DILAND variants, the current samples for DLRE,
/// the first samples once for DILOC), step, and record the normalized MSE
/// against the true positions. A rebuild that fails the feasibility checks is
/// counted and the previous matrices are reused (state coasts unchanged until
/// the first successful rebuild). Deterministic per (net, config, seed).
Trajectory run_trial(const Network& net, const ChannelConfig& channel, const TrialConfig& cfg,
                     std::uint64_t seed);

/// Training-phase baseline: average cfg.warmup_steps measurements per pair,
/// freeze P/B from those means, then run the weighted iteration on the frozen
/// matrices. If the frozen assembly is infeasible, additional warmup rounds
/// are drawn (and counted as rebuild failures) until it succeeds.
Trajectory run_trial_train_then_fixed(const Network& net, const ChannelConfig& channel,
                                      const TrialConfig& cfg, std::uint64_t seed);

}  // namespace diland
