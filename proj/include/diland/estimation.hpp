#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "diland/errors.hpp"
#include "diland/network.hpp"

namespace diland {

/// d_hat / c_hat. Throws NonpositiveCorrection if c_hat <= 0.
double bias_corrected_sample(double d_hat, double c_hat);

/// Running arithmetic mean of bias-corrected samples per tracked pair.
/// Tracks exactly the pairs given at construction; constant memory in t.
/// Samples must be fed sequentially: iteration t is accepted only when every
/// feed so far covered 0..t-1 for that pair.
class DistanceEstimateState {
public:
    explicit DistanceEstimateState(const std::vector<PairKey>& pairs);

    /// Mean update d_bar <- ((t) d_bar + sample) / (t + 1); first sample (t=0)
    /// initializes the mean. Throws OutOfOrderSample on a nonsequential t,
    /// MissingPair for an untracked pair.
    void update_running_average(const PairKey& pair, double corrected_sample, std::int64_t t);

    /// Latest raw corrected sample for the pair (the current-sample distance
    /// DLRE-style updates consume).
    double latest_sample(const PairKey& pair) const;

    /// Running mean for one pair; throws MissingPair if untracked or empty.
    double current_estimate(const PairKey& pair) const;

    /// Snapshot of all running means, ordered as the constructor's pair list.
    /// Throws MissingPair if any tracked pair has no samples yet.
    Eigen::VectorXd current_estimates() const;

    /// Latest raw samples in the same order; same emptiness rule.
    Eigen::VectorXd latest_samples() const;

    std::int64_t count(const PairKey& pair) const;
    const std::vector<PairKey>& pairs() const { return pairs_; }

private:
    struct Slot {
        std::int64_t count = 0;
        double mean = 0.0;
        double latest = 0.0;
    };
    int slot_index(const PairKey& pair) const;

    std::vector<PairKey> pairs_;
    std::map<PairKey, int> index_;
    std::vector<Slot> slots_;
};

}  // namespace diland
