#include "diland/estimation.hpp"

#include <string>

namespace diland {

namespace {

std::string pair_name(const PairKey& p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

}  // namespace

double bias_corrected_sample(double d_hat, double c_hat) {
    if (!(c_hat > 0.0))
        throw NonpositiveCorrection("bias-correction factor must be positive, got " +
                                    std::to_string(c_hat));
    return d_hat / c_hat;
}

DistanceEstimateState::DistanceEstimateState(const std::vector<PairKey>& pairs)
    : pairs_(pairs), slots_(pairs.size()) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (pairs_[i].first >= pairs_[i].second)
            throw StructuralError("pair keys must be normalized (first < second)");
        if (!index_.emplace(pairs_[i], static_cast<int>(i)).second)
            throw StructuralError("duplicate pair " + pair_name(pairs_[i]));
    }
}

int DistanceEstimateState::slot_index(const PairKey& pair) const {
    auto it = index_.find(pair);
    if (it == index_.end()) throw MissingPair("pair " + pair_name(pair) + " is not tracked");
    return it->second;
}

void DistanceEstimateState::update_running_average(const PairKey& pair, double corrected_sample,
                                                   std::int64_t t) {
    Slot& s = slots_[slot_index(pair)];
    if (t != s.count)
        throw OutOfOrderSample("pair " + pair_name(pair) + ": expected iteration " +
                               std::to_string(s.count) + ", got " + std::to_string(t));
    s.mean = (static_cast<double>(s.count) * s.mean + corrected_sample) /
             static_cast<double>(s.count + 1);
    s.latest = corrected_sample;
    ++s.count;
}

double DistanceEstimateState::latest_sample(const PairKey& pair) const {
    const Slot& s = slots_[slot_index(pair)];
    if (s.count == 0) throw MissingPair("pair " + pair_name(pair) + " has no samples yet");
    return s.latest;
}

double DistanceEstimateState::current_estimate(const PairKey& pair) const {
    const Slot& s = slots_[slot_index(pair)];
    if (s.count == 0) throw MissingPair("pair " + pair_name(pair) + " has no samples yet");
    return s.mean;
}

Eigen::VectorXd DistanceEstimateState::current_estimates() const {
    Eigen::VectorXd v(static_cast<int>(slots_.size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].count == 0)
            throw MissingPair("pair " + pair_name(pairs_[i]) + " has no samples yet");
        v[static_cast<int>(i)] = slots_[i].mean;
    }
    return v;
}

Eigen::VectorXd DistanceEstimateState::latest_samples() const {
    Eigen::VectorXd v(static_cast<int>(slots_.size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].count == 0)
            throw MissingPair("pair " + pair_name(pairs_[i]) + " has no samples yet");
        v[static_cast<int>(i)] = slots_[i].latest;
    }
    return v;
}

std::int64_t DistanceEstimateState::count(const PairKey& pair) const {
    return slots_[slot_index(pair)].count;
}

}  // namespace diland
