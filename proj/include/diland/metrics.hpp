#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diland/errors.hpp"

namespace diland {

struct TrajectoryRecord {
    std::int64_t t = 0;
    double mse = 0.0;
    // cumulative count of iterations whose matrix rebuild failed up to t
    std::int64_t rebuild_failures = 0;
};

/// One trial's error curve plus identifying metadata.
struct Trajectory {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<TrajectoryRecord> records;
    // sparse per-sensor squared errors: (t, squared error per sensor)
    std::vector<std::pair<std::int64_t, Eigen::VectorXd>> per_sensor_sq_errors;
};

/// ||X_t - X_star||_F^2 / ||X_0 - X_star||_F^2 (the per-sensor 1/M factor
/// cancels). Throws ZeroInitialError when the denominator is below 1e-30.
double normalized_mse(const Eigen::MatrixXd& X_t, const Eigen::MatrixXd& X_star,
                      const Eigen::MatrixXd& X_0);

/// Partial sum sum_{k=s}^{t-1} [prod_{l=k+1}^{t-1} (1 - r1(l))] r2(k) with
/// r_i(l) = a_i/(l+1)^(delta_i) and r1 clamped to <= 1. Evaluated backwards
/// with a running product, O(t-s).
double weight_sum_diagnostic(double a1, double delta1, double a2, double delta2,
                             std::int64_t s, std::int64_t t);

/// Streaming form of the same sum: S(s, t+1) = (1 - r1(t)) S(s, t) + r2(t),
/// S(s, s) = 0. Lets a sweep over t run in O(1) per step.
class WeightSumRecurrence {
public:
    WeightSumRecurrence(double a1, double delta1, double a2, double delta2, std::int64_t s)
        : a1_(a1), delta1_(delta1), a2_(a2), delta2_(delta2), t_(s) {}

    /// Advance from t to t+1; returns the new S(s, t+1).
    double step();

    double value() const { return value_; }
    std::int64_t t() const { return t_; }

private:
    double a1_, delta1_, a2_, delta2_;
    std::int64_t t_;
    double value_ = 0.0;
};

enum class PlateauVerdict { Converging, Plateaued };

inline constexpr std::int64_t kPlateauWindow = 1000;
inline constexpr double kPlateauThreshold = 0.05;

/// Plateaued iff the mean over the last `window` entries moved by less than
/// kPlateauThreshold (relative) against the mean over the window before it.
/// Requires at least 2*window entries.
PlateauVerdict plateau_detector(const std::vector<double>& mse, std::int64_t window);
PlateauVerdict plateau_detector(const Trajectory& traj, std::int64_t window);

std::string to_string(PlateauVerdict v);

}  // namespace diland
