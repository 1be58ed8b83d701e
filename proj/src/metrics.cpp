#include "diland/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace diland {

double normalized_mse(const Eigen::MatrixXd& X_t, const Eigen::MatrixXd& X_star,
                      const Eigen::MatrixXd& X_0) {
    if (X_t.rows() != X_star.rows() || X_t.cols() != X_star.cols() ||
        X_0.rows() != X_star.rows() || X_0.cols() != X_star.cols())
        throw StructuralError("normalized_mse: shape mismatch");
    const double denom = (X_0 - X_star).squaredNorm();
    if (denom < 1e-30)
        throw ZeroInitialError("initial state coincides with the target (denominator " +
                               std::to_string(denom) + ")");
    return (X_t - X_star).squaredNorm() / denom;
}

namespace {

double rate(double a, double delta, std::int64_t l) {
    return a / std::pow(static_cast<double>(l) + 1.0, delta);
}

double rate1_clamped(double a, double delta, std::int64_t l) {
    return std::min(1.0, rate(a, delta, l));
}

void check_weight_sum_args(double a1, double delta1, double a2, double delta2) {
    if (a1 < 0.0 || a2 < 0.0) throw StructuralError("weight sum: scales must be nonnegative");
    if (delta1 < 0.0 || delta1 > 1.0)
        throw StructuralError("weight sum: delta1 must be in [0, 1]");
    if (delta2 < 0.0) throw StructuralError("weight sum: delta2 must be nonnegative");
}

}  // namespace

double weight_sum_diagnostic(double a1, double delta1, double a2, double delta2,
                             std::int64_t s, std::int64_t t) {
    check_weight_sum_args(a1, delta1, a2, delta2);
    if (s < 0 || t < s) throw StructuralError("weight sum: need 0 <= s <= t");
    double sum = 0.0;
    double prod = 1.0;  // prod_{l=k+1}^{t-1} (1 - r1(l)) for the current k
    for (std::int64_t k = t - 1; k >= s; --k) {
        sum += prod * rate(a2, delta2, k);
        prod *= 1.0 - rate1_clamped(a1, delta1, k);
    }
    return sum;
}

double WeightSumRecurrence::step() {
    check_weight_sum_args(a1_, delta1_, a2_, delta2_);
    value_ = (1.0 - rate1_clamped(a1_, delta1_, t_)) * value_ + rate(a2_, delta2_, t_);
    ++t_;
    return value_;
}

namespace {

double window_mean(const std::vector<double>& v, std::size_t begin, std::size_t count) {
    double sum = 0.0;
    for (std::size_t i = begin; i < begin + count; ++i) sum += v[i];
    return sum / static_cast<double>(count);
}

}  // namespace

PlateauVerdict plateau_detector(const std::vector<double>& mse, std::int64_t window) {
    if (window < 1) throw StructuralError("plateau window must be positive");
    const auto w = static_cast<std::size_t>(window);
    if (mse.size() < 2 * w)
        throw StructuralError("plateau detection needs at least 2*window entries, got " +
                              std::to_string(mse.size()));
    const double last = window_mean(mse, mse.size() - w, w);
    const double prev = window_mean(mse, mse.size() - 2 * w, w);
    if (prev == 0.0) return last == 0.0 ? PlateauVerdict::Plateaued : PlateauVerdict::Converging;
    return std::abs(last - prev) / prev < kPlateauThreshold ? PlateauVerdict::Plateaued
                                                            : PlateauVerdict::Converging;
}

PlateauVerdict plateau_detector(const Trajectory& traj, std::int64_t window) {
    std::vector<double> mse;
    mse.reserve(traj.records.size());
    for (const TrajectoryRecord& r : traj.records) mse.push_back(r.mse);
    return plateau_detector(mse, window);
}

std::string to_string(PlateauVerdict v) {
    return v == PlateauVerdict::Converging ? "converging" : "plateaued";
}

}  // namespace diland
