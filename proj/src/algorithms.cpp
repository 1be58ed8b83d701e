#include "diland/algorithms.hpp"

#include <algorithm>
#include <cmath>

#include "diland/estimation.hpp"

namespace diland {

double WeightSequence::weight(std::int64_t t) const {
    if (t < 0) throw StructuralError("weight index must be nonnegative");
    return a / std::pow(static_cast<double>(t) + 1.0, delta);
}

double WeightSequence::clamped_weight(std::int64_t t) const {
    return std::min(1.0, weight(t));
}

void WeightSequence::validate() const {
    if (!(a > 0.0)) throw StructuralError("weight scale a must be positive");
    if (!(delta > 0.0 && delta <= 1.0))
        throw StructuralError("delta out of (0, 1]: " + std::to_string(delta));
}

namespace {

void check_step_dims(const AlgorithmState& s, const SystemMatrices& sys) {
    const auto M = s.X.rows();
    const auto m = s.X.cols();
    if (sys.P.rows() != M || sys.P.cols() != M || sys.B.rows() != M ||
        sys.B.cols() != s.U.rows() || s.U.cols() != m)
        throw StructuralError("algorithm step: dimension mismatch");
}

void check_realization_dims(const AlgorithmState& s, const LinkRealization& links,
                            const NoiseRealization& noise) {
    const auto M = s.X.rows();
    const auto A = s.U.rows();
    const auto m = static_cast<std::size_t>(s.X.cols());
    if (links.e_sensors.rows() != M || links.e_sensors.cols() != M ||
        links.e_anchors.rows() != M || links.e_anchors.cols() != A ||
        links.q_sensors.rows() != M || links.q_sensors.cols() != M ||
        links.q_anchors.rows() != M || links.q_anchors.cols() != A)
        throw StructuralError("link realization: dimension mismatch");
    if (noise.v_sensors.size() != m || noise.v_anchors.size() != m)
        throw StructuralError("noise realization: one matrix per state component expected");
    for (std::size_t j = 0; j < m; ++j)
        if (noise.v_sensors[j].rows() != M || noise.v_sensors[j].cols() != M ||
            noise.v_anchors[j].rows() != M || noise.v_anchors[j].cols() != A)
            throw StructuralError("noise realization: dimension mismatch");
    if ((links.q_sensors.array() <= 0.0).any() || (links.q_anchors.array() <= 0.0).any())
        throw StructuralError("link realization: q entries must be positive");
}

/// Shared kernel of dlre_step and diland_random_step: the weighted update
/// with e/q-masked matrices applied to noise-perturbed received values.
void randomized_weighted_step(AlgorithmState& s, const WeightSequence& w,
                              const SystemMatrices& sys, const LinkRealization& links,
                              const NoiseRealization& noise) {
    check_step_dims(s, sys);
    check_realization_dims(s, links, noise);
    const double alpha = w.clamped_weight(s.t);
    const Eigen::MatrixXd WP =
        (links.e_sensors.array() * sys.P.array() / links.q_sensors.array()).matrix();
    const Eigen::MatrixXd WB =
        (links.e_anchors.array() * sys.B.array() / links.q_anchors.array()).matrix();
    const int m = static_cast<int>(s.X.cols());
    Eigen::MatrixXd target(s.X.rows(), m);
    for (int j = 0; j < m; ++j)
        target.col(j) = WP * s.X.col(j) +
                        (WP.array() * noise.v_sensors[j].array()).rowwise().sum().matrix() +
                        WB * s.U.col(j) +
                        (WB.array() * noise.v_anchors[j].array()).rowwise().sum().matrix();
    s.X = (1.0 - alpha) * s.X + alpha * target;
    ++s.t;
}

}  // namespace

void diloc_step(AlgorithmState& state, const SystemMatrices& sys) {
    check_step_dims(state, sys);
    state.X = sys.P * state.X + sys.B * state.U;
    ++state.t;
}

void diland_step(AlgorithmState& state, const WeightSequence& w, const SystemMatrices& sys) {
    check_step_dims(state, sys);
    const double alpha = w.clamped_weight(state.t);
    state.X = (1.0 - alpha) * state.X + alpha * (sys.P * state.X + sys.B * state.U);
    ++state.t;
}

void dlre_step(AlgorithmState& state, const WeightSequence& w, const SystemMatrices& sys,
               const LinkRealization& links, const NoiseRealization& noise) {
    randomized_weighted_step(state, w, sys, links, noise);
}

void diland_random_step(AlgorithmState& state, const WeightSequence& w,
                        const SystemMatrices& sys, const LinkRealization& links,
                        const NoiseRealization& noise, bool allow_non_square_summable) {
    if ((links.failures_possible || noise.noise_enabled) && !w.square_summable() &&
        !allow_non_square_summable)
        throw WeightNotSquareSummable(
            "delta = " + std::to_string(w.delta) +
            " is not square summable; required with link failures or communication noise");
    randomized_weighted_step(state, w, sys, links, noise);
}

std::string to_string(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::Diloc: return "diloc";
        case AlgorithmKind::Dlre: return "dlre";
        case AlgorithmKind::Diland: return "diland";
        case AlgorithmKind::DilandRandom: return "diland_random";
        case AlgorithmKind::TrainThenFixed: return "train_then_fixed";
    }
    throw StructuralError("unknown algorithm kind");
}

AlgorithmKind algorithm_kind_from_string(const std::string& s) {
    if (s == "diloc") return AlgorithmKind::Diloc;
    if (s == "dlre") return AlgorithmKind::Dlre;
    if (s == "diland") return AlgorithmKind::Diland;
    if (s == "diland_random") return AlgorithmKind::DilandRandom;
    if (s == "train_then_fixed") return AlgorithmKind::TrainThenFixed;
    throw StructuralError("unknown algorithm '" + s +
                          "' (expected diloc, dlre, diland, diland_random, train_then_fixed)");
}

namespace {

Eigen::VectorXd per_sensor_sq_error(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_star) {
    return (X - X_star).rowwise().squaredNorm();
}

struct TrialSetup {
    std::vector<PairKey> pairs;
    std::vector<double> d_true;
    AlgorithmState state;
    Eigen::MatrixXd X_0;
};

TrialSetup init_trial(const Network& net, RngStream& init_rng) {
    TrialSetup s;
    s.pairs = net.required_pairs();
    s.d_true.reserve(s.pairs.size());
    for (const PairKey& p : s.pairs) s.d_true.push_back(net.true_distance(p.first, p.second));
    s.state.U = net.anchors;
    s.state.X.resize(net.num_sensors(), net.m);
    for (int i = 0; i < net.num_sensors(); ++i)
        s.state.X.row(i) = sample_point_in_hull(net.anchors, init_rng).transpose();
    s.state.t = 0;
    s.X_0 = s.state.X;
    return s;
}

void validate_trial_inputs(const Network& net, const ChannelConfig& channel,
                           const TrialConfig& cfg) {
    if (net.num_sensors() < 1) throw StructuralError("network has no sensors");
    channel.validate();
    cfg.links.validate();
    cfg.w.validate();
    if (cfg.horizon < 1) throw StructuralError("horizon must be >= 1");
    if (cfg.per_sensor_stride < 1) throw StructuralError("per-sensor stride must be >= 1");
}

void record_step(Trajectory& traj, const TrialConfig& cfg, const AlgorithmState& state,
                 const Eigen::MatrixXd& X_star, const Eigen::MatrixXd& X_0, std::int64_t t,
                 std::int64_t rebuild_failures) {
    if (!state.X.allFinite())
        throw Error("state diverged (non-finite entries) at iteration " + std::to_string(t));
    traj.records.push_back({t, normalized_mse(state.X, X_star, X_0), rebuild_failures});
    if (cfg.record_per_sensor && t % cfg.per_sensor_stride == 0)
        traj.per_sensor_sq_errors.emplace_back(t, per_sensor_sq_error(state.X, X_star));
}

}  // namespace

Trajectory run_trial(const Network& net, const ChannelConfig& channel, const TrialConfig& cfg,
                     std::uint64_t seed) {
    if (cfg.kind == AlgorithmKind::TrainThenFixed)
        return run_trial_train_then_fixed(net, channel, cfg, seed);
    validate_trial_inputs(net, channel, cfg);
    // Enforced before the loop so the rule holds even if early rebuilds fail
    // and no kernel runs; the kernels carry the same guard for direct callers.
    if (cfg.kind == AlgorithmKind::DilandRandom &&
        (cfg.links.any_failures() || cfg.comm_noise.sigma_v > 0.0) &&
        !cfg.w.square_summable() && !cfg.allow_non_square_summable)
        throw WeightNotSquareSummable(
            "weight sequence with delta = " + std::to_string(cfg.w.delta) +
            " is not square summable; required with link failures or communication noise");

    RngStream dist_rng(seed, StreamPurpose::DistanceNoise);
    RngStream link_rng(seed, StreamPurpose::Links);
    RngStream comm_rng(seed, StreamPurpose::CommNoise);
    RngStream init_rng(seed, StreamPurpose::StateInit);

    TrialSetup setup = init_trial(net, init_rng);
    AlgorithmState& state = setup.state;
    const Eigen::MatrixXd X_star = net.sensors_truth;
    SystemAssembler assembler(net, setup.pairs);
    DistanceEstimateState estimator(setup.pairs);

    Trajectory traj;
    traj.algorithm = cfg.label.empty() ? to_string(cfg.kind) : cfg.label;
    traj.seed = seed;
    traj.records.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    record_step(traj, cfg, state, X_star, setup.X_0, 0, 0);

    const bool randomized =
        cfg.kind == AlgorithmKind::Dlre || cfg.kind == AlgorithmKind::DilandRandom;
    const bool links_random = randomized && cfg.links.any_failures();
    const bool noise_random = randomized && cfg.comm_noise.sigma_v > 0.0;
    const LinkRealization links_fixed = all_links_active(net.num_sensors(), net.m);
    const NoiseRealization noise_fixed = zero_noise(net.num_sensors(), net.m);

    // Rows refresh independently: a sensor whose local solve fails keeps its
    // previous row (initially the hold row, which leaves it in place), and
    // every failed row refresh is counted. One bad local estimate must not
    // freeze the whole network.
    SystemMatrices sys = assembler.hold_system();
    std::int64_t rebuild_failures = 0;
    Eigen::VectorXd values;

    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        // DILOC freezes its matrices at t = 0, so later measurements would be
        // dead draws; every other algorithm measures each iteration.
        if (cfg.kind != AlgorithmKind::Diloc || t == 0) {
            for (std::size_t i = 0; i < setup.pairs.size(); ++i)
                estimator.update_running_average(
                    setup.pairs[i], draw_corrected_sample(channel, setup.d_true[i], dist_rng),
                    t);
        }
        const bool rebuild = cfg.kind != AlgorithmKind::Diloc || t == 0;
        if (rebuild) {
            values = (cfg.kind == AlgorithmKind::Diland || cfg.kind == AlgorithmKind::DilandRandom)
                         ? estimator.current_estimates()
                         : estimator.latest_samples();
            rebuild_failures += assembler.refresh_rows(values, sys);
        }
        if (cfg.kind == AlgorithmKind::Diloc) {
            diloc_step(state, sys);
        } else if (cfg.kind == AlgorithmKind::Diland) {
            diland_step(state, cfg.w, sys);
        } else {
            LinkRealization links_drawn;
            NoiseRealization noise_drawn;
            const LinkRealization* links = &links_fixed;
            const NoiseRealization* noise = &noise_fixed;
            if (links_random) {
                links_drawn = sample_link_realization(net, cfg.links, link_rng);
                links = &links_drawn;
            }
            if (noise_random) {
                noise_drawn = sample_noise_realization(net, cfg.comm_noise, comm_rng);
                noise = &noise_drawn;
            }
            if (cfg.kind == AlgorithmKind::Dlre)
                dlre_step(state, cfg.w, sys, *links, *noise);
            else
                diland_random_step(state, cfg.w, sys, *links, *noise,
                                   cfg.allow_non_square_summable);
        }
        record_step(traj, cfg, state, X_star, setup.X_0, t + 1, rebuild_failures);
    }
    return traj;
}

Trajectory run_trial_train_then_fixed(const Network& net, const ChannelConfig& channel,
                                      const TrialConfig& cfg, std::uint64_t seed) {
    validate_trial_inputs(net, channel, cfg);
    if (cfg.warmup_steps < 1) throw StructuralError("warmup_steps must be >= 1");

    RngStream dist_rng(seed, StreamPurpose::DistanceNoise);
    RngStream init_rng(seed, StreamPurpose::StateInit);

    TrialSetup setup = init_trial(net, init_rng);
    AlgorithmState& state = setup.state;
    const Eigen::MatrixXd X_star = net.sensors_truth;
    SystemAssembler assembler(net, setup.pairs);
    DistanceEstimateState estimator(setup.pairs);

    auto warmup_round = [&](std::int64_t round) {
        for (std::size_t i = 0; i < setup.pairs.size(); ++i)
            estimator.update_running_average(
                setup.pairs[i], draw_corrected_sample(channel, setup.d_true[i], dist_rng),
                round);
    };

    for (std::int64_t round = 0; round < cfg.warmup_steps; ++round) warmup_round(round);

    // Freeze whatever the warmup estimates support. Rows that cannot be
    // built yet stay hold rows: those sensors simply never move, and the
    // resulting floor honestly reflects the warmup quality.
    SystemMatrices sys = assembler.hold_system();
    const std::int64_t rebuild_failures =
        assembler.refresh_rows(estimator.current_estimates(), sys);

    Trajectory traj;
    traj.algorithm = cfg.label.empty() ? to_string(AlgorithmKind::TrainThenFixed) : cfg.label;
    traj.seed = seed;
    traj.records.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    record_step(traj, cfg, state, X_star, setup.X_0, 0, rebuild_failures);
    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        diland_step(state, cfg.w, sys);
        record_step(traj, cfg, state, X_star, setup.X_0, t + 1, rebuild_failures);
    }
    return traj;
}

}  // namespace diland
