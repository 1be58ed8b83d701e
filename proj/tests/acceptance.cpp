// End-to-end acceptance gate. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails. Numeric tolerances are
// pinned here on purpose: changing them is an interface change.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "diland/algorithms.hpp"
#include "diland/channel.hpp"
#include "diland/config.hpp"
#include "diland/estimation.hpp"
#include "diland/experiment.hpp"
#include "diland/geometry.hpp"
#include "diland/metrics.hpp"
#include "diland/network.hpp"
#include "diland/rng.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using diland::AlgorithmKind;
using diland::ChannelConfig;
using diland::DistanceModel;
using diland::Network;
using diland::RngStream;
using diland::Trajectory;
using diland::TrialConfig;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw diland::Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Distance-based barycentric coordinates against the Cartesian oracle.
std::string c1_geometry_oracle() {
    RngStream rng(11001);
    double max_err = 0.0;
    for (int m : {2, 3}) {
        for (int i = 0; i < 100; ++i) {
            const MatrixXd v = oracle::random_simplex(m, rng);
            const VectorXd p = oracle::random_interior_point(v, rng);
            MatrixXd pts(m + 2, m);
            pts.row(0) = p.transpose();
            pts.bottomRows(m + 1) = v;
            const auto dists = diland::SimplexDistances::create(
                m, oracle::pairwise_distances(pts));
            const VectorXd got = diland::barycentric_coordinates(m, dists).coords;
            const VectorXd ref = oracle::cartesian_barycentric(v, p);
            max_err = std::max(max_err, (got - ref).cwiseAbs().maxCoeff());
        }
    }
    if (max_err > 1e-9)
        return "max coordinate error " + fmt(max_err) + " exceeds 1e-9";
    return "";
}

// ---------------------------------------------------------------------------
// 2. Noiseless runs must localize exactly.
std::string c2_noiseless_localization() {
    ChannelConfig exact;
    exact.model = DistanceModel::Exact;
    TrialConfig cfg;
    cfg.kind = AlgorithmKind::Diloc;
    cfg.horizon = 10000;
    cfg.record_per_sensor = false;
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t seed = 3000 + static_cast<std::uint64_t>(i);
        const Network net = diland::generate_deployment(2, 47, 0.6, seed);
        const Trajectory traj = diland::run_trial(net, exact, cfg, seed);
        if (traj.records.back().mse > 1e-10)
            return "seed " + std::to_string(seed) + ": final normalized MSE " +
                   fmt(traj.records.back().mse) + " exceeds 1e-10";
        const auto sys = diland::assemble_system(net, net.exact_distances());
        const MatrixXd x_star = diland::exact_locations(sys, net.anchors);
        const double err = (x_star - net.sensors_truth).cwiseAbs().maxCoeff();
        if (err > 1e-8)
            return "seed " + std::to_string(seed) + ": fixed point is " + fmt(err) +
                   " from the ground truth (tolerance 1e-8)";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Shared harness for criteria 3 and 4.
std::string check_comparison(const diland::ExperimentResult& res, bool bound_diland) {
    for (const auto& t : res.trials)
        if (!t.ok) return t.label + " seed " + std::to_string(t.seed) + " failed: " + t.error;
    const auto& algs = res.summary.at("algorithms");
    const double diland_mse = algs.at("diland").at("seed_mean_final_mse").get<double>();
    const double dlre_mse = algs.at("dlre").at("seed_mean_final_mse").get<double>();
    const std::string diland_verdict = algs.at("diland").at("plateau").get<std::string>();
    const std::string dlre_verdict = algs.at("dlre").at("plateau").get<std::string>();
    if (bound_diland && diland_mse > 1e-2)
        return "diland seed-mean final MSE " + fmt(diland_mse) + " exceeds 1e-2";
    if (!(diland_mse < dlre_mse))
        return "diland (" + fmt(diland_mse) + ") does not beat dlre (" + fmt(dlre_mse) + ")";
    if (diland_verdict != "converging")
        return "diland verdict is '" + diland_verdict + "', expected converging";
    if (dlre_verdict != "plateaued")
        return "dlre verdict is '" + dlre_verdict + "', expected plateaued";
    return "";
}

// 3. Running-average vs current-sample estimates under measurement noise.
std::string c3_fig1_comparison() {
    auto cfg = diland::parse_config_string(diland::preset_config_text("fig1"));
    cfg.output_dir = "acceptance_out/fig1_a";
    fs::remove_all(cfg.output_dir);
    return check_comparison(diland::run_experiment(cfg), true);
}

// 4. The same comparison with link failures and communication noise.
std::string c4_fig2_comparison() {
    auto cfg = diland::parse_config_string(diland::preset_config_text("fig2"));
    cfg.output_dir = "acceptance_out/fig2";
    fs::remove_all(cfg.output_dir);
    return check_comparison(diland::run_experiment(cfg), false);
}

// ---------------------------------------------------------------------------
// 5. The running average must shrink like 1/sqrt(t) for every channel.
std::string c5_estimator_consistency() {
    const std::vector<std::pair<std::string, DistanceModel>> channels = {
        {"gaussian", DistanceModel::Gaussian},
        {"rss", DistanceModel::Rss},
        {"toa", DistanceModel::Toa}};
    const std::vector<double> dists = {0.5, 0.75, 1.0};
    const std::vector<diland::PairKey> pairs = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& [name, model] : channels) {
        ChannelConfig cfg;
        cfg.model = model;
        double sq_early = 0.0, sq_late = 0.0;
        for (int s = 0; s < 50; ++s) {
            RngStream rng(12000 + static_cast<std::uint64_t>(s));
            diland::DistanceEstimateState est(pairs);
            for (std::int64_t t = 0; t < 4000; ++t) {
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    est.update_running_average(
                        pairs[i], diland::draw_corrected_sample(cfg, dists[i], rng), t);
                if (t + 1 == 1000)
                    for (std::size_t i = 0; i < pairs.size(); ++i) {
                        const double e = est.current_estimate(pairs[i]) - dists[i];
                        sq_early += e * e;
                    }
            }
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const double e = est.current_estimate(pairs[i]) - dists[i];
                sq_late += e * e;
            }
        }
        const double ratio = std::sqrt(sq_late) / std::sqrt(sq_early);
        if (ratio < 0.4 || ratio > 0.6)
            return name + ": RMS(t=4000)/RMS(t=1000) = " + fmt(ratio) + " outside [0.4, 0.6]";
    }
    return "";
}

// ---------------------------------------------------------------------------
// 6. Weight-sum diagnostic: bounded for matched rates, decaying when the
//    damping rate is slower than the source rate.
std::string c6_weight_sum() {
    for (std::int64_t s : {0, 10, 100}) {
        diland::WeightSumRecurrence rec(1.0, 0.55, 1.0, 0.55, s);
        double peak = 0.0;
        for (std::int64_t t = s; t < 100000; ++t) peak = std::max(peak, rec.step());
        if (peak > 10.0)
            return "matched rates, s=" + std::to_string(s) + ": peak " + fmt(peak) +
                   " exceeds 10";
    }
    diland::WeightSumRecurrence rec(1.0, 0.25, 1.0, 0.55, 0);
    double at_1e3 = 0.0, at_1e5 = 0.0;
    for (std::int64_t t = 0; t < 100000; ++t) {
        const double v = rec.step();
        if (t + 1 == 1000) at_1e3 = v;
        if (t + 1 == 100000) at_1e5 = v;
    }
    if (!(at_1e5 < at_1e3))
        return "mismatched rates: S(1e5) = " + fmt(at_1e5) + " did not decay below S(1e3) = " +
               fmt(at_1e3);
    return "";
}

// ---------------------------------------------------------------------------
// 7. Reduction lattice: the randomized step without randomness, the weighted
//    step, and the explicit convex combination must agree.
std::string c7_reduction_lattice() {
    RngStream rng(13001);
    const int M = 6;
    const MatrixXd U = diland::reference_simplex(2);
    const auto links = diland::all_links_active(M, 2);
    const auto noise = diland::zero_noise(M, 2);
    const diland::WeightSequence w{1.0, 0.55};
    for (int rep = 0; rep < 1000; ++rep) {
        diland::SystemMatrices sys;
        sys.P = MatrixXd::NullaryExpr(M, M, [&] { return rng.uniform(-1.0, 1.0); });
        sys.B = MatrixXd::NullaryExpr(M, 3, [&] { return rng.uniform(-1.0, 1.0); });
        diland::AlgorithmState s;
        s.U = U;
        s.X = MatrixXd::NullaryExpr(M, 2, [&] { return rng.uniform(-1.0, 1.0); });
        s.t = static_cast<std::int64_t>(rng.uniform(0.0, 200.0));

        diland::AlgorithmState s1 = s, s2 = s;
        const double alpha = w.clamped_weight(s.t);
        const MatrixXd mix = (1.0 - alpha) * s.X + alpha * (sys.P * s.X + sys.B * s.U);
        diland::diland_random_step(s1, w, sys, links, noise);
        diland::diland_step(s2, w, sys);
        const double e12 = (s1.X - s2.X).cwiseAbs().maxCoeff();
        const double e2m = (s2.X - mix).cwiseAbs().maxCoeff();
        if (e12 > 1e-12 || e2m > 1e-12)
            return "rep " + std::to_string(rep) + ": lattice gap " + fmt(std::max(e12, e2m)) +
                   " exceeds 1e-12";
    }
    return "";
}

// ---------------------------------------------------------------------------
// 8. Frozen matrices plateau at a warmup-dependent floor; the adaptive run
//    ends below both floors.
std::string c8_train_then_run() {
    ChannelConfig channel;  // gaussian, variance 0.1 d
    const std::int64_t horizon = 20000;
    const int seeds = 20;

    auto frozen_cfg = [&](std::int64_t warmup) {
        TrialConfig cfg;
        cfg.kind = AlgorithmKind::TrainThenFixed;
        cfg.w = diland::WeightSequence{1.0, 0.25};
        cfg.warmup_steps = warmup;
        cfg.horizon = horizon;
        cfg.record_per_sensor = false;
        return cfg;
    };
    TrialConfig adaptive = frozen_cfg(10);
    adaptive.kind = AlgorithmKind::Diland;

    std::vector<double> mean10(static_cast<std::size_t>(horizon) + 1, 0.0);
    double floor10 = 0.0, floor100 = 0.0, adaptive_final = 0.0;
    for (int i = 0; i < seeds; ++i) {
        const std::uint64_t seed = 14000 + static_cast<std::uint64_t>(i);
        const Network net = diland::generate_deployment(2, 47, 0.6, seed);
        const Trajectory t10 = diland::run_trial(net, channel, frozen_cfg(10), seed);
        const Trajectory t100 = diland::run_trial(net, channel, frozen_cfg(100), seed);
        const Trajectory live = diland::run_trial(net, channel, adaptive, seed);
        for (std::size_t k = 0; k < mean10.size(); ++k) mean10[k] += t10.records[k].mse;
        floor10 += t10.records.back().mse;
        floor100 += t100.records.back().mse;
        adaptive_final += live.records.back().mse;
    }
    for (double& v : mean10) v /= seeds;
    floor10 /= seeds;
    floor100 /= seeds;
    adaptive_final /= seeds;

    if (diland::plateau_detector(mean10, diland::kPlateauWindow) !=
        diland::PlateauVerdict::Plateaued)
        return "warmup=10 seed-mean curve did not plateau";
    if (floor10 <= 1e-10)
        return "warmup=10 floor " + fmt(floor10) + " is suspiciously close to zero";
    if (!(floor100 < floor10))
        return "warmup=100 floor " + fmt(floor100) + " is not below the warmup=10 floor " +
               fmt(floor10);
    if (!(adaptive_final < floor100))
        return "adaptive final " + fmt(adaptive_final) + " is not below the warmup=100 floor " +
               fmt(floor100);
    return "";
}

// ---------------------------------------------------------------------------
// 9. Bitwise reproducibility of a full preset run.
std::string c9_determinism() {
    auto cfg = diland::parse_config_string(diland::preset_config_text("fig1"));
    cfg.output_dir = "acceptance_out/fig1_b";
    fs::remove_all(cfg.output_dir);
    const auto first = diland::run_experiment(cfg);
    cfg.output_dir = "acceptance_out/fig1_c";
    fs::remove_all(cfg.output_dir);
    const auto second = diland::run_experiment(cfg);
    for (const auto& t : first.trials)
        if (!t.ok) return t.label + " seed " + std::to_string(t.seed) + " failed: " + t.error;
    if (first.trials.size() != second.trials.size()) return "trial counts differ between runs";
    for (std::size_t i = 0; i < first.trials.size(); ++i) {
        const std::string& name = first.trials[i].csv_path;
        if (name != second.trials[i].csv_path) return "csv naming differs between runs";
        if (slurp(fs::path("acceptance_out/fig1_b") / name) !=
            slurp(fs::path("acceptance_out/fig1_c") / name))
            return name + " differs between identical runs";
    }
    return "";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string()> run;
        double budget_seconds;  // 0 = no pinned budget
    };
    const std::vector<Criterion> criteria = {
        {"geometry oracle equivalence", c1_geometry_oracle, 1.0},
        {"noiseless localization is exact", c2_noiseless_localization, 30.0},
        {"running averages beat raw samples (fig1)", c3_fig1_comparison, 600.0},
        {"comparison holds under failures and noise (fig2)", c4_fig2_comparison, 900.0},
        {"distance estimates shrink like 1/sqrt(t)", c5_estimator_consistency, 0.0},
        {"weight-sum diagnostic is bounded and decays", c6_weight_sum, 10.0},
        {"randomized/weighted/convex reduction lattice", c7_reduction_lattice, 0.0},
        {"train-then-run floors are ordered", c8_train_then_run, 0.0},
        {"preset reruns are byte-identical", c9_determinism, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string err;
        try {
            err = criteria[i].run();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (err.empty() && criteria[i].budget_seconds > 0.0 &&
            secs > criteria[i].budget_seconds)
            err = "took " + fmt(secs) + " s, budget " + fmt(criteria[i].budget_seconds) + " s";
        if (err.empty()) {
            std::printf("[PASS] %zu. %s (%.1f s)\n", i + 1, criteria[i].name, secs);
        } else {
            std::printf("[FAIL] %zu. %s: %s\n", i + 1, criteria[i].name, err.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
