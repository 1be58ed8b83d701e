#include "diland/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "diland/algorithms.hpp"
#include "diland/network.hpp"

namespace diland {

std::string format_csv_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
    return s;
}

void emit_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "t,mse,rebuild_failures\n";
    for (const TrajectoryRecord& r : traj.records)
        out << r.t << ',' << format_csv_double(r.mse) << ',' << r.rebuild_failures << '\n';
    if (!out) throw Error("write failed for " + path);
}

int worker_pool_size() {
    if (const char* env = std::getenv("DILAND_SIM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            throw ConfigError({std::string("DILAND_SIM_THREADS must be a positive integer, got '") +
                               env + "'"});
        return static_cast<int>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

using nlohmann::json;

struct TaskResult {
    TrialOutcome outcome;
    Trajectory traj;  // valid when outcome.ok
};

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json label_summary(const ExperimentConfig& cfg, const std::vector<const TaskResult*>& runs) {
    json section;
    std::vector<const TaskResult*> ok;
    json per_trial = json::array();
    std::int64_t failures_total = 0;
    for (const TaskResult* r : runs) {
        json t = {{"seed", r->outcome.seed}, {"status", r->outcome.ok ? "ok" : "failed"}};
        if (r->outcome.ok) {
            t["final_mse"] = r->outcome.final_mse;
            t["rebuild_failures"] = r->outcome.rebuild_failures;
            t["csv"] = r->outcome.csv_path;
            failures_total += r->outcome.rebuild_failures;
            ok.push_back(r);
        } else {
            t["error"] = r->outcome.error;
        }
        per_trial.push_back(std::move(t));
    }
    section["trials_ok"] = ok.size();
    section["trials_failed"] = runs.size() - ok.size();
    section["rebuild_failures_total"] = failures_total;
    section["per_trial"] = std::move(per_trial);
    if (ok.empty()) return section;

    const std::size_t len = ok.front()->traj.records.size();
    std::vector<double> mean(len, 0.0);
    for (const TaskResult* r : ok)
        for (std::size_t i = 0; i < len; ++i) mean[i] += r->traj.records[i].mse;
    for (double& v : mean) v /= static_cast<double>(ok.size());

    json checkpoints = json::array();
    for (const std::int64_t t : {cfg.horizon / 4, cfg.horizon / 2, cfg.horizon}) {
        if (t < 0 || static_cast<std::size_t>(t) >= len) continue;
        checkpoints.push_back({{"t", t}, {"seed_mean_mse", mean[static_cast<std::size_t>(t)]}});
    }
    section["checkpoints"] = std::move(checkpoints);
    section["seed_mean_final_mse"] = mean.back();

    const std::int64_t window =
        std::min<std::int64_t>(kPlateauWindow, static_cast<std::int64_t>(len) / 2);
    if (window >= 1)
        section["plateau"] = to_string(plateau_detector(mean, window));
    return section;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const std::vector<std::uint64_t> seeds = cfg.seeds.resolve();
    const std::uint64_t hash = config_hash(cfg);

    struct Task {
        const AlgorithmSpec* spec;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const AlgorithmSpec& spec : cfg.algorithms)
        for (const std::uint64_t seed : seeds) tasks.push_back({&spec, seed});

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            TaskResult& res = results[i];
            res.outcome.label = task.spec->label;
            res.outcome.seed = task.seed;
            try {
                const Network net = generate_deployment(cfg.dimension, cfg.n_sensors,
                                                        cfg.comm_radius, task.seed);
                res.traj = run_trial(net, cfg.channel, trial_config(cfg, *task.spec), task.seed);
                res.traj.config_hash = hash;
                res.outcome.ok = true;
                res.outcome.final_mse = res.traj.records.back().mse;
                res.outcome.rebuild_failures = res.traj.records.back().rebuild_failures;
            } catch (const std::exception& e) {
                res.outcome.ok = false;
                res.outcome.error = e.what();
            }
        }
    };
    const int pool = std::min<int>(worker_pool_size(), static_cast<int>(tasks.size()));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    // single collector: all files written here, sequentially and in task order
    fs::create_directories(cfg.output_dir);
    ExperimentResult out;
    for (TaskResult& res : results) {
        if (res.outcome.ok) {
            const std::string name =
                res.outcome.label + "_seed" + std::to_string(res.outcome.seed) + ".csv";
            const std::string path = (fs::path(cfg.output_dir) / name).string();
            emit_trajectory_csv(res.traj, path);
            res.outcome.csv_path = name;
        } else {
            out.exit_code = 2;
        }
        out.trials.push_back(res.outcome);
    }

    json summary;
    summary["config"] = config_to_json(cfg);
    summary["config_hash"] = hash_hex(hash);
    summary["metadata"] = {{"timestamp", utc_timestamp()}, {"threads", pool}};
    json algorithms;
    for (const AlgorithmSpec& spec : cfg.algorithms) {
        std::vector<const TaskResult*> runs;
        for (const TaskResult& r : results)
            if (r.outcome.label == spec.label) runs.push_back(&r);
        algorithms[spec.label] = label_summary(cfg, runs);
    }
    summary["algorithms"] = std::move(algorithms);
    summary["exit_code"] = out.exit_code;

    const std::string summary_path = (fs::path(cfg.output_dir) / "summary.json").string();
    {
        std::ofstream f(summary_path, std::ios::binary);
        if (!f) throw Error("cannot open " + summary_path + " for writing");
        f << summary.dump(2) << '\n';
        if (!f) throw Error("write failed for " + summary_path);
    }
    out.summary = std::move(summary);
    out.summary_path = summary_path;
    return out;
}

}  // namespace diland
