#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "diland/config.hpp"
#include "diland/experiment.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : s) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-only sensor localization simulator"};
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string algorithms;
    std::uint64_t seed = 0;
    std::int64_t trials = 0;
    std::int64_t iters = 0;
    app.add_option("--config", config_path, "Experiment config file (JSON)");
    app.add_option("--preset", preset, "Built-in experiment: fig1 or fig2")
        ->check(CLI::IsMember({"fig1", "fig2"}));
    app.add_option("--seed", seed, "Override the base seed");
    app.add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Override the output directory");
    app.add_option("--algorithms", algorithms,
                   "Comma-separated algorithm labels to run (subset of the config's list)");
    app.add_option("--iters", iters, "Override the horizon T")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty() == preset.empty()) {
            throw diland::ConfigError({"exactly one of --config or --preset is required"});
        }
        diland::ExperimentConfig cfg =
            config_path.empty()
                ? diland::parse_config_string(diland::preset_config_text(preset))
                : diland::parse_config_file(config_path);

        if (app.count("--seed") > 0) {
            const std::int64_t keep =
                cfg.seeds.is_list ? static_cast<std::int64_t>(cfg.seeds.list.size())
                                  : cfg.seeds.trials;
            cfg.seeds = diland::SeedSpec{};
            cfg.seeds.base = seed;
            cfg.seeds.trials = keep;
        }
        if (app.count("--trials") > 0) {
            if (cfg.seeds.is_list) {
                const std::uint64_t base = cfg.seeds.list.empty() ? 1 : cfg.seeds.list.front();
                cfg.seeds = diland::SeedSpec{};
                cfg.seeds.base = base;
            }
            cfg.seeds.trials = trials;
        }
        if (app.count("--iters") > 0) cfg.horizon = iters;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (app.count("--algorithms") > 0) {
            std::vector<diland::AlgorithmSpec> chosen;
            for (const std::string& label : split_csv(algorithms)) {
                bool found = false;
                for (const diland::AlgorithmSpec& spec : cfg.algorithms)
                    if (spec.label == label) {
                        chosen.push_back(spec);
                        found = true;
                        break;
                    }
                if (!found) {
                    std::string known;
                    for (const diland::AlgorithmSpec& spec : cfg.algorithms)
                        known += (known.empty() ? "" : ", ") + spec.label;
                    throw diland::ConfigError(
                        {"--algorithms: unknown label '" + label + "' (config has: " + known +
                         ")"});
                }
            }
            cfg.algorithms = std::move(chosen);
        }
        // overrides can interact, so re-validate the final assembled config
        cfg = diland::parse_config(diland::config_to_json(cfg));

        const diland::ExperimentResult res = diland::run_experiment(cfg);
        int failed = 0;
        for (const diland::TrialOutcome& t : res.trials)
            if (!t.ok) {
                ++failed;
                std::cerr << "trial failed: " << t.label << " seed " << t.seed << ": " << t.error
                          << "\n";
            }
        std::cout << "wrote " << (res.trials.size() - failed) << " trajectories + summary to "
                  << cfg.output_dir << "\n";
        for (const auto& [label, section] : res.summary.at("algorithms").items()) {
            std::cout << "  " << label;
            if (section.contains("seed_mean_final_mse"))
                std::cout << ": seed-mean final MSE " << section.at("seed_mean_final_mse").get<double>();
            if (section.contains("plateau"))
                std::cout << " (" << section.at("plateau").get<std::string>() << ")";
            std::cout << "\n";
        }
        return res.exit_code;
    } catch (const diland::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
