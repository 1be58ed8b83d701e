#include "diland/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace diland {

std::string ConfigError::join(const std::vector<std::string>& errors) {
    std::ostringstream out;
    out << "invalid configuration (" << errors.size() << " error"
        << (errors.size() == 1 ? "" : "s") << "):";
    for (const std::string& e : errors) out << "\n  - " << e;
    return out.str();
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join(errors)), errors_(std::move(errors)) {}

std::vector<std::uint64_t> SeedSpec::resolve() const {
    if (is_list) return list;
    std::vector<std::uint64_t> v;
    v.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) v.push_back(base + static_cast<std::uint64_t>(i));
    return v;
}

namespace {

using nlohmann::json;

/// Collects validation problems; parsing continues so the final error lists
/// everything wrong at once.
struct ErrorList {
    std::vector<std::string> errors;

    void add(const std::string& msg) { errors.push_back(msg); }

    template <typename F>
    void guard(const std::string& context, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            add(context + ": " + e.what());
        } catch (const json::exception& e) {
            add(context + ": " + e.what());
        }
    }
};

double get_num(const json& j, const char* key, double fallback, ErrorList& errs,
               const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        errs.add(ctx + "." + key + ": expected a number");
        return fallback;
    }
    return j.at(key).get<double>();
}

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback, ErrorList& errs,
                     const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
        errs.add(ctx + "." + key + ": expected an integer");
        return fallback;
    }
    return j.at(key).get<std::int64_t>();
}

DistanceModel distance_model_from_string(const std::string& s) {
    if (s == "exact") return DistanceModel::Exact;
    if (s == "gaussian") return DistanceModel::Gaussian;
    if (s == "rss") return DistanceModel::Rss;
    if (s == "toa") return DistanceModel::Toa;
    throw StructuralError("unknown distance model '" + s +
                          "' (expected exact, gaussian, rss, toa)");
}

std::string distance_model_to_string(DistanceModel m) {
    switch (m) {
        case DistanceModel::Exact: return "exact";
        case DistanceModel::Gaussian: return "gaussian";
        case DistanceModel::Rss: return "rss";
        case DistanceModel::Toa: return "toa";
    }
    throw StructuralError("unknown distance model");
}

void parse_channel(const json& j, ExperimentConfig& cfg, ErrorList& errs) {
    const std::string ctx = "channel";
    if (j.contains("model")) {
        errs.guard(ctx + ".model", [&] {
            cfg.channel.model = distance_model_from_string(j.at("model").get<std::string>());
        });
    }
    if (j.contains("gaussian")) {
        const json& g = j.at("gaussian");
        cfg.channel.gaussian.variance_factor =
            get_num(g, "variance_factor", cfg.channel.gaussian.variance_factor, errs,
                    ctx + ".gaussian");
    }
    if (j.contains("rss")) {
        const json& r = j.at("rss");
        RssParams& p = cfg.channel.rss;
        p.delta0 = get_num(r, "delta0", p.delta0, errs, ctx + ".rss");
        p.pi0 = get_num(r, "pi0", p.pi0, errs, ctx + ".rss");
        p.np = get_num(r, "np", p.np, errs, ctx + ".rss");
        p.shadow_sigma = get_num(r, "shadow_sigma", p.shadow_sigma, errs, ctx + ".rss");
        p.bias_c = get_num(r, "bias_c", p.bias_c, errs, ctx + ".rss");
        p.c_est_sigma = get_num(r, "c_est_sigma", p.c_est_sigma, errs, ctx + ".rss");
    }
    if (j.contains("toa")) {
        const json& t = j.at("toa");
        ToaParams& p = cfg.channel.toa;
        p.nu_p = get_num(t, "nu_p", p.nu_p, errs, ctx + ".toa");
        p.mu_t = get_num(t, "mu_t", p.mu_t, errs, ctx + ".toa");
        p.sigma_t = get_num(t, "sigma_t", p.sigma_t, errs, ctx + ".toa");
        p.mu_est_sigma = get_num(t, "mu_est_sigma", p.mu_est_sigma, errs, ctx + ".toa");
    }
    cfg.links.default_q = get_num(j, "link_default_q", cfg.links.default_q, errs, ctx);
    cfg.comm_noise.sigma_v = get_num(j, "comm_sigma_v", cfg.comm_noise.sigma_v, errs, ctx);
}

void parse_algorithms(const json& doc, ExperimentConfig& cfg, ErrorList& errs) {
    if (!doc.contains("algorithms")) {
        errs.add("algorithms: required field missing");
        return;
    }
    if (!doc.at("algorithms").is_array()) {
        errs.add("algorithms: expected an array");
        return;
    }
    int i = 0;
    for (const json& a : doc.at("algorithms")) {
        const std::string ctx = "algorithms[" + std::to_string(i++) + "]";
        AlgorithmSpec spec;
        errs.guard(ctx + ".kind", [&] {
            spec.kind = algorithm_kind_from_string(a.at("kind").get<std::string>());
        });
        spec.label = a.contains("label") ? a.at("label").get<std::string>()
                                         : to_string(spec.kind);
        spec.w.a = get_num(a, "a", spec.w.a, errs, ctx);
        spec.w.delta = get_num(a, "delta", spec.w.delta, errs, ctx);
        spec.warmup_steps = get_int(a, "warmup_steps", spec.warmup_steps, errs, ctx);
        if (a.contains("allow_non_square_summable"))
            spec.allow_non_square_summable = a.at("allow_non_square_summable").get<bool>();
        cfg.algorithms.push_back(std::move(spec));
    }
}

void parse_seeds(const json& doc, ExperimentConfig& cfg, ErrorList& errs) {
    if (!doc.contains("seeds")) {
        errs.add("seeds: required field missing");
        return;
    }
    const json& s = doc.at("seeds");
    if (s.contains("list")) {
        cfg.seeds.is_list = true;
        errs.guard("seeds.list", [&] {
            cfg.seeds.list = s.at("list").get<std::vector<std::uint64_t>>();
        });
    } else {
        cfg.seeds.is_list = false;
        errs.guard("seeds.base", [&] { cfg.seeds.base = s.at("base").get<std::uint64_t>(); });
        cfg.seeds.trials = get_int(s, "trials", cfg.seeds.trials, errs, "seeds");
    }
}

void validate(const ExperimentConfig& cfg, ErrorList& errs) {
    if (cfg.dimension < 1 || cfg.dimension > 3)
        errs.add("network.dimension: must be 1, 2, or 3");
    if (cfg.n_sensors < 1) errs.add("network.sensors: must be at least 1");
    if (!(cfg.comm_radius > 0.0)) errs.add("network.comm_radius: must be positive");
    errs.guard("channel", [&] { cfg.channel.validate(); });
    errs.guard("channel.link_default_q", [&] { cfg.links.validate(); });
    if (cfg.comm_noise.sigma_v < 0.0) errs.add("channel.comm_sigma_v: must be nonnegative");
    if (cfg.estimator != "running_average")
        errs.add("estimator: unknown estimator '" + cfg.estimator +
                 "' (only running_average is available)");
    if (cfg.algorithms.empty()) errs.add("algorithms: at least one algorithm required");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        const AlgorithmSpec& a = cfg.algorithms[i];
        const std::string ctx = "algorithms[" + std::to_string(i) + "]";
        if (a.label.empty()) errs.add(ctx + ": label must not be empty");
        if (!labels.insert(a.label).second)
            errs.add(ctx + ": duplicate label '" + a.label + "'");
        if (!(a.w.a > 0.0)) errs.add(ctx + ".a: must be positive");
        if (!(a.w.delta > 0.0 && a.w.delta <= 1.0)) errs.add(ctx + ": delta out of (0, 1]");
        if (a.kind == AlgorithmKind::TrainThenFixed && a.warmup_steps < 1)
            errs.add(ctx + ".warmup_steps: must be at least 1");
        const bool randomness = cfg.links.any_failures() || cfg.comm_noise.sigma_v > 0.0;
        if (a.kind == AlgorithmKind::DilandRandom && randomness && !a.w.square_summable() &&
            !a.allow_non_square_summable)
            errs.add(ctx + ": delta <= 0.5 is not square summable; required for " +
                     a.label + " with link failures or communication noise (set "
                     "allow_non_square_summable to override)");
    }
    if (cfg.horizon < 1) errs.add("horizon: must be at least 1");
    if (cfg.seeds.is_list) {
        if (cfg.seeds.list.empty()) errs.add("seeds.list: must not be empty");
    } else if (cfg.seeds.trials < 1) {
        errs.add("seeds.trials: must be at least 1");
    }
    if (cfg.output_dir.empty()) errs.add("output_dir: must not be empty");
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
    ErrorList errs;
    ExperimentConfig cfg;
    if (!doc.is_object()) {
        errs.add("top level: expected an object");
        throw ConfigError(std::move(errs.errors));
    }
    if (doc.contains("network")) {
        const json& n = doc.at("network");
        cfg.dimension = static_cast<int>(get_int(n, "dimension", cfg.dimension, errs, "network"));
        cfg.n_sensors = static_cast<int>(get_int(n, "sensors", cfg.n_sensors, errs, "network"));
        cfg.comm_radius = get_num(n, "comm_radius", cfg.comm_radius, errs, "network");
    } else {
        errs.add("network: required field missing");
    }
    if (doc.contains("channel"))
        parse_channel(doc.at("channel"), cfg, errs);
    else
        errs.add("channel: required field missing");
    if (doc.contains("estimator"))
        errs.guard("estimator", [&] { cfg.estimator = doc.at("estimator").get<std::string>(); });
    parse_algorithms(doc, cfg, errs);
    cfg.horizon = get_int(doc, "horizon", cfg.horizon, errs, "top level");
    parse_seeds(doc, cfg, errs);
    if (doc.contains("output_dir"))
        errs.guard("output_dir",
                   [&] { cfg.output_dir = doc.at("output_dir").get<std::string>(); });
    validate(cfg, errs);
    if (!errs.errors.empty()) throw ConfigError(std::move(errs.errors));
    return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("parse error: ") + e.what()});
    }
    return parse_config(doc);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["network"] = {{"dimension", cfg.dimension},
                      {"sensors", cfg.n_sensors},
                      {"comm_radius", cfg.comm_radius}};
    json channel;
    channel["model"] = distance_model_to_string(cfg.channel.model);
    channel["gaussian"] = {{"variance_factor", cfg.channel.gaussian.variance_factor}};
    channel["rss"] = {{"delta0", cfg.channel.rss.delta0},
                      {"pi0", cfg.channel.rss.pi0},
                      {"np", cfg.channel.rss.np},
                      {"shadow_sigma", cfg.channel.rss.shadow_sigma},
                      {"bias_c", cfg.channel.rss.bias_c},
                      {"c_est_sigma", cfg.channel.rss.c_est_sigma}};
    channel["toa"] = {{"nu_p", cfg.channel.toa.nu_p},
                      {"mu_t", cfg.channel.toa.mu_t},
                      {"sigma_t", cfg.channel.toa.sigma_t},
                      {"mu_est_sigma", cfg.channel.toa.mu_est_sigma}};
    channel["link_default_q"] = cfg.links.default_q;
    channel["comm_sigma_v"] = cfg.comm_noise.sigma_v;
    doc["channel"] = std::move(channel);
    doc["estimator"] = cfg.estimator;
    json algs = json::array();
    for (const AlgorithmSpec& a : cfg.algorithms) {
        json spec = {{"label", a.label},
                     {"kind", to_string(a.kind)},
                     {"a", a.w.a},
                     {"delta", a.w.delta}};
        if (a.kind == AlgorithmKind::TrainThenFixed) spec["warmup_steps"] = a.warmup_steps;
        if (a.allow_non_square_summable) spec["allow_non_square_summable"] = true;
        algs.push_back(std::move(spec));
    }
    doc["algorithms"] = std::move(algs);
    doc["horizon"] = cfg.horizon;
    if (cfg.seeds.is_list)
        doc["seeds"] = {{"list", cfg.seeds.list}};
    else
        doc["seeds"] = {{"base", cfg.seeds.base}, {"trials", cfg.seeds.trials}};
    doc["output_dir"] = cfg.output_dir;
    return doc;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

TrialConfig trial_config(const ExperimentConfig& cfg, const AlgorithmSpec& spec) {
    TrialConfig t;
    t.kind = spec.kind;
    t.label = spec.label;
    t.w = spec.w;
    t.links = cfg.links;
    t.comm_noise = cfg.comm_noise;
    t.horizon = cfg.horizon;
    t.warmup_steps = spec.warmup_steps;
    t.allow_non_square_summable = spec.allow_non_square_summable;
    return t;
}

}  // namespace diland
