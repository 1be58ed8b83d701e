#include "diland/channel.hpp"

#include <algorithm>
#include <cmath>

#include "diland/estimation.hpp"

namespace diland {

void RssParams::validate() const {
    if (delta0 <= 0.0) throw StructuralError("rss: delta0 must be positive");
    if (np <= 0.0) throw StructuralError("rss: path-loss exponent must be positive");
    if (bias_c <= 0.0) throw StructuralError("rss: bias C must be positive");
    if (shadow_sigma < 0.0 || c_est_sigma < 0.0)
        throw StructuralError("rss: sigmas must be nonnegative");
}

void ToaParams::validate() const {
    if (nu_p <= 0.0) throw StructuralError("toa: propagation velocity must be positive");
    if (sigma_t < 0.0 || mu_est_sigma < 0.0)
        throw StructuralError("toa: sigmas must be nonnegative");
}

double LinkModel::q_for(int a, int b) const {
    auto it = q.find(make_pair_key(a, b));
    return it == q.end() ? default_q : it->second;
}

bool LinkModel::any_failures() const {
    if (default_q < 1.0) return true;
    return std::any_of(q.begin(), q.end(), [](const auto& kv) { return kv.second < 1.0; });
}

void LinkModel::validate() const {
    auto bad = [](double p) { return !(p > 0.0 && p <= 1.0); };
    if (bad(default_q)) throw StructuralError("link q must be in (0, 1]");
    for (const auto& kv : q)
        if (bad(kv.second)) throw StructuralError("link q must be in (0, 1]");
}

void ChannelConfig::validate() const {
    if (model == DistanceModel::Gaussian && gaussian.variance_factor < 0.0)
        throw StructuralError("gaussian: variance factor must be nonnegative");
    if (model == DistanceModel::Rss) rss.validate();
    if (model == DistanceModel::Toa) toa.validate();
}

namespace {

double clamp_floor(double sample, double d_true) {
    return std::max(sample, kDistanceFloorFactor * d_true);
}

/// exp(sigma * Z - sigma^2 / 2): lognormal with mean exactly 1.
double mean_one_lognormal(double sigma, RngStream& rng) {
    if (sigma == 0.0) return 1.0;
    return std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
}

}  // namespace

double measure_distance_gaussian(double d_true, const GaussianParams& p, RngStream& rng) {
    if (d_true <= 0.0) throw StructuralError("distance must be positive");
    const double stddev = std::sqrt(p.variance_factor * d_true);
    return clamp_floor(d_true + rng.normal(0.0, stddev), d_true);
}

RssSample measure_distance_rss(double d_true, const RssParams& p, RngStream& rng) {
    if (d_true <= 0.0) throw StructuralError("distance must be positive");
    // A dB offset s multiplies the inverted range by 10^(s / (10 np)); the
    // shadowing factor is built mean-one in that multiplicative domain so
    // E[d_hat] = C * d_true holds exactly.
    const double log_sigma = std::log(10.0) * p.shadow_sigma / (10.0 * p.np);
    const double shadow = mean_one_lognormal(log_sigma, rng);
    const double rss = p.pi0 - 10.0 * p.np * std::log10(p.bias_c * d_true * shadow / p.delta0);
    RssSample s;
    s.d_hat = p.delta0 * std::pow(10.0, (p.pi0 - rss) / (10.0 * p.np));
    // log-std chosen so the relative std of c_hat is exactly c_est_sigma
    const double c_sigma = std::sqrt(std::log1p(p.c_est_sigma * p.c_est_sigma));
    s.c_hat = p.bias_c * mean_one_lognormal(c_sigma, rng);
    return s;
}

ToaSample measure_distance_toa(double d_true, const ToaParams& p, RngStream& rng) {
    if (d_true <= 0.0) throw StructuralError("distance must be positive");
    ToaSample s;
    s.t = rng.normal(d_true / p.nu_p + p.mu_t, p.sigma_t);
    s.mu_hat = p.mu_t + rng.normal(0.0, p.mu_est_sigma);
    return s;
}

int sample_link(double q_ln, RngStream& rng) {
    if (!(q_ln > 0.0 && q_ln <= 1.0)) throw StructuralError("link q must be in (0, 1]");
    return rng.bernoulli(q_ln) ? 1 : 0;
}

Eigen::MatrixXd sample_comm_noise(const CommNoiseModel& model, int rows, int cols,
                                  RngStream& rng) {
    if (model.sigma_v < 0.0) throw StructuralError("sigma_v must be nonnegative");
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(rows, cols);
    if (model.sigma_v == 0.0) return v;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) v(i, j) = rng.normal(0.0, model.sigma_v);
    return v;
}

LinkRealization all_links_active(int n_sensors, int m) {
    LinkRealization r;
    r.e_sensors = Eigen::MatrixXd::Ones(n_sensors, n_sensors);
    r.e_anchors = Eigen::MatrixXd::Ones(n_sensors, m + 1);
    r.q_sensors = Eigen::MatrixXd::Ones(n_sensors, n_sensors);
    r.q_anchors = Eigen::MatrixXd::Ones(n_sensors, m + 1);
    r.failures_possible = false;
    return r;
}

NoiseRealization zero_noise(int n_sensors, int m) {
    NoiseRealization r;
    r.v_sensors.assign(m, Eigen::MatrixXd::Zero(n_sensors, n_sensors));
    r.v_anchors.assign(m, Eigen::MatrixXd::Zero(n_sensors, m + 1));
    r.noise_enabled = false;
    return r;
}

LinkRealization sample_link_realization(const Network& net, const LinkModel& model,
                                        RngStream& rng) {
    model.validate();
    const int M = net.num_sensors();
    LinkRealization r;
    r.e_sensors = Eigen::MatrixXd::Zero(M, M);
    // A node always hears itself: the diagonal self-link never fails. Hold
    // rows (P = I) rely on this to keep unrefreshed sensors in place.
    r.e_sensors.diagonal().setOnes();
    r.e_anchors = Eigen::MatrixXd::Zero(M, net.m + 1);
    r.q_sensors = Eigen::MatrixXd::Ones(M, M);
    r.q_anchors = Eigen::MatrixXd::Ones(M, net.m + 1);
    r.failures_possible = model.any_failures();
    for (const PairKey& p : net.required_pairs()) {
        const double q = model.q_for(p.first, p.second);
        const double e = sample_link(q, rng);
        const bool first_anchor = net.is_anchor(p.first);
        const bool second_anchor = net.is_anchor(p.second);
        if (first_anchor && second_anchor) continue;  // anchors never update
        if (first_anchor) {
            const int row = net.sensor_index(p.second);
            r.e_anchors(row, p.first) = e;
            r.q_anchors(row, p.first) = q;
        } else if (second_anchor) {
            // impossible for normalized keys (anchors have the smallest ids)
            const int row = net.sensor_index(p.first);
            r.e_anchors(row, p.second) = e;
            r.q_anchors(row, p.second) = q;
        } else {
            const int i = net.sensor_index(p.first);
            const int j = net.sensor_index(p.second);
            r.e_sensors(i, j) = r.e_sensors(j, i) = e;
            r.q_sensors(i, j) = r.q_sensors(j, i) = q;
        }
    }
    return r;
}

NoiseRealization sample_noise_realization(const Network& net, const CommNoiseModel& model,
                                          RngStream& rng) {
    NoiseRealization r = zero_noise(net.num_sensors(), net.m);
    if (model.sigma_v < 0.0) throw StructuralError("sigma_v must be nonnegative");
    if (model.sigma_v == 0.0) return r;
    r.noise_enabled = true;
    for (int l = 0; l < net.num_sensors(); ++l)
        for (int n : net.triangulation[l])
            for (int j = 0; j < net.m; ++j) {
                const double v = rng.normal(0.0, model.sigma_v);
                if (net.is_anchor(n))
                    r.v_anchors[j](l, n) = v;
                else
                    r.v_sensors[j](l, net.sensor_index(n)) = v;
            }
    return r;
}

double draw_corrected_sample(const ChannelConfig& cfg, double d_true, RngStream& rng) {
    switch (cfg.model) {
        case DistanceModel::Exact:
            return d_true;
        case DistanceModel::Gaussian:
            return measure_distance_gaussian(d_true, cfg.gaussian, rng);
        case DistanceModel::Rss: {
            const RssSample s = measure_distance_rss(d_true, cfg.rss, rng);
            return clamp_floor(bias_corrected_sample(s.d_hat, s.c_hat), d_true);
        }
        case DistanceModel::Toa: {
            const ToaSample s = measure_distance_toa(d_true, cfg.toa, rng);
            return clamp_floor((s.t - s.mu_hat) * cfg.toa.nu_p, d_true);
        }
    }
    throw StructuralError("unknown distance model");
}

}  // namespace diland
