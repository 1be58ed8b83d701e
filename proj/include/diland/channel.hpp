#pragma once

#include <Eigen/Dense>
#include <map>

#include "diland/errors.hpp"
#include "diland/network.hpp"
#include "diland/rng.hpp"

namespace diland {

/// Additive measurement noise w ~ Normal(0, variance_factor * d_true).
struct GaussianParams {
    double variance_factor = 0.1;
};

/// Log-distance RSS ranging. A measurement carries a multiplicative bias C
/// (mean of d_hat is C * d_true) plus lognormal shadowing; the receiver also
/// produces a noisy estimate c_hat of C for bias correction.
struct RssParams {
    double delta0 = 1.0;       // reference distance
    double pi0 = -40.0;        // received power at delta0, dB
    double np = 2.3;           // path-loss exponent
    double shadow_sigma = 2.0;  // shadowing std in the dB domain
    double bias_c = 1.2;       // multiplicative ranging bias C
    double c_est_sigma = 0.02;  // relative std of the per-sample C estimate

    void validate() const;
};

/// Time-of-arrival ranging: T ~ Normal(d/nu_p + mu_t, sigma_t^2), corrected
/// with a noisy per-sample delay estimate mu_hat.
struct ToaParams {
    double nu_p = 3.0e8;        // propagation velocity
    double mu_t = 10.9e-9;      // fixed delay bias
    double sigma_t = 0.3e-9;    // delay std
    double mu_est_sigma = 0.1e-9;  // std of the per-sample mu_t estimate

    void validate() const;
};

/// Per-link activation probabilities q_ln; links without an override use
/// default_q. All probabilities must be in (0, 1] because the algorithms
/// divide by q_ln.
struct LinkModel {
    double default_q = 1.0;
    std::map<PairKey, double> q;

    double q_for(int a, int b) const;
    bool any_failures() const;
    void validate() const;
};

/// Zero-mean i.i.d. Gaussian communication noise, per state component.
struct CommNoiseModel {
    double sigma_v = 0.0;
};

/// Distance samples never go below this fraction of the true distance; the
/// geometry layer cannot accept nonpositive distances.
inline constexpr double kDistanceFloorFactor = 1e-6;

/// d_true + Normal(0, variance_factor * d_true), clamped below at
/// kDistanceFloorFactor * d_true. One normal draw.
double measure_distance_gaussian(double d_true, const GaussianParams& p, RngStream& rng);

struct RssSample {
    double d_hat;  // biased range estimate, mean C * d_true
    double c_hat;  // independent estimate of the bias C
};

/// Simulates a received power with mean-one lognormal shadowing and inverts
/// the log-distance model. Two normal draws: shadowing first, then c_hat.
RssSample measure_distance_rss(double d_true, const RssParams& p, RngStream& rng);

struct ToaSample {
    double t;       // arrival time
    double mu_hat;  // independent estimate of the delay bias mu_t
};

/// Two normal draws: arrival time first, then mu_hat.
ToaSample measure_distance_toa(double d_true, const ToaParams& p, RngStream& rng);

/// Bernoulli(q_ln) link activation. One uniform draw.
int sample_link(double q_ln, RngStream& rng);

/// rows x cols matrix of i.i.d. Normal(0, sigma_v^2). Draws row-major;
/// sigma_v = 0 short-circuits to a zero matrix without consuming draws.
Eigen::MatrixXd sample_comm_noise(const CommNoiseModel& model, int rows, int cols,
                                  RngStream& rng);

enum class DistanceModel { Exact, Gaussian, Rss, Toa };

struct ChannelConfig {
    DistanceModel model = DistanceModel::Gaussian;
    GaussianParams gaussian;
    RssParams rss;
    ToaParams toa;

    void validate() const;
};

/// One bias-corrected distance sample for the configured model: Gaussian
/// samples pass through, RSS divides by c_hat, TOA maps (t - mu_hat) * nu_p.
/// Result clamped below at kDistanceFloorFactor * d_true. Exact model returns
/// d_true and consumes no draws.
double draw_corrected_sample(const ChannelConfig& cfg, double d_true, RngStream& rng);

/// One iteration's link activations e_ln over a network, as dense matrices
/// aligned with SystemMatrices (sensor-sensor and sensor-anchor blocks),
/// next to the activation probabilities the update divides by. Links are
/// undirected: one draw per pair, mirrored into both directions.
struct LinkRealization {
    Eigen::MatrixXd e_sensors;  // M x M, entries in {0, 1}
    Eigen::MatrixXd e_anchors;  // M x (m+1)
    Eigen::MatrixXd q_sensors;  // matching probabilities q_ln
    Eigen::MatrixXd q_anchors;
    // true when the generating model admits any failure (q < 1 somewhere);
    // drives the square-summability requirement of the randomized updates
    bool failures_possible = false;
};

/// One iteration's communication noise v_ln^j, independent per receiving
/// sensor l, heard node n, and state component j.
struct NoiseRealization {
    std::vector<Eigen::MatrixXd> v_sensors;  // one M x M matrix per component j
    std::vector<Eigen::MatrixXd> v_anchors;  // one M x (m+1) matrix per j
    bool noise_enabled = false;
};

/// All links active with q = 1 (the deterministic reduction case).
LinkRealization all_links_active(int n_sensors, int m);

/// All-zero noise (the deterministic reduction case).
NoiseRealization zero_noise(int n_sensors, int m);

/// Draws e_ln for every required pair of the network (sorted pair order, one
/// Bernoulli per pair) and scatters into the block matrices. Entries outside
/// the network's neighborhood structure stay e = 0, q = 1.
LinkRealization sample_link_realization(const Network& net, const LinkModel& model,
                                        RngStream& rng);

/// Draws v_ln^j for every (sensor l, n in Theta_l, component j), iterating
/// sensors in order, then the sensor's triangulation set, then components.
NoiseRealization sample_noise_realization(const Network& net, const CommNoiseModel& model,
                                          RngStream& rng);

}  // namespace diland
