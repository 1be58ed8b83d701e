#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "diland/errors.hpp"
#include "diland/rng.hpp"

namespace diland {

/// Unordered node pair, normalized so first < second.
using PairKey = std::pair<int, int>;

inline PairKey make_pair_key(int a, int b) {
    return a < b ? PairKey{a, b} : PairKey{b, a};
}

using DistanceMap = std::map<PairKey, double>;
using DistanceFn = std::function<double(int, int)>;

/// Anchor/sensor deployment with a fixed triangulation set per sensor.
///
/// Node ids: anchors are 0..m (the m+1 reference-simplex vertices), sensors
/// are m+1..N-1. Sensor ground truth is carried for the simulator and metrics
/// only; algorithm steps never receive it.
struct Network {
    int m = 0;
    double comm_radius = 0.0;
    Eigen::MatrixXd anchors;        // (m+1) x m, row k = anchor k
    Eigen::MatrixXd sensors_truth;  // M x m, row s = sensor with node id m+1+s
    std::vector<std::vector<int>> triangulation;  // per sensor: sorted m+1 node ids

    int num_anchors() const { return m + 1; }
    int num_sensors() const { return static_cast<int>(sensors_truth.rows()); }
    int num_nodes() const { return num_anchors() + num_sensors(); }
    bool is_anchor(int id) const { return id >= 0 && id <= m; }
    int sensor_index(int id) const { return id - m - 1; }
    int sensor_id(int index) const { return index + m + 1; }

    Eigen::VectorXd position(int id) const;
    double true_distance(int a, int b) const;

    /// Sorted unique pairs over all D_l = {l} u Theta_l; exactly the distances
    /// the algorithms ever need.
    std::vector<PairKey> required_pairs() const;

    /// True distances for every required pair (simulator/oracle use).
    DistanceMap exact_distances() const;
};

/// Barycentric system matrices: row l of [P | B] holds sensor l's weights
/// over its triangulation set; zero elsewhere.
struct SystemMatrices {
    Eigen::MatrixXd P;  // M x M sensor-sensor
    Eigen::MatrixXd B;  // M x (m+1) sensor-anchor
};

/// Vertices of the fixed reference simplex used for anchor placement
/// (unit segment / unit triangle / unit regular tetrahedron).
Eigen::MatrixXd reference_simplex(int m);

/// Uniform draw inside the convex hull of the rows of `anchors` (normalized
/// exponential weights, the flat Dirichlet). m+1 draws from the stream.
Eigen::VectorXd sample_point_in_hull(const Eigen::MatrixXd& anchors, RngStream& rng);

/// Random deployment: anchors on the reference simplex, sensors uniform in
/// their hull, triangulation discovered per sensor. Deterministic per seed.
/// A sensor with no valid triangulation is redrawn up to 50 times before
/// TriangulationFailed is thrown.
Network generate_deployment(int m, int n_sensors, double comm_radius, std::uint64_t seed);

/// Robustness margin for triangulation search: every barycentric coordinate
/// of the sensor w.r.t. its set must be at least this much, so measured
/// (noisy) distances do not immediately drive a sub-simplex degenerate.
inline constexpr double kTriangulationMargin = 0.05;

/// Shape floor for triangulation search: sqrt(content) of the candidate
/// simplex must be at least this fraction of maxd^m. Rejects slivers, whose
/// contents flip sign under measurement noise.
inline constexpr double kTriangulationFatness = 0.05;

/// First (m+1)-subset of `candidates` (lexicographic over sorted ids) that is
/// no thinner than kTriangulationFatness and contains node l with barycentric
/// margin kTriangulationMargin; nullopt if none passes.
std::optional<std::vector<int>> find_triangulation(int m, int l, std::vector<int> candidates,
                                                   const DistanceFn& dist);

/// Precompiled per-sensor assembly: node-id lists and pair indices are fixed
/// at construction so per-iteration rebuilds are pure array indexing.
class SystemAssembler {
public:
    SystemAssembler(const Network& net, const std::vector<PairKey>& pairs);

    /// Rebuild P and B from the pair values (ordered as the `pairs` argument
    /// of the constructor). Throws InfeasibleDistances / DegenerateSimplex
    /// tagged with the offending sensor.
    SystemMatrices assemble(const Eigen::VectorXd& pair_values) const;

    /// Row-stochastic starting system: P = I, B = 0. Every sensor holds its
    /// state until its first successful row refresh.
    SystemMatrices hold_system() const;

    /// Recompute every sensor's row from the pair values; a row whose solve
    /// fails (infeasible, degenerate, or sensor further than the margin
    /// outside its hull) keeps its current value. Returns the number of
    /// failed rows. This is the noisy-operation path: one bad local estimate
    /// must not invalidate the other sensors' updates.
    int refresh_rows(const Eigen::VectorXd& pair_values, SystemMatrices& sys) const;

    const std::vector<PairKey>& pairs() const { return pairs_; }

private:
    Eigen::VectorXd row_coords(int s, const Eigen::VectorXd& pair_values) const;
    void write_row(int s, const Eigen::VectorXd& coords, SystemMatrices& sys) const;

    int m_;
    int n_sensors_;
    std::vector<PairKey> pairs_;
    // Per sensor: m+2 node ids ({l} then Theta_l) and the flattened
    // (m+2)x(m+2) pair-index table (-1 on the diagonal).
    std::vector<std::vector<int>> row_nodes_;
    std::vector<std::vector<int>> pair_index_;
};

/// Assemble system matrices from an explicit distance set (must cover every
/// pair in every D_l).
SystemMatrices assemble_system(const Network& net, const DistanceMap& dists);

/// Fixed point X* = (I - P)^-1 B U; the exact sensor locations when the
/// matrices come from exact distances. Throws SingularSystem if the solve
/// residual is out of tolerance (spectral radius >= 1).
Eigen::MatrixXd exact_locations(const SystemMatrices& sys, const Eigen::MatrixXd& U);

/// Power-iteration estimate of the spectral radius (500 iterations or
/// relative change < 1e-12). An estimate, not a certificate.
double spectral_radius_estimate(const Eigen::MatrixXd& P);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);
void save_network_json(const Network& net, const std::string& path);
Network load_network_json(const std::string& path);

}  // namespace diland
