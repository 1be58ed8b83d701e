#include "diland/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "diland/geometry.hpp"
#include "diland/rng.hpp"

namespace diland {

Eigen::VectorXd Network::position(int id) const {
    if (is_anchor(id)) return anchors.row(id);
    return sensors_truth.row(sensor_index(id));
}

double Network::true_distance(int a, int b) const {
    return (position(a) - position(b)).norm();
}

std::vector<PairKey> Network::required_pairs() const {
    std::set<PairKey> pairs;
    for (int s = 0; s < num_sensors(); ++s) {
        std::vector<int> dl = triangulation[s];
        dl.push_back(sensor_id(s));
        for (std::size_t i = 0; i < dl.size(); ++i)
            for (std::size_t j = i + 1; j < dl.size(); ++j)
                pairs.insert(make_pair_key(dl[i], dl[j]));
    }
    return {pairs.begin(), pairs.end()};
}

DistanceMap Network::exact_distances() const {
    DistanceMap d;
    for (const PairKey& p : required_pairs()) d[p] = true_distance(p.first, p.second);
    return d;
}

Eigen::MatrixXd reference_simplex(int m) {
    Eigen::MatrixXd a(m + 1, m);
    switch (m) {
        case 1:
            a << 0.0, 1.0;
            break;
        case 2:
            a << 0.0, 0.0, 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
            break;
        case 3:
            a << 0.0, 0.0, 0.0,
                 1.0, 0.0, 0.0,
                 0.5, std::sqrt(3.0) / 2.0, 0.0,
                 0.5, std::sqrt(3.0) / 6.0, std::sqrt(6.0) / 3.0;
            break;
        default:
            throw StructuralError("reference simplex only defined for m in {1,2,3}");
    }
    return a;
}

Eigen::VectorXd sample_point_in_hull(const Eigen::MatrixXd& anchors, RngStream& rng) {
    const int m = static_cast<int>(anchors.cols());
    Eigen::VectorXd w(m + 1);
    for (int i = 0; i <= m; ++i) w(i) = rng.exponential();
    w /= w.sum();
    return anchors.transpose() * w;
}

namespace {

SimplexDistances subset_distances(int m, int l, const std::vector<int>& subset,
                                  const DistanceFn& dist) {
    const int n = static_cast<int>(subset.size()) + 1;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> ids;
    ids.reserve(n);
    ids.push_back(l);
    ids.insert(ids.end(), subset.begin(), subset.end());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            d(i, j) = dist(ids[i], ids[j]);
            d(j, i) = d(i, j);
        }
    return SimplexDistances::create(m, std::move(d));
}

}  // namespace

namespace {

/// Fat simplex, sensor inside with coordinate margin. Both guards exist for
/// the same reason: rows built from measured distances must survive the
/// measurement noise, and thin simplices (small contents or near-zero
/// coordinates) flip infeasible under tiny perturbations.
bool robust_triangulation(int m, const SimplexDistances& sd) {
    const Eigen::MatrixXd base_d = sd.d.bottomRightCorner(m + 1, m + 1);
    const double maxd = base_d.maxCoeff();
    const double content = cayley_menger_sq_content(SimplexDistances{m, base_d});
    if (content <= 0.0 ||
        std::sqrt(content) < kTriangulationFatness * std::pow(maxd, m))
        return false;
    const Eigen::VectorXd w = barycentric_coordinates(m, sd).coords;
    return w.minCoeff() >= kTriangulationMargin;
}

}  // namespace

std::optional<std::vector<int>> find_triangulation(int m, int l, std::vector<int> candidates,
                                                   const DistanceFn& dist) {
    std::sort(candidates.begin(), candidates.end());
    const int n = static_cast<int>(candidates.size());
    const int k = m + 1;
    if (n < k) return std::nullopt;

    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<int> subset(k);
        for (int i = 0; i < k; ++i) subset[i] = candidates[idx[i]];
        try {
            if (robust_triangulation(m, subset_distances(m, l, subset, dist))) return subset;
        } catch (const Error&) {
            // degenerate or inconsistent subset: not a valid triangulation
        }
        // next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return std::nullopt;
}

Network generate_deployment(int m, int n_sensors, double comm_radius, std::uint64_t seed) {
    if (n_sensors < 1) throw StructuralError("need at least one sensor");
    if (comm_radius <= 0.0) throw StructuralError("comm_radius must be positive");

    Network net;
    net.m = m;
    net.comm_radius = comm_radius;
    net.anchors = reference_simplex(m);

    RngStream rng(seed, StreamPurpose::Deployment);
    net.sensors_truth.resize(n_sensors, m);
    for (int s = 0; s < n_sensors; ++s)
        net.sensors_truth.row(s) = sample_point_in_hull(net.anchors, rng).transpose();

    const DistanceFn dist = [&net](int a, int b) { return net.true_distance(a, b); };
    std::vector<int> redraws(n_sensors, 0);
    constexpr int kMaxRedraws = 50;

    // Redrawing one sensor can invalidate another sensor's already-found set,
    // so every redraw restarts the triangulation pass.
    while (true) {
        net.triangulation.assign(n_sensors, {});
        int failed = -1;
        for (int s = 0; s < n_sensors; ++s) {
            const int l = net.sensor_id(s);
            std::vector<int> candidates;
            for (int id = 0; id < net.num_nodes(); ++id)
                if (id != l && net.true_distance(l, id) <= comm_radius) candidates.push_back(id);
            auto theta = find_triangulation(m, l, candidates, dist);
            if (!theta) {
                failed = s;
                break;
            }
            net.triangulation[s] = *theta;
        }
        if (failed < 0) break;
        if (++redraws[failed] > kMaxRedraws)
            throw TriangulationFailed(
                "no valid triangulation for sensor " + std::to_string(net.sensor_id(failed)) +
                    " after " + std::to_string(kMaxRedraws) + " redraws",
                net.sensor_id(failed));
        net.sensors_truth.row(failed) = sample_point_in_hull(net.anchors, rng).transpose();
    }
    return net;
}

SystemAssembler::SystemAssembler(const Network& net, const std::vector<PairKey>& pairs)
    : m_(net.m), n_sensors_(net.num_sensors()), pairs_(pairs) {
    std::map<PairKey, int> index;
    for (std::size_t i = 0; i < pairs_.size(); ++i) index[pairs_[i]] = static_cast<int>(i);

    row_nodes_.resize(n_sensors_);
    pair_index_.resize(n_sensors_);
    const int n = m_ + 2;
    for (int s = 0; s < n_sensors_; ++s) {
        std::vector<int>& ids = row_nodes_[s];
        ids.push_back(net.sensor_id(s));
        ids.insert(ids.end(), net.triangulation[s].begin(), net.triangulation[s].end());
        if (static_cast<int>(ids.size()) != n)
            throw StructuralError("triangulation set must have m+1 nodes");
        std::vector<int>& tab = pair_index_[s];
        tab.assign(n * n, -1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                auto it = index.find(make_pair_key(ids[i], ids[j]));
                if (it == index.end())
                    throw StructuralError("distance set does not cover all pairs in D_l");
                tab[i * n + j] = it->second;
            }
    }
}

Eigen::VectorXd SystemAssembler::row_coords(int s, const Eigen::VectorXd& pair_values) const {
    const int n = m_ + 2;
    Eigen::MatrixXd d(n, n);
    const std::vector<int>& tab = pair_index_[s];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = (i == j) ? 0.0 : pair_values[tab[i * n + j]];
    return barycentric_coordinates(m_, SimplexDistances{m_, d}).coords;
}

void SystemAssembler::write_row(int s, const Eigen::VectorXd& coords,
                                SystemMatrices& sys) const {
    // Clear first: the previous content may be the P = I hold row, whose
    // diagonal entry lies outside the triangulation sparsity pattern.
    sys.P.row(s).setZero();
    sys.B.row(s).setZero();
    for (int v = 0; v < m_ + 1; ++v) {
        const int node = row_nodes_[s][v + 1];
        if (node <= m_)
            sys.B(s, node) = coords(v);
        else
            sys.P(s, node - m_ - 1) = coords(v);
    }
}

SystemMatrices SystemAssembler::assemble(const Eigen::VectorXd& pair_values) const {
    SystemMatrices sys;
    sys.P = Eigen::MatrixXd::Zero(n_sensors_, n_sensors_);
    sys.B = Eigen::MatrixXd::Zero(n_sensors_, m_ + 1);
    for (int s = 0; s < n_sensors_; ++s) {
        try {
            write_row(s, row_coords(s, pair_values), sys);
        } catch (const InfeasibleDistances& e) {
            throw InfeasibleDistances(std::string(e.what()) + " (sensor " +
                                          std::to_string(row_nodes_[s][0]) + ")",
                                      row_nodes_[s][0]);
        } catch (const DegenerateSimplex& e) {
            throw DegenerateSimplex(std::string(e.what()) + " (sensor " +
                                    std::to_string(row_nodes_[s][0]) + ")");
        }
    }
    return sys;
}

SystemMatrices SystemAssembler::hold_system() const {
    SystemMatrices sys;
    sys.P = Eigen::MatrixXd::Identity(n_sensors_, n_sensors_);
    sys.B = Eigen::MatrixXd::Zero(n_sensors_, m_ + 1);
    return sys;
}

int SystemAssembler::refresh_rows(const Eigen::VectorXd& pair_values,
                                  SystemMatrices& sys) const {
    int failed = 0;
    for (int s = 0; s < n_sensors_; ++s) {
        Eigen::VectorXd coords;
        try {
            coords = row_coords(s, pair_values);
        } catch (const InfeasibleDistances&) {
            ++failed;
            continue;
        } catch (const DegenerateSimplex&) {
            ++failed;
            continue;
        }
        // The signed solve is valid slightly outside the hull; beyond the
        // margin the weights start destabilizing the iteration, so keep the
        // last good row instead.
        if (coords.minCoeff() < -kTriangulationMargin) {
            ++failed;
            continue;
        }
        write_row(s, coords, sys);
    }
    return failed;
}

SystemMatrices assemble_system(const Network& net, const DistanceMap& dists) {
    // A5: every anchor must appear in some triangulation set, otherwise its
    // column of B is structurally zero and the fixed point loses the anchor.
    std::vector<bool> seen(net.num_anchors(), false);
    for (const auto& theta : net.triangulation)
        for (int id : theta)
            if (net.is_anchor(id)) seen[id] = true;
    for (int k = 0; k < net.num_anchors(); ++k)
        if (!seen[k])
            throw StructuralError("anchor " + std::to_string(k) +
                                  " is in no triangulation set (no link to any sensor)");

    std::vector<PairKey> pairs = net.required_pairs();
    Eigen::VectorXd values(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto it = dists.find(pairs[i]);
        if (it == dists.end())
            throw StructuralError("distance set does not cover all pairs in D_l");
        values[static_cast<int>(i)] = it->second;
    }
    return SystemAssembler(net, pairs).assemble(values);
}

Eigen::MatrixXd exact_locations(const SystemMatrices& sys, const Eigen::MatrixXd& U) {
    const int M = static_cast<int>(sys.P.rows());
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M, M) - sys.P;
    const Eigen::MatrixXd rhs = sys.B * U;
    Eigen::MatrixXd X = A.partialPivLu().solve(rhs);
    const double residual = (X - sys.P * X - rhs).cwiseAbs().maxCoeff();
    const double scale = 1.0 + X.cwiseAbs().maxCoeff();
    if (!X.allFinite() || residual > 1e-10 * scale)
        throw SingularSystem("fixed-point solve failed (spectral radius >= 1?)");
    return X;
}

double spectral_radius_estimate(const Eigen::MatrixXd& P) {
    if (P.rows() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(P.rows());
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = P * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        if (std::abs(norm - lambda) <= 1e-12 * std::max(norm, 1e-300)) return norm;
        lambda = norm;
        v = w / norm;
    }
    return lambda;
}

nlohmann::json network_to_json(const Network& net) {
    nlohmann::json j;
    j["dimension"] = net.m;
    j["comm_radius"] = net.comm_radius;
    nlohmann::json anchors = nlohmann::json::array();
    for (int k = 0; k < net.num_anchors(); ++k) {
        std::vector<double> pos(net.anchors.row(k).begin(), net.anchors.row(k).end());
        anchors.push_back({{"id", k}, {"position", pos}});
    }
    j["anchors"] = anchors;
    nlohmann::json sensors = nlohmann::json::array();
    for (int s = 0; s < net.num_sensors(); ++s) {
        std::vector<double> pos(net.sensors_truth.row(s).begin(), net.sensors_truth.row(s).end());
        sensors.push_back({{"id", net.sensor_id(s)},
                           {"position", pos},
                           {"triangulation", net.triangulation[s]}});
    }
    j["sensors"] = sensors;
    return j;
}

Network network_from_json(const nlohmann::json& j) {
    Network net;
    net.m = j.at("dimension").get<int>();
    net.comm_radius = j.at("comm_radius").get<double>();
    const auto& anchors = j.at("anchors");
    if (static_cast<int>(anchors.size()) != net.m + 1)
        throw StructuralError("network JSON: expected m+1 anchors");
    net.anchors.resize(net.m + 1, net.m);
    for (const auto& a : anchors) {
        const int id = a.at("id").get<int>();
        const auto pos = a.at("position").get<std::vector<double>>();
        if (id < 0 || id > net.m || static_cast<int>(pos.size()) != net.m)
            throw StructuralError("network JSON: bad anchor entry");
        for (int c = 0; c < net.m; ++c) net.anchors(id, c) = pos[c];
    }
    const auto& sensors = j.at("sensors");
    net.sensors_truth.resize(static_cast<int>(sensors.size()), net.m);
    net.triangulation.resize(sensors.size());
    for (const auto& s : sensors) {
        const int id = s.at("id").get<int>();
        const int idx = net.sensor_index(id);
        if (idx < 0 || idx >= static_cast<int>(sensors.size()))
            throw StructuralError("network JSON: sensor ids must be contiguous from m+1");
        const auto pos = s.at("position").get<std::vector<double>>();
        if (static_cast<int>(pos.size()) != net.m)
            throw StructuralError("network JSON: bad sensor position");
        for (int c = 0; c < net.m; ++c) net.sensors_truth(idx, c) = pos[c];
        net.triangulation[idx] = s.at("triangulation").get<std::vector<int>>();
        if (static_cast<int>(net.triangulation[idx].size()) != net.m + 1)
            throw StructuralError("network JSON: triangulation must list m+1 nodes");
    }
    return net;
}

void save_network_json(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << network_to_json(net).dump(2) << "\n";
}

Network load_network_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return network_from_json(j);
}

}  // namespace diland
