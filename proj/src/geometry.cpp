#include "diland/geometry.hpp"

#include <cmath>
#include <string>

namespace diland {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// ((-1)^(k+1) / (2^k (k!)^2)) * det of the (k+2)x(k+2) bordered matrix
/// [[0, 1^T], [1, D2]] where D2 holds squared pairwise distances.
double sq_content_from_sq_dists(const Eigen::MatrixXd& d2) {
    const int k = static_cast<int>(d2.rows()) - 1;
    Eigen::MatrixXd cm(k + 2, k + 2);
    cm(0, 0) = 0.0;
    cm.row(0).tail(k + 1).setOnes();
    cm.col(0).tail(k + 1).setOnes();
    cm.bottomRightCorner(k + 1, k + 1) = d2;
    const double det = cm.determinant();
    const double kfact = factorial(k);
    const double scale = std::pow(2.0, k) * kfact * kfact;
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^(k+1)
    return sign * det / scale;
}

}  // namespace

SimplexDistances SimplexDistances::create(int dim, Eigen::MatrixXd d) {
    if (dim < 1) throw StructuralError("simplex dimension must be positive");
    if (d.rows() != d.cols() || d.rows() < 2)
        throw StructuralError("distance matrix must be square with at least 2 rows");
    const int n = static_cast<int>(d.rows());
    if (n - 1 > dim + 1)
        throw StructuralError("simplex order exceeds dim+1 points allowed by barycentric use");
    for (int i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) throw StructuralError("distance matrix diagonal must be zero");
        for (int j = i + 1; j < n; ++j) {
            if (d(i, j) < 0.0) throw StructuralError("distances must be nonnegative");
            if (d(i, j) != d(j, i)) throw StructuralError("distance matrix must be symmetric");
        }
    }
    return SimplexDistances{dim, std::move(d)};
}

double geometry_content_tolerance(int k, double max_dist) {
    return 1e-12 * std::pow(max_dist, 2 * k);
}

bool SimplexDistances::feasible() const {
    const double c = cayley_menger_sq_content(*this);
    return c >= -geometry_content_tolerance(order(), d.maxCoeff());
}

double cayley_menger_sq_content(const SimplexDistances& s) {
    const int n = static_cast<int>(s.d.rows());
    if (n != s.d.cols() || n < 2)
        throw StructuralError("cayley_menger_sq_content: matrix must be (k+1)x(k+1), k >= 1");
    return sq_content_from_sq_dists(s.d.array().square().matrix());
}

BarycentricCoords barycentric_coordinates(int m, const SimplexDistances& dists) {
    if (dists.d.rows() != m + 2)
        throw StructuralError("barycentric_coordinates: need (m+2)x(m+2) distances over {l} + vertices");
    const Eigen::MatrixXd d2 = dists.d.array().square().matrix();

    // Base simplex: vertices 1..m+1.
    const Eigen::MatrixXd base_d2 = d2.bottomRightCorner(m + 1, m + 1);
    const double base_maxd = dists.d.bottomRightCorner(m + 1, m + 1).maxCoeff();
    const double base_eps = geometry_content_tolerance(m, base_maxd);
    const double base_content = sq_content_from_sq_dists(base_d2);
    if (base_content < -base_eps)
        throw InfeasibleDistances("base simplex distances are metrically inconsistent");
    if (base_content <= base_eps)
        throw DegenerateSimplex("base simplex content is numerically zero");

    // Each sub-simplex replaces one vertex with the point; its content must be
    // nonnegative up to tolerance (tiny violations are routine with noisy
    // distances and are treated as zero content).
    for (int n = 1; n <= m + 1; ++n) {
        Eigen::MatrixXd sub = base_d2;
        for (int j = 1; j <= m + 1; ++j) {
            sub(n - 1, j - 1) = d2(0, j);
            sub(j - 1, n - 1) = d2(j, 0);
        }
        sub(n - 1, n - 1) = 0.0;
        double maxd = 0.0;
        for (int i = 0; i <= m + 1; ++i)
            if (i != n) maxd = std::max(maxd, std::max(dists.d(0, i), dists.d(n, i)));
        maxd = std::max(maxd, base_maxd);
        const double eps = geometry_content_tolerance(m, maxd);
        if (sq_content_from_sq_dists(sub) < -eps)
            throw InfeasibleDistances("replaced-vertex simplex distances are metrically inconsistent");
    }

    // Bordered system [[0, 1^T], [1, D2_base]] [mu; w] = [1; d2(l, .)].
    // Row 0 forces sum(w) = 1; by Cramer's rule w_n is the signed content
    // ratio of the n-th replaced simplex to the base simplex.
    Eigen::MatrixXd sys(m + 2, m + 2);
    sys(0, 0) = 0.0;
    sys.row(0).tail(m + 1).setOnes();
    sys.col(0).tail(m + 1).setOnes();
    sys.bottomRightCorner(m + 1, m + 1) = base_d2;
    Eigen::VectorXd rhs(m + 2);
    rhs(0) = 1.0;
    rhs.tail(m + 1) = d2.row(0).tail(m + 1);

    Eigen::VectorXd sol = sys.partialPivLu().solve(rhs);
    Eigen::VectorXd coords = sol.tail(m + 1);
    coords /= coords.sum();  // keep rows of [P|B] stochastic to machine precision
    return BarycentricCoords{std::move(coords)};
}

bool hull_inclusion_test(int m, const SimplexDistances& dists) {
    if (dists.d.rows() != m + 2)
        throw StructuralError("hull_inclusion_test: need (m+2)x(m+2) distances over {l} + candidates");
    const Eigen::MatrixXd d2 = dists.d.array().square().matrix();

    const Eigen::MatrixXd base_d2 = d2.bottomRightCorner(m + 1, m + 1);
    const double base_maxd = dists.d.bottomRightCorner(m + 1, m + 1).maxCoeff();
    const double base_eps = geometry_content_tolerance(m, base_maxd);
    const double base_content = sq_content_from_sq_dists(base_d2);
    if (base_content < -base_eps)
        throw InfeasibleDistances("base simplex distances are metrically inconsistent");
    if (base_content <= base_eps)
        throw DegenerateSimplex("base simplex content is numerically zero");

    double sub_sum = 0.0;
    for (int n = 1; n <= m + 1; ++n) {
        Eigen::MatrixXd sub = base_d2;
        for (int j = 1; j <= m + 1; ++j) {
            sub(n - 1, j - 1) = d2(0, j);
            sub(j - 1, n - 1) = d2(j, 0);
        }
        sub(n - 1, n - 1) = 0.0;
        double maxd = base_maxd;
        for (int i = 0; i <= m + 1; ++i)
            if (i != n) maxd = std::max(maxd, dists.d(0, i));
        const double eps = geometry_content_tolerance(m, maxd);
        const double c = sq_content_from_sq_dists(sub);
        if (c < -eps)
            throw InfeasibleDistances("replaced-vertex simplex distances are metrically inconsistent");
        sub_sum += std::sqrt(std::max(c, 0.0));
    }

    const double base = std::sqrt(base_content);
    // Inside (boundary included) iff the replaced contents partition the base
    // content; outside or off-subspace configurations give sub_sum > base.
    // The relative excess equals twice the negative coordinate mass, so this
    // is the "all coordinates >= -eps_hull" test in partition form.
    return std::abs(sub_sum - base) <= 2.0 * kHullTolerance * base;
}

}  // namespace diland
