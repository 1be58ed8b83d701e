#pragma once

#include <Eigen/Dense>

#include "diland/errors.hpp"

namespace diland {

/// Pairwise distances of a k-simplex's vertex set (k+1 points, k <= m).
/// Symmetric, zero diagonal, nonnegative entries.
struct SimplexDistances {
    int dim;            // ambient spatial dimension m
    Eigen::MatrixXd d;  // (k+1) x (k+1)

    /// Validates shape and symmetry; throws StructuralError on violation.
    static SimplexDistances create(int dim, Eigen::MatrixXd d);

    int order() const { return static_cast<int>(d.rows()) - 1; }  // k

    /// Metric feasibility at the type's own tolerance: squared content >= -eps_geom.
    bool feasible() const;
};

/// Convex weights of a point with respect to the vertices of a simplex.
struct BarycentricCoords {
    Eigen::VectorXd coords;  // m+1 entries, sum to 1
};

/// Scale-relative feasibility tolerance for a k-simplex with largest edge
/// max_dist: 1e-12 * max_dist^(2k).
double geometry_content_tolerance(int k, double max_dist);

/// Squared k-dimensional content from the bordered squared-distance
/// determinant: ((-1)^(k+1) / (2^k (k!)^2)) * det. May be negative when the
/// distances are metrically inconsistent; the caller decides what to do.
double cayley_menger_sq_content(const SimplexDistances& s);

/// Barycentric coordinates of point l (index 0 of `dists`) with respect to the
/// m+1 remaining vertices, from distances alone. `dists` is (m+2) x (m+2).
///
/// Solves the bordered squared-distance linear system; by Cramer's rule each
/// coordinate equals the (signed) content of the simplex with that vertex
/// replaced by l over the content of the base simplex. Coordinates are
/// renormalized to sum exactly to 1.
BarycentricCoords barycentric_coordinates(int m, const SimplexDistances& dists);

/// True iff the point at index 0 lies in the closed convex hull of the other
/// m+1 vertices, decided by the content partition: the contents of the m+1
/// replaced simplices sum to the base content exactly when the point is
/// inside (equivalently, all barycentric coordinates are >= -eps_hull).
bool hull_inclusion_test(int m, const SimplexDistances& dists);

inline constexpr double kHullTolerance = 1e-9;

}  // namespace diland
