#include <cmath>

#include <doctest.h>

#include "diland/geometry.hpp"
#include "diland/rng.hpp"
#include "oracles.hpp"

using diland::BarycentricCoords;
using diland::DegenerateSimplex;
using diland::InfeasibleDistances;
using diland::RngStream;
using diland::SimplexDistances;
using diland::StructuralError;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd equilateral_triangle() {
    MatrixXd v(3, 2);
    v << 0.0, 0.0, 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
    return v;
}

SimplexDistances point_and_simplex(const MatrixXd& vertices, const VectorXd& point) {
    const int n = static_cast<int>(vertices.rows());
    MatrixXd pts(n + 1, vertices.cols());
    pts.row(0) = point.transpose();
    pts.bottomRows(n) = vertices;
    return SimplexDistances::create(static_cast<int>(vertices.cols()),
                                    oracle::pairwise_distances(pts));
}

}  // namespace

TEST_CASE("squared content of segments, triangles, and degenerate sets") {
    MatrixXd seg(2, 2);
    seg << 0.0, 2.0, 2.0, 0.0;
    CHECK(diland::cayley_menger_sq_content(SimplexDistances::create(1, seg)) ==
          doctest::Approx(4.0).epsilon(1e-14));

    const auto tri = SimplexDistances::create(2, oracle::pairwise_distances(equilateral_triangle()));
    const double c = diland::cayley_menger_sq_content(tri);
    CHECK(c == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    const double heron = oracle::heron_area(1.0, 1.0, 1.0);
    CHECK(c == doctest::Approx(heron * heron).epsilon(1e-12));

    MatrixXd collinear(3, 3);
    collinear << 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0;
    CHECK(std::abs(diland::cayley_menger_sq_content(SimplexDistances::create(2, collinear))) <=
          1e-12);
}

TEST_CASE("squared content matches Heron on random triangles") {
    RngStream rng(2026);
    for (int i = 0; i < 100; ++i) {
        const MatrixXd v = oracle::random_simplex(2, rng);
        const auto s = SimplexDistances::create(2, oracle::pairwise_distances(v));
        const double a = oracle::heron_area(s.d(0, 1), s.d(0, 2), s.d(1, 2));
        CHECK(diland::cayley_menger_sq_content(s) == doctest::Approx(a * a).epsilon(1e-9));
    }
}

TEST_CASE("content tolerance scales with the squared-content units") {
    CHECK(diland::geometry_content_tolerance(1, 1.0) == doctest::Approx(1e-12));
    CHECK(diland::geometry_content_tolerance(2, 10.0) == doctest::Approx(1e-8));
    CHECK(diland::geometry_content_tolerance(3, 2.0) == doctest::Approx(1e-12 * 64.0));
}

TEST_CASE("simplex distance validation") {
    MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 2.0, 0.0;
    CHECK_THROWS_AS(SimplexDistances::create(1, bad), StructuralError);

    MatrixXd neg(2, 2);
    neg << 0.0, -1.0, -1.0, 0.0;
    CHECK_THROWS_AS(SimplexDistances::create(1, neg), StructuralError);

    MatrixXd diag(2, 2);
    diag << 0.5, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(SimplexDistances::create(1, diag), StructuralError);

    MatrixXd ok(2, 2);
    ok << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(SimplexDistances::create(0, ok), StructuralError);
}

TEST_CASE("metric feasibility check") {
    MatrixXd good(3, 3);
    good << 0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0;
    CHECK(SimplexDistances::create(2, good).feasible());

    MatrixXd bad(3, 3);
    bad << 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0;
    CHECK_FALSE(SimplexDistances::create(2, bad).feasible());
}

TEST_CASE("barycentric coordinates at a vertex, the centroid, and an edge midpoint") {
    const MatrixXd tri = equilateral_triangle();

    SUBCASE("point coincides with the first vertex") {
        MatrixXd d(4, 4);
        d << 0.0, 0.0, 1.0, 1.0,  //
            0.0, 0.0, 1.0, 1.0,   //
            1.0, 1.0, 0.0, 1.0,   //
            1.0, 1.0, 1.0, 0.0;
        const auto b = diland::barycentric_coordinates(2, SimplexDistances::create(2, d));
        CHECK(std::abs(b.coords(0) - 1.0) <= 1e-12);
        CHECK(std::abs(b.coords(1)) <= 1e-12);
        CHECK(std::abs(b.coords(2)) <= 1e-12);
    }

    SUBCASE("centroid is equidistant at 1/sqrt(3)") {
        const double r = 1.0 / std::sqrt(3.0);
        MatrixXd d(4, 4);
        d << 0.0, r, r, r,   //
            r, 0.0, 1.0, 1.0,  //
            r, 1.0, 0.0, 1.0,  //
            r, 1.0, 1.0, 0.0;
        const auto b = diland::barycentric_coordinates(2, SimplexDistances::create(2, d));
        for (int i = 0; i < 3; ++i) CHECK(b.coords(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("midpoint of an edge zeroes the opposite coordinate") {
        const double h = std::sqrt(3.0) / 2.0;
        MatrixXd d(4, 4);
        d << 0.0, 0.5, 0.5, h,   //
            0.5, 0.0, 1.0, 1.0,  //
            0.5, 1.0, 0.0, 1.0,  //
            h, 1.0, 1.0, 0.0;
        const auto b = diland::barycentric_coordinates(2, SimplexDistances::create(2, d));
        CHECK(b.coords(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(b.coords(1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(b.coords(2)) <= 1e-12);
    }

    (void)tri;
}

TEST_CASE("barycentric coordinates match the Cartesian oracle") {
    RngStream rng(99);
    for (int m : {2, 3}) {
        for (int i = 0; i < 100; ++i) {
            const MatrixXd v = oracle::random_simplex(m, rng);
            // Interior points plus a few exterior ones: the solve is signed.
            VectorXd p = oracle::random_interior_point(v, rng);
            if (i % 5 == 0) p = (2.0 * p - v.row(0).transpose()).eval();
            const auto b = diland::barycentric_coordinates(m, point_and_simplex(v, p));
            const VectorXd ref = oracle::cartesian_barycentric(v, p);
            CHECK((b.coords - ref).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(b.coords.sum() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("barycentric coordinates are label-permutation invariant") {
    RngStream rng(7);
    for (int i = 0; i < 50; ++i) {
        const MatrixXd v = oracle::random_simplex(2, rng);
        const VectorXd p = oracle::random_interior_point(v, rng);
        const auto base = diland::barycentric_coordinates(2, point_and_simplex(v, p));

        const int perm[3] = {2, 0, 1};
        MatrixXd vp(3, 2);
        for (int a = 0; a < 3; ++a) vp.row(a) = v.row(perm[a]);
        const auto permuted = diland::barycentric_coordinates(2, point_and_simplex(vp, p));
        for (int a = 0; a < 3; ++a)
            CHECK(std::abs(permuted.coords(a) - base.coords(perm[a])) <= 1e-12);
    }
}

TEST_CASE("uniform scaling covaries content and preserves coordinates") {
    RngStream rng(11);
    for (int m : {1, 2, 3}) {
        const MatrixXd v = oracle::random_simplex(m, rng);
        const auto s = SimplexDistances::create(m, oracle::pairwise_distances(v));
        const double c = diland::cayley_menger_sq_content(s);
        const double scale = 3.7;
        const auto scaled = SimplexDistances::create(m, (scale * s.d).eval());
        CHECK(diland::cayley_menger_sq_content(scaled) ==
              doctest::Approx(std::pow(scale, 2 * m) * c).epsilon(1e-9));
    }
    for (int i = 0; i < 20; ++i) {
        const MatrixXd v = oracle::random_simplex(2, rng);
        const VectorXd p = oracle::random_interior_point(v, rng);
        const auto s = point_and_simplex(v, p);
        const auto b = diland::barycentric_coordinates(2, s);
        const auto bs = diland::barycentric_coordinates(
            2, SimplexDistances::create(2, (0.25 * s.d).eval()));
        CHECK((b.coords - bs.coords).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("degenerate and infeasible inputs are rejected") {
    // Collinear base: zero content.
    MatrixXd pts(4, 2);
    pts << 0.3, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;
    const auto collinear = SimplexDistances::create(2, oracle::pairwise_distances(pts));
    CHECK_THROWS_AS(diland::barycentric_coordinates(2, collinear), DegenerateSimplex);
    CHECK_THROWS_AS(diland::hull_inclusion_test(2, collinear), DegenerateSimplex);

    // Base violates the triangle inequality outright.
    MatrixXd bad(4, 4);
    bad << 0.0, 1.0, 1.0, 1.0,  //
        1.0, 0.0, 1.0, 3.0,     //
        1.0, 1.0, 0.0, 1.0,     //
        1.0, 3.0, 1.0, 0.0;
    CHECK_THROWS_AS(diland::barycentric_coordinates(2, SimplexDistances::create(2, bad)),
                    InfeasibleDistances);

    // Base is fine but the point's distances are impossible.
    MatrixXd badpoint(4, 4);
    badpoint << 0.0, 10.0, 0.1, 0.1,  //
        10.0, 0.0, 1.0, 1.0,          //
        0.1, 1.0, 0.0, 1.0,           //
        0.1, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(diland::barycentric_coordinates(2, SimplexDistances::create(2, badpoint)),
                    InfeasibleDistances);

    // Shape mismatch.
    MatrixXd tri = oracle::pairwise_distances(equilateral_triangle());
    CHECK_THROWS_AS(diland::barycentric_coordinates(2, SimplexDistances::create(2, tri)),
                    StructuralError);
}

TEST_CASE("hull inclusion for interior, exterior, and boundary points") {
    const MatrixXd tri = equilateral_triangle();
    const VectorXd centroid = tri.colwise().mean().transpose();
    CHECK(diland::hull_inclusion_test(2, point_and_simplex(tri, centroid)));

    // Equidistant at 2 from every vertex: realizable off-plane, not in the hull.
    MatrixXd far(4, 4);
    far << 0.0, 2.0, 2.0, 2.0,  //
        2.0, 0.0, 1.0, 1.0,     //
        2.0, 1.0, 0.0, 1.0,     //
        2.0, 1.0, 1.0, 0.0;
    CHECK_FALSE(diland::hull_inclusion_test(2, SimplexDistances::create(2, far)));

    VectorXd mid = 0.5 * (tri.row(0) + tri.row(1)).transpose();
    CHECK(diland::hull_inclusion_test(2, point_and_simplex(tri, mid)));

    VectorXd outside = tri.row(0).transpose() - 0.2 * (centroid - tri.row(0).transpose());
    CHECK_FALSE(diland::hull_inclusion_test(2, point_and_simplex(tri, outside)));
}

TEST_CASE("hull inclusion in three dimensions") {
    RngStream rng(41);
    for (int i = 0; i < 25; ++i) {
        const MatrixXd v = oracle::random_simplex(3, rng);
        const VectorXd inside = oracle::random_interior_point(v, rng);
        CHECK(diland::hull_inclusion_test(3, point_and_simplex(v, inside)));
        const VectorXd outside =
            (v.row(0) + 1.5 * (v.row(0) - v.row(1))).transpose();
        CHECK_FALSE(diland::hull_inclusion_test(3, point_and_simplex(v, outside)));
    }
}

TEST_CASE("replaced contents partition the base content for interior points") {
    RngStream rng(53);
    for (int i = 0; i < 40; ++i) {
        const int m = (i % 2 == 0) ? 2 : 3;
        const MatrixXd v = oracle::random_simplex(m, rng);
        const VectorXd p = oracle::random_interior_point(v, rng);
        const auto all = point_and_simplex(v, p);
        REQUIRE(diland::hull_inclusion_test(m, all));

        const double base = std::sqrt(diland::cayley_menger_sq_content(
            SimplexDistances::create(m, all.d.bottomRightCorner(m + 1, m + 1).eval())));
        double sum = 0.0;
        for (int n = 1; n <= m + 1; ++n) {
            MatrixXd pts(m + 1, m);
            pts.row(0) = p.transpose();
            int r = 1;
            for (int a = 0; a <= m; ++a) {
                if (a == n - 1) continue;
                pts.row(r++) = v.row(a);
            }
            const double c = diland::cayley_menger_sq_content(
                SimplexDistances::create(m, oracle::pairwise_distances(pts)));
            sum += std::sqrt(std::max(c, 0.0));
        }
        CHECK(sum == doctest::Approx(base).epsilon(1e-8));
    }
}
