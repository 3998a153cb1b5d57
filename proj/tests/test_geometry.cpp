#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "screenbem/geometry.hpp"

using namespace screenbem;

namespace {

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

constexpr double kBeta = std::numbers::pi / 6.0;

}  // namespace

TEST_CASE("snowflake prefractal construction") {
    for (int j = 0; j <= 5; ++j) {
        const auto poly = koch_prefractal(kBeta, j);
        CHECK(poly.lattice_conforming);
        CHECK(poly.pitch_den == ipow(3, j));
        CHECK(poly.edge_count() == std::size_t(3) * std::size_t(ipow(4, j)));
        // doubled lattice area satisfies 5*S = 8*9^j - 3*4^j (geometric series
        // for the added bump areas)
        CHECK(shoelace2_lattice(poly) == (8 * ipow(9, j) - 3 * ipow(4, j)) / 5);
        const double expected =
            std::sqrt(3.0) / 4.0 *
            (1.0 + 0.6 * (1.0 - std::pow(4.0 / 9.0, j)));
        CHECK(area(poly) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("square snowflake prefractal construction") {
    for (int j = 0; j <= 4; ++j) {
        const auto poly = square_prefractal(j);
        CHECK(poly.lattice_conforming);
        CHECK(poly.pitch_den == ipow(4, j));
        CHECK(poly.edge_count() == std::size_t(4) * std::size_t(ipow(8, j)));
        // added and removed bumps cancel: the area stays exactly 1
        CHECK(shoelace2_lattice(poly) == 2 * ipow(16, j));
    }
}

TEST_CASE("prefractal edges have unit lattice length") {
    for (int j = 0; j <= 3; ++j) {
        for (const auto& poly : {koch_prefractal(kBeta, j), square_prefractal(j)}) {
            const std::size_t n = poly.vertices.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& p = poly.vertices[i];
                const auto& q = poly.vertices[(i + 1) % n];
                const std::int64_t da = q.a - p.a, db = q.b - p.b;
                if (poly.lattice == LatticeKind::triangular)
                    CHECK(da * da + da * db + db * db == 1);
                else
                    CHECK(da * da + db * db == 1);
            }
        }
    }
}

TEST_CASE("prefractal boundaries are simple curves") {
    for (int j = 0; j <= 4; ++j) CHECK(polygon_is_simple(koch_prefractal(kBeta, j)));
    for (int j = 0; j <= 2; ++j) CHECK(polygon_is_simple(square_prefractal(j)));
}

TEST_CASE("square snowflake vertices stay distinct at high level") {
    // unit lattice edges can only self-intersect at repeated vertices
    for (int j = 3; j <= 4; ++j) {
        const auto poly = square_prefractal(j);
        std::set<std::pair<std::int64_t, std::int64_t>> seen;
        for (const auto& v : poly.vertices) seen.insert({v.a, v.b});
        CHECK(seen.size() == poly.vertices.size());
    }
}

TEST_CASE("point location") {
    const auto tri = koch_prefractal(kBeta, 0);
    CHECK(locate_point(tri, 1, 1, 3) == 1);    // centroid
    CHECK(locate_point(tri, 5, 5, 1) == -1);   // far outside
    CHECK(locate_point(tri, 0, 0, 1) == 0);    // corner
    CHECK(locate_point(tri, 1, 0, 2) == 0);    // edge midpoint
    CHECK(locate_point(tri, 1, 1, 4) == 1);
    CHECK(locate_point(tri, -1, 1, 3) == -1);

    const auto sq = square_prefractal(0);
    CHECK(locate_point(sq, 1, 1, 2) == 1);
    CHECK(locate_point(sq, 3, 1, 2) == -1);
    CHECK(locate_point(sq, 0, 1, 2) == 0);
}

TEST_CASE("point location on a concave boundary") {
    const auto poly = square_prefractal(1);  // pitch 1/4, excursions both ways
    // centre of the original square is inside
    CHECK(locate_point(poly, 2, 2, 1) == 1);
    // the first motif cuts a notch above (1,0)-(2,0)/4 and adds a bump
    // below (2,0)-(3,0)/4
    CHECK(locate_point(poly, 5, -1, 2) == 1);   // inside the outward bump
    CHECK(locate_point(poly, 3, 1, 2) == -1);   // inside the notch
}

TEST_CASE("ccw orientation") {
    CHECK(shoelace2_lattice(koch_prefractal(kBeta, 3)) > 0);
    CHECK(shoelace2_lattice(square_prefractal(2)) > 0);
}

TEST_CASE("non-lattice apex angles fall back to float vertices") {
    const double beta = std::numbers::pi / 4.0;
    const auto poly = koch_prefractal(beta, 2);
    CHECK_FALSE(poly.lattice_conforming);
    CHECK(poly.edge_count() == 48);
    CHECK(area(poly) > 0);
}

TEST_CASE("vertex accessor matches the lattice basis") {
    const auto poly = koch_prefractal(kBeta, 1);
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
        const auto v = poly.vertex(i);
        const double p = poly.pitch();
        const double x = p * (double(poly.vertices[i].a) + 0.5 * double(poly.vertices[i].b));
        const double y = p * (std::sqrt(3.0) / 2.0) * double(poly.vertices[i].b);
        CHECK(v[0] == doctest::Approx(x).epsilon(1e-14));
        CHECK(v[1] == doctest::Approx(y).epsilon(1e-14));
    }
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(koch_prefractal(kBeta, -1), std::invalid_argument);
    CHECK_THROWS_AS(koch_prefractal(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(koch_prefractal(std::numbers::pi / 2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(square_prefractal(-2), std::invalid_argument);
}
