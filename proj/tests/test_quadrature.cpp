#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "screenbem/quadrature.hpp"

using namespace screenbem;

namespace {

const Triangle2 kEquilateral{{{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}}};
const Triangle2 kRight{{{{0.2, -0.1}, {1.1, 0.3}, {0.4, 0.9}}}};

Triangle2 shift(const Triangle2& t, double dx, double dy) {
    Triangle2 s = t;
    for (auto& v : s.v) {
        v[0] += dx;
        v[1] += dy;
    }
    return s;
}

/// Closed-form in-plane Newton potential int_T 1/|x-y| dy via the divergence
/// theorem: one log term per edge.
double tri_potential(const Triangle2& t, const Point2& x) {
    double sum = 0;
    for (int e = 0; e < 3; ++e) {
        const Point2& a = t.v[std::size_t(e)];
        const Point2& b = t.v[std::size_t((e + 1) % 3)];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        const double tx = (b[0] - a[0]) / len, ty = (b[1] - a[1]) / len;
        const double nx = ty, ny = -tx;  // outward for CCW ordering
        const double d = (a[0] - x[0]) * nx + (a[1] - x[1]) * ny;
        if (std::abs(d) < 1e-14) continue;  // contribution vanishes as d -> 0
        const double sm = (a[0] - x[0]) * tx + (a[1] - x[1]) * ty;
        const double sp = (b[0] - x[0]) * tx + (b[1] - x[1]) * ty;
        sum += d * (std::asinh(sp / std::abs(d)) - std::asinh(sm / std::abs(d)));
    }
    return sum;
}

/// Laplace constant-density pair integral by the analytic inner potential
/// and a subdivided outer quadrature; `levels` quarters the outer triangles
/// that many times.
double laplace_pair_oracle(const Triangle2& outer, const Triangle2& inner, int levels) {
    std::vector<Triangle2> tris{outer};
    for (int l = 0; l < levels; ++l) {
        std::vector<Triangle2> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const Point2 m01{0.5 * (t.v[0][0] + t.v[1][0]), 0.5 * (t.v[0][1] + t.v[1][1])};
            const Point2 m12{0.5 * (t.v[1][0] + t.v[2][0]), 0.5 * (t.v[1][1] + t.v[2][1])};
            const Point2 m20{0.5 * (t.v[2][0] + t.v[0][0]), 0.5 * (t.v[2][1] + t.v[0][1])};
            next.push_back({{t.v[0], m01, m20}});
            next.push_back({{m01, t.v[1], m12}});
            next.push_back({{m20, m12, t.v[2]}});
            next.push_back({{m01, m12, m20}});
        }
        tris = std::move(next);
    }
    const auto& rule = triangle_rule(12);
    double sum = 0;
    for (const auto& t : tris) {
        const double two_area = 2.0 * triangle_area(t);
        for (const auto& pt : rule) {
            const double b0 = 1.0 - pt.a1 - pt.a2;
            const Point2 x{b0 * t.v[0][0] + pt.a1 * t.v[1][0] + pt.a2 * t.v[2][0],
                           b0 * t.v[0][1] + pt.a1 * t.v[1][1] + pt.a2 * t.v[2][1]};
            sum += pt.w * two_area * tri_potential(inner, x);
        }
    }
    return sum / (4.0 * std::numbers::pi);
}

/// Independent full-tensor quadrature for non-singular pairs.
MomentTensor tensor_oracle(const Triangle2& t1, const Triangle2& t2, double k, int order) {
    const auto& rule = triangle_rule(order);
    const double jac = 4.0 * triangle_area(t1) * triangle_area(t2);
    MomentTensor mom;
    for (const auto& p : rule) {
        const double ba[3] = {1.0 - p.a1 - p.a2, p.a1, p.a2};
        const Point2 x{ba[0] * t1.v[0][0] + ba[1] * t1.v[1][0] + ba[2] * t1.v[2][0],
                       ba[0] * t1.v[0][1] + ba[1] * t1.v[1][1] + ba[2] * t1.v[2][1]};
        for (const auto& q : rule) {
            const double bb[3] = {1.0 - q.a1 - q.a2, q.a1, q.a2};
            const Point2 y{bb[0] * t2.v[0][0] + bb[1] * t2.v[1][0] + bb[2] * t2.v[2][0],
                           bb[0] * t2.v[0][1] + bb[1] * t2.v[1][1] + bb[2] * t2.v[2][1]};
            const Complex kw = green3d_planar(x, y, k) * (p.w * q.w * jac);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) mom(a, b) += kw * ba[a] * bb[b];
        }
    }
    return mom;
}

}  // namespace

TEST_CASE("gauss-legendre on [0,1]") {
    for (int n : {1, 2, 5, 10, 20}) {
        std::vector<double> x, w;
        gauss_legendre01(n, x, w);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += w[std::size_t(i)] * std::pow(x[std::size_t(i)], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-12));
        }
        for (int i = 0; i < n; ++i) {
            CHECK(x[std::size_t(i)] > 0);
            CHECK(x[std::size_t(i)] < 1);
        }
    }
}

TEST_CASE("triangle rule integrates polynomials") {
    for (int order : {2, 4, 8}) {
        const auto& rule = triangle_rule(order);
        double w_sum = 0, b1_sum = 0, b1b2_sum = 0;
        for (const auto& p : rule) {
            w_sum += p.w;
            b1_sum += p.w * p.a1;
            b1b2_sum += p.w * p.a1 * p.a2;
        }
        CHECK(w_sum == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(b1_sum == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        if (order >= 2) CHECK(b1b2_sum == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
    }
}

TEST_CASE("kernel values") {
    const double k = 3.0;
    const Point3 x{0, 0, 0}, y{0, 0, 2};
    const Complex g = green3d(x, y, k);
    const Complex expected = std::polar(1.0 / (8.0 * std::numbers::pi), 2.0 * k);
    CHECK(std::abs(g - expected) < 1e-15);
    CHECK_THROWS_AS(green3d(x, x, k), std::domain_error);
    CHECK(std::abs(green3d_planar({0.3, 0.4}, {0.0, 0.0}, 0.0) -
                   Complex(1.0 / (2.0 * std::numbers::pi), 0.0)) < 1e-15);
}

TEST_CASE("pair classification") {
    QuadratureConfig cfg;
    CHECK(classify_pair(kRight, kRight, cfg) == PairClass::coincident);
    const Triangle2 edge_mate{{kRight.v[1], kRight.v[0], {-0.5, -0.5}}};
    CHECK(classify_pair(kRight, edge_mate, cfg) == PairClass::common_edge);
    const Triangle2 vert_mate{{kRight.v[2], Point2{2.0, 2.0}, Point2{1.0, 2.5}}};
    CHECK(classify_pair(kRight, vert_mate, cfg) == PairClass::common_vertex);
    CHECK(classify_pair(kRight, shift(kRight, 5.0, 0.0), cfg) == PairClass::regular);
}

TEST_CASE("pair-rule weights sum to the product of simplex volumes") {
    for (PairClass cls : {PairClass::coincident, PairClass::common_edge,
                          PairClass::common_vertex, PairClass::regular})
        for (int order : {3, 5, 7}) {
            double s = 0;
            for (const auto& p : sauter_rule(cls, order)) s += p.w;
            CHECK(s == doctest::Approx(0.25).epsilon(1e-12));
        }
}

TEST_CASE("separated pairs against a high-order tensor rule") {
    QuadratureConfig cfg;
    QuadratureConfig tight;
    tight.regular_order = 12;
    for (double k : {0.0, 4.0}) {
        for (const auto& t2 : {shift(kRight, 3.0, 1.0), shift(kEquilateral, -2.5, 0.5)}) {
            const MomentTensor ref = tensor_oracle(kRight, t2, k, 20);
            const MomentTensor got = pair_moments(kRight, t2, k, cfg);
            const MomentTensor fine = pair_moments(kRight, t2, k, tight);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    CHECK(std::abs(got(a, b) - ref(a, b)) < 1e-4 * std::abs(ref.sum()));
                    CHECK(std::abs(fine(a, b) - ref(a, b)) < 1e-12 * std::abs(ref.sum()));
                }
        }
    }
}

TEST_CASE("near pairs against a high-order tensor rule") {
    QuadratureConfig cfg;
    const Triangle2 t2 = shift(kEquilateral, 1.2, 0.1);  // close but not touching
    const MomentTensor ref = tensor_oracle(kEquilateral, t2, 2.0, 24);
    const MomentTensor got = pair_moments(kEquilateral, t2, 2.0, cfg);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(got(a, b) - ref(a, b)) < 1e-5 * std::abs(ref.sum()));
    QuadratureConfig tight;
    tight.singular_order = 12;
    const MomentTensor fine = pair_moments(kEquilateral, t2, 2.0, tight);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(fine(a, b) - ref(a, b)) < 1e-8 * std::abs(ref.sum()));
}

TEST_CASE("coincident laplace integral against the analytic-potential oracle") {
    QuadratureConfig cfg;
    cfg.singular_order = 8;
    for (const Triangle2& t : {kEquilateral, kRight}) {
        const Complex got = pair_moments(t, t, 0.0, cfg).sum();
        CHECK(std::abs(got.imag()) < 1e-15);
        const double ref = laplace_pair_oracle(t, t, 4);
        CHECK(got.real() == doctest::Approx(ref).epsilon(5e-6));
    }
}

TEST_CASE("edge and vertex adjacent laplace integrals against the oracle") {
    QuadratureConfig cfg;
    cfg.singular_order = 8;
    const Triangle2 edge_mate{{kEquilateral.v[1], kEquilateral.v[0],
                               Point2{0.5, -std::sqrt(3.0) / 2.0}}};
    const Complex edge_got = pair_moments(kEquilateral, edge_mate, 0.0, cfg).sum();
    CHECK(edge_got.real() ==
          doctest::Approx(laplace_pair_oracle(kEquilateral, edge_mate, 4)).epsilon(5e-6));

    const Triangle2 vert_mate{{kEquilateral.v[1], Point2{2.0, 0.3}, Point2{1.7, 1.0}}};
    const Complex vert_got = pair_moments(kEquilateral, vert_mate, 0.0, cfg).sum();
    CHECK(vert_got.real() ==
          doctest::Approx(laplace_pair_oracle(kEquilateral, vert_mate, 4)).epsilon(5e-6));
}

TEST_CASE("kernel symmetry of singular moments") {
    QuadratureConfig cfg;
    cfg.singular_order = 10;
    const double k = 3.0;
    // well-shaped mates: the transforms converge slowly on thin triangles
    const Triangle2 edge_mate{{kRight.v[1], kRight.v[0], {0.7, -0.8}}};
    const Triangle2 vert_mate{{kRight.v[2], Point2{2.0, 2.0}, Point2{1.0, 2.5}}};
    for (const auto& t2 : {edge_mate, vert_mate}) {
        const MomentTensor fwd = pair_moments(kRight, t2, k, cfg);
        const MomentTensor rev = pair_moments(t2, kRight, k, cfg);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                CHECK(std::abs(fwd(a, b) - rev(b, a)) < 1e-9 * std::abs(fwd.sum()));
    }
    const MomentTensor self = pair_moments(kRight, kRight, k, cfg);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(self(a, b) - self(b, a)) < 1e-9 * std::abs(self.sum()));
}

TEST_CASE("singular rules converge with order") {
    QuadratureConfig lo, hi;
    lo.singular_order = 4;
    hi.singular_order = 10;
    const Complex coarse = pair_moments(kRight, kRight, 2.0, lo).sum();
    const Complex fine = pair_moments(kRight, kRight, 2.0, hi).sum();
    CHECK(std::abs(coarse - fine) < 1e-4 * std::abs(fine));
}

TEST_CASE("subdivision consistency of the full moment tensor") {
    // integrating over the four children of the trial triangle (with the
    // parent's barycentric weights) must reproduce the parent integral
    QuadratureConfig cfg;
    cfg.singular_order = 9;
    const Triangle2& t = kEquilateral;
    const Point2 m01{0.5 * (t.v[0][0] + t.v[1][0]), 0.5 * (t.v[0][1] + t.v[1][1])};
    const Point2 m12{0.5 * (t.v[1][0] + t.v[2][0]), 0.5 * (t.v[1][1] + t.v[2][1])};
    const Point2 m20{0.5 * (t.v[2][0] + t.v[0][0]), 0.5 * (t.v[2][1] + t.v[0][1])};
    const Triangle2 kids[4] = {{{t.v[0], m01, m20}},
                               {{m01, t.v[1], m12}},
                               {{m20, m12, t.v[2]}},
                               {{m01, m12, m20}}};
    // parent barycentrics of each child's vertices
    const double pb[4][3][3] = {
        {{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}},
        {{0.5, 0.5, 0}, {0, 1, 0}, {0, 0.5, 0.5}},
        {{0.5, 0, 0.5}, {0, 0.5, 0.5}, {0, 0, 1}},
        {{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}};

    const Triangle2 outer = shift(kEquilateral, 1.0, 0.0);  // shares the vertex (1, 0)
    const MomentTensor whole = pair_moments(outer, t, 2.0, cfg);
    MomentTensor split;
    for (int c = 0; c < 4; ++c) {
        const MomentTensor part = pair_moments(outer, kids[c], 2.0, cfg);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int lb = 0; lb < 3; ++lb)
                    split(a, b) += part(a, lb) * pb[c][lb][b];
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(whole(a, b) - split(a, b)) < 1e-7 * std::abs(whole.sum()));
}

TEST_CASE("degenerate pairs are rejected") {
    QuadratureConfig cfg;
    const Triangle2 flat{{{{0, 0}, {1, 1}, {2, 2}}}};
    CHECK_THROWS_AS(pair_moments(flat, kRight, 1.0, cfg), std::invalid_argument);
    QuadratureConfig bad;
    bad.regular_order = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
