#include "screenbem/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace screenbem {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr double kSqrt3Half = 0.8660254037844386467637231707529362;

LatticePoint operator+(LatticePoint p, LatticePoint q) { return {p.a + q.a, p.b + q.b}; }
LatticePoint operator-(LatticePoint p, LatticePoint q) { return {p.a - q.a, p.b - q.b}; }
LatticePoint scale(LatticePoint p, i64 s) { return {p.a * s, p.b * s}; }

i128 cross(LatticePoint u, LatticePoint v) {
    return i128(u.a) * v.b - i128(u.b) * v.a;
}
i128 dot(LatticePoint u, LatticePoint v) {
    return i128(u.a) * v.a + i128(u.b) * v.b;
}

// Rotation by -60 degrees in triangular-lattice coordinates
// (u -> u - v, v -> u, i.e. (a,b) -> (a+b, -a)).
LatticePoint rot_m60(LatticePoint p) { return {p.a + p.b, -p.a}; }

// Rotation by +90 degrees in square-lattice coordinates.
LatticePoint rot_l90(LatticePoint p) { return {-p.b, p.a}; }

bool is_unit_tri(LatticePoint e) {
    // the six unit vectors of the triangular lattice
    return (e.a == 1 && e.b == 0) || (e.a == 0 && e.b == 1) || (e.a == -1 && e.b == 1) ||
           (e.a == -1 && e.b == 0) || (e.a == 0 && e.b == -1) || (e.a == 1 && e.b == -1);
}

bool is_unit_sq(LatticePoint e) {
    return (std::abs(e.a) + std::abs(e.b)) == 1;
}

// exact test: is Q on the closed segment [P0,P1]?
bool on_segment(LatticePoint q, LatticePoint p0, LatticePoint p1) {
    if (cross(p1 - p0, q - p0) != 0) return false;
    return dot(q - p0, q - p1) <= 0;
}

// do the closed segments [a,b] and [c,d] intersect at all?
bool segments_touch(LatticePoint a, LatticePoint b, LatticePoint c, LatticePoint d) {
    const i128 d1 = cross(d - c, a - c);
    const i128 d2 = cross(d - c, b - c);
    const i128 d3 = cross(b - a, c - a);
    const i128 d4 = cross(b - a, d - a);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(a, c, d)) return true;
    if (d2 == 0 && on_segment(b, c, d)) return true;
    if (d3 == 0 && on_segment(c, a, b)) return true;
    if (d4 == 0 && on_segment(d, a, b)) return true;
    return false;
}

}  // namespace

std::array<double, 2> PrefractalPolygon::vertex(std::size_t i) const {
    if (!lattice_conforming) return vertices_f[i];
    const double p = pitch();
    const auto& v = vertices[i];
    if (lattice == LatticeKind::triangular)
        return {(double(v.a) + 0.5 * double(v.b)) * p, double(v.b) * kSqrt3Half * p};
    return {double(v.a) * p, double(v.b) * p};
}

PrefractalPolygon koch_prefractal(double beta, int j) {
    if (!(beta > 0.0 && beta < std::numbers::pi / 2))
        throw std::invalid_argument("koch_prefractal: beta must lie in (0, pi/2)");
    if (j < 0) throw std::invalid_argument("koch_prefractal: level must be nonnegative");

    PrefractalPolygon poly;
    poly.family = Family::koch;
    poly.beta = beta;
    poly.level = j;
    poly.lattice = LatticeKind::triangular;

    const bool exact = std::abs(beta - std::numbers::pi / 6) < 1e-12;
    if (exact) {
        poly.vertices = {{0, 0}, {1, 0}, {0, 1}};
        poly.pitch_den = 1;
        for (int it = 0; it < j; ++it) {
            poly.pitch_den *= 3;
            std::vector<LatticePoint> next;
            next.reserve(poly.vertices.size() * 4);
            const std::size_t n = poly.vertices.size();
            for (std::size_t i = 0; i < n; ++i) {
                const LatticePoint p = scale(poly.vertices[i], 3);
                const LatticePoint q = scale(poly.vertices[(i + 1) % n], 3);
                const LatticePoint d = q - p;
                const LatticePoint e = {d.a / 3, d.b / 3};
                if (!is_unit_tri(e) || d.a != 3 * e.a || d.b != 3 * e.b)
                    throw std::logic_error("koch_prefractal: edge left the lattice");
                next.push_back(p);
                next.push_back(p + e);
                next.push_back(p + e + rot_m60(e));  // apex, outward of the CCW boundary
                next.push_back(p + scale(e, 2));
            }
            poly.vertices = std::move(next);
        }
        return poly;
    }

    // General apex angle: floating-point construction, not meshable.
    poly.lattice_conforming = false;
    poly.vertices_f = {{0.0, 0.0}, {1.0, 0.0}, {0.5, kSqrt3Half}};
    const double contraction = 1.0 / (2.0 * (1.0 + std::sin(beta)));
    double leg = 1.0;
    for (int it = 1; it <= j; ++it) {
        leg *= contraction;
        const double base = 2.0 * leg * std::sin(beta);
        const double height = leg * std::cos(beta);
        std::vector<std::array<double, 2>> next;
        next.reserve(poly.vertices_f.size() * 4);
        const std::size_t n = poly.vertices_f.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = poly.vertices_f[i];
            const auto q = poly.vertices_f[(i + 1) % n];
            const double dx = q[0] - p[0], dy = q[1] - p[1];
            const double len = std::hypot(dx, dy);
            const double ex = dx / len, ey = dy / len;
            const double mx = 0.5 * (p[0] + q[0]), my = 0.5 * (p[1] + q[1]);
            // outward normal = right of the direction of travel (interior on the left)
            const double nx = ey, ny = -ex;
            next.push_back(p);
            next.push_back({mx - 0.5 * base * ex, my - 0.5 * base * ey});
            next.push_back({mx + height * nx, my + height * ny});
            next.push_back({mx + 0.5 * base * ex, my + 0.5 * base * ey});
        }
        poly.vertices_f = std::move(next);
    }
    return poly;
}

PrefractalPolygon square_prefractal(int j) {
    if (j < 0) throw std::invalid_argument("square_prefractal: level must be nonnegative");

    PrefractalPolygon poly;
    poly.family = Family::square;
    poly.level = j;
    poly.lattice = LatticeKind::square;
    poly.pitch_den = 1;
    poly.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

    for (int it = 0; it < j; ++it) {
        poly.pitch_den *= 4;
        std::vector<LatticePoint> next;
        next.reserve(poly.vertices.size() * 8);
        const std::size_t n = poly.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const LatticePoint p = scale(poly.vertices[i], 4);
            const LatticePoint q = scale(poly.vertices[(i + 1) % n], 4);
            const LatticePoint d = q - p;
            const LatticePoint e = {d.a / 4, d.b / 4};
            if (!is_unit_sq(e) || d.a != 4 * e.a || d.b != 4 * e.b)
                throw std::logic_error("square_prefractal: edge left the lattice");
            // 8-segment motif: square added on the left of the direction of
            // travel over the second quarter, removed on the right over the
            // third; the two exchanged squares have equal area.
            const LatticePoint nl = rot_l90(e);
            next.push_back(p);
            next.push_back(p + e);
            next.push_back(p + e + nl);
            next.push_back(p + scale(e, 2) + nl);
            next.push_back(p + scale(e, 2));
            next.push_back(p + scale(e, 2) - nl);
            next.push_back(p + scale(e, 3) - nl);
            next.push_back(p + scale(e, 3));
        }
        poly.vertices = std::move(next);
    }
    return poly;
}

std::int64_t shoelace2_lattice(const PrefractalPolygon& poly) {
    if (!poly.lattice_conforming)
        throw std::invalid_argument("shoelace2_lattice: polygon is not lattice-conforming");
    i128 s = 0;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        s += cross(poly.vertices[i], poly.vertices[(i + 1) % n]);
    return static_cast<i64>(s);
}

double area(const PrefractalPolygon& poly) {
    if (poly.lattice_conforming) {
        const double s2 = static_cast<double>(shoelace2_lattice(poly));
        const double cell = (poly.lattice == LatticeKind::triangular) ? kSqrt3Half : 1.0;
        const double den = static_cast<double>(poly.pitch_den);
        return 0.5 * s2 * cell / (den * den);
    }
    double s = 0.0;
    const std::size_t n = poly.vertices_f.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poly.vertices_f[i];
        const auto& q = poly.vertices_f[(i + 1) % n];
        s += p[0] * q[1] - p[1] * q[0];
    }
    return 0.5 * s;
}

int locate_point(const PrefractalPolygon& poly, i64 pa, i64 pb, i64 s) {
    if (!poly.lattice_conforming)
        throw std::invalid_argument("locate_point: polygon is not lattice-conforming");
    const LatticePoint q{pa, pb};
    const std::size_t n = poly.vertices.size();
    long wn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const LatticePoint v0 = scale(poly.vertices[i], s);
        const LatticePoint v1 = scale(poly.vertices[(i + 1) % n], s);
        if (on_segment(q, v0, v1)) return 0;
        if (v0.b <= q.b && q.b < v1.b && cross(v1 - v0, q - v0) > 0) ++wn;
        if (v1.b <= q.b && q.b < v0.b && cross(v1 - v0, q - v0) < 0) --wn;
    }
    return wn != 0 ? 1 : -1;
}

bool polygon_is_simple(const PrefractalPolygon& poly) {
    if (!poly.lattice_conforming)
        throw std::invalid_argument("polygon_is_simple: polygon is not lattice-conforming");
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const LatticePoint a = v[i], b = v[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const LatticePoint c = v[j], d = v[(j + 1) % n];
            const bool adj_fwd = (j == i + 1);
            const bool adj_wrap = (i == 0 && j == n - 1);
            if (adj_fwd || adj_wrap) {
                // edges sharing one endpoint may only meet there
                const LatticePoint shared = adj_fwd ? b : a;
                const LatticePoint pa = adj_fwd ? a : b;
                const LatticePoint pd = adj_fwd ? d : c;
                if (cross(pa - shared, pd - shared) == 0 &&
                    dot(pa - shared, pd - shared) > 0)
                    return false;
                continue;
            }
            if (segments_touch(a, b, c, d)) return false;
        }
    }
    return true;
}

void export_polygon_csv(const PrefractalPolygon& poly, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_polygon_csv: cannot open " + path);
    out.precision(17);
    out << "x,y\n";
    for (std::size_t i = 0; i < poly.edge_count(); ++i) {
        const auto p = poly.vertex(i);
        out << p[0] << "," << p[1] << "\n";
    }
    std::ofstream meta(path + ".meta");
    meta.precision(17);
    meta << "family=" << (poly.family == Family::koch ? "koch" : "square") << "\n";
    if (poly.family == Family::koch) meta << "beta=" << poly.beta << "\n";
    meta << "level=" << poly.level << "\n";
    meta << "lattice_conforming=" << (poly.lattice_conforming ? 1 : 0) << "\n";
    meta << "pitch=1/" << poly.pitch_den << "\n";
}

}  // namespace screenbem
