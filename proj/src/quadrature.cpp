#include "screenbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace screenbem {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);

Complex kernel_r(double r, double k) {
    return std::polar(kInv4Pi / r, k * r);
}

double dist2(const Point2& x, const Point2& y) {
    const double dx = x[0] - y[0], dy = x[1] - y[1];
    return dx * dx + dy * dy;
}

double diameter(const Triangle2& t) {
    return std::sqrt(std::max({dist2(t.v[0], t.v[1]), dist2(t.v[1], t.v[2]),
                               dist2(t.v[2], t.v[0])}));
}

Point2 centroid(const Triangle2& t) {
    return {(t.v[0][0] + t.v[1][0] + t.v[2][0]) / 3.0,
            (t.v[0][1] + t.v[1][1] + t.v[2][1]) / 3.0};
}

// Match vertices of the two triangles; returns the number of matches and
// permutations placing the matched vertices first (identical positions on
// both triangles), as the Sauter-Schwab transforms require.
int match_vertices(const Triangle2& t1, const Triangle2& t2, int perm1[3], int perm2[3]) {
    const double tol = 1e-12 * std::max(diameter(t1), diameter(t2));
    const double tol2 = tol * tol;
    int n = 0;
    bool used2[3] = {false, false, false};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!used2[j] && dist2(t1.v[std::size_t(i)], t2.v[std::size_t(j)]) <= tol2) {
                perm1[n] = i;
                perm2[n] = j;
                used2[j] = true;
                ++n;
                break;
            }
    for (int side = 0; side < 2; ++side) {
        int* perm = side == 0 ? perm1 : perm2;
        int filled = n;
        for (int i = 0; i < 3 && filled < 3; ++i) {
            bool present = false;
            for (int j = 0; j < filled; ++j)
                if (perm[j] == i) present = true;
            if (!present) perm[filled++] = i;
        }
    }
    return n;
}

}  // namespace

void QuadratureConfig::validate() const {
    if (regular_order < 1 || singular_order < 1)
        throw std::invalid_argument("QuadratureConfig: orders must be >= 1");
    if (!(separation_ratio > 0))
        throw std::invalid_argument("QuadratureConfig: separation_ratio must be positive");
}

Complex green3d(const Point3& x, const Point3& y, double k) {
    const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r == 0.0) throw std::domain_error("green3d: singular evaluation at r = 0");
    return kernel_r(r, k);
}

Complex green3d_planar(const Point2& x, const Point2& y, double k) {
    const double r = std::sqrt(dist2(x, y));
    if (r == 0.0) throw std::domain_error("green3d: singular evaluation at r = 0");
    return kernel_r(r, k);
}

double triangle_area(const Triangle2& t) {
    const double ux = t.v[1][0] - t.v[0][0], uy = t.v[1][1] - t.v[0][1];
    const double vx = t.v[2][0] - t.v[0][0], vy = t.v[2][1] - t.v[0][1];
    return 0.5 * std::abs(ux * vy - uy * vx);
}

void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(std::size_t(n));
    w.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev initial guess
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[std::size_t(n - 1 - i)] = 0.5 * (1.0 + t);
        w[std::size_t(n - 1 - i)] = 1.0 / ((1.0 - t * t) * pp * pp);
    }
}

const std::vector<TriRulePoint>& triangle_rule(int order) {
    static std::mutex mtx;
    static std::map<int, std::vector<TriRulePoint>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    std::vector<double> x, w;
    gauss_legendre01(order, x, w);
    std::vector<TriRulePoint> rule;
    rule.reserve(std::size_t(order) * order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            // Duffy collapse of [0,1]^2 onto the unit triangle
            const double xi = x[std::size_t(i)], eta = x[std::size_t(j)];
            rule.push_back({xi * (1.0 - eta), xi * eta, w[std::size_t(i)] * w[std::size_t(j)] * xi});
        }
    return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

// Sauter-Schwab regularising transforms for the four adjacency classes.
// Each case maps [0,1]^4 Gauss points to pairs of local coordinates on the
// "usual" unit triangle, with the Jacobi factors folded into the weights.
std::vector<PairRulePoint> build_sauter(PairClass cls, int order) {
    std::vector<double> x, w;
    gauss_legendre01(order, x, w);
    std::vector<PairRulePoint> rule;

    const auto emit = [&rule](double u1, double u2, double v1, double v2, double lw) {
        // (u1, u2) are simplex coordinates with u2 <= u1; shift to the usual
        // unit-triangle coordinates (a1, a2) = (u1 - u2, u2)
        rule.push_back({u1 - u2, u2, v1 - v2, v2, lw});
    };

    for (int ixi = 0; ixi < order; ++ixi)
        for (int i3 = 0; i3 < order; ++i3)
            for (int i2 = 0; i2 < order; ++i2)
                for (int i1 = 0; i1 < order; ++i1) {
                    const double xi = x[std::size_t(ixi)];
                    const double e3 = x[std::size_t(i3)];
                    const double e2 = x[std::size_t(i2)];
                    const double e1 = x[std::size_t(i1)];
                    const double wt = w[std::size_t(ixi)] * w[std::size_t(i3)] *
                                      w[std::size_t(i2)] * w[std::size_t(i1)];
                    const double xi3 = xi * xi * xi;

                    switch (cls) {
                        case PairClass::coincident: {
                            const double lw = wt * xi3 * e1 * e1 * e2;
                            emit(xi, xi * (1 - e1 + e1 * e2),
                                 xi * (1 - e1 * e2 * e3), xi * (1 - e1), lw);
                            emit(xi * (1 - e1 * e2 * e3), xi * (1 - e1),
                                 xi, xi * (1 - e1 + e1 * e2), lw);
                            emit(xi, xi * e1 * (1 - e2 + e2 * e3),
                                 xi * (1 - e1 * e2), xi * e1 * (1 - e2), lw);
                            emit(xi * (1 - e1 * e2), xi * e1 * (1 - e2),
                                 xi, xi * e1 * (1 - e2 + e2 * e3), lw);
                            emit(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3),
                                 xi, xi * e1 * (1 - e2), lw);
                            emit(xi, xi * e1 * (1 - e2),
                                 xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), lw);
                            break;
                        }
                        case PairClass::common_edge: {
                            const double lw = wt * xi3 * e1 * e1 * e2;
                            emit(xi, xi * e1 * e3,
                                 xi * (1 - e1 * e2), xi * e1 * (1 - e2),
                                 wt * xi3 * e1 * e1);
                            emit(xi, xi * e1,
                                 xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), lw);
                            emit(xi * (1 - e1 * e2), xi * e1 * (1 - e2),
                                 xi, xi * e1 * e2 * e3, lw);
                            emit(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3),
                                 xi, xi * e1, lw);
                            emit(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3),
                                 xi, xi * e1 * e2, lw);
                            break;
                        }
                        case PairClass::common_vertex: {
                            const double lw = wt * xi3 * e2;
                            emit(xi, xi * e1, xi * e2, xi * e2 * e3, lw);
                            emit(xi * e2, xi * e2 * e3, xi, xi * e1, lw);
                            break;
                        }
                        case PairClass::regular: {
                            emit(xi, xi * e1, e2, e2 * e3, wt * xi * e2);
                            break;
                        }
                    }
                }
    return rule;
}

}  // namespace

const std::vector<PairRulePoint>& sauter_rule(PairClass cls, int order) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::vector<PairRulePoint>> cache;
    const auto key = std::make_pair(int(cls), order);
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, build_sauter(cls, order)).first->second;
}

PairClass classify_pair(const Triangle2& t1, const Triangle2& t2,
                        const QuadratureConfig& cfg) {
    int perm1[3], perm2[3];
    switch (match_vertices(t1, t2, perm1, perm2)) {
        case 3: return PairClass::coincident;
        case 2: return PairClass::common_edge;
        case 1: return PairClass::common_vertex;
        default: break;
    }
    return PairClass::regular;
}

MomentTensor pair_moments(const Triangle2& t1, const Triangle2& t2, double k,
                          const QuadratureConfig& cfg) {
    cfg.validate();
    const double a1 = triangle_area(t1), a2 = triangle_area(t2);
    if (a1 == 0.0 || a2 == 0.0)
        throw std::invalid_argument("pair_moments: degenerate triangle");

    int perm1[3], perm2[3];
    const int shared = match_vertices(t1, t2, perm1, perm2);
    PairClass cls = PairClass::regular;
    int order = cfg.regular_order;
    switch (shared) {
        case 3: cls = PairClass::coincident; order = cfg.singular_order; break;
        case 2: cls = PairClass::common_edge; order = cfg.singular_order; break;
        case 1: cls = PairClass::common_vertex; order = cfg.singular_order; break;
        default: {
            // touching nothing: separated pairs take the cheap rule, near
            // pairs the high-order one
            const double d = std::sqrt(dist2(centroid(t1), centroid(t2)));
            const double diam = std::max(diameter(t1), diameter(t2));
            order = (d >= cfg.separation_ratio * diam) ? cfg.regular_order
                                                       : cfg.singular_order;
            break;
        }
    }

    const auto& rule = sauter_rule(cls, order);
    const double jac = 4.0 * a1 * a2;

    MomentTensor mom;
    for (const auto& pt : rule) {
        const double ba[3] = {1.0 - pt.a1 - pt.a2, pt.a1, pt.a2};
        const double bb[3] = {1.0 - pt.b1 - pt.b2, pt.b1, pt.b2};
        Point2 xp{0, 0}, yp{0, 0};
        for (int c = 0; c < 3; ++c) {
            xp[0] += ba[c] * t1.v[std::size_t(perm1[c])][0];
            xp[1] += ba[c] * t1.v[std::size_t(perm1[c])][1];
            yp[0] += bb[c] * t2.v[std::size_t(perm2[c])][0];
            yp[1] += bb[c] * t2.v[std::size_t(perm2[c])][1];
        }
        const Complex kw = green3d_planar(xp, yp, k) * (pt.w * jac);
        for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d)
                mom(perm1[c], perm2[d]) += kw * (ba[c] * bb[d]);
    }
    return mom;
}

}  // namespace screenbem
