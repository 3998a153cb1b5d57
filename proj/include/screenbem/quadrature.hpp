#pragma once

#include <array>
#include <complex>
#include <vector>

namespace screenbem {

using Complex = std::complex<double>;
using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;

struct QuadratureConfig {
    int regular_order = 4;    // tensor Gauss order for well-separated pairs
    int singular_order = 6;   // order for coincident / edge / vertex pairs
    double separation_ratio = 2.0;  // centroid distance / diameter threshold

    void validate() const;
};

/// Helmholtz free-space kernel e^{ikr}/(4 pi r), r = |x-y|.
/// Throws std::domain_error for r = 0.
Complex green3d(const Point3& x, const Point3& y, double k);

/// In-plane (z = 0) kernel evaluation.
Complex green3d_planar(const Point2& x, const Point2& y, double k);

struct Triangle2 {
    std::array<Point2, 3> v;
};

double triangle_area(const Triangle2& t);

/// Galerkin kernel moments of a triangle pair:
///   M(a, b) = int_T int_T' Phi(x, y) bary_a(x) bary_b(y) ds(y) ds(x),
/// with bary_a the barycentric linear functions of T and bary_b those of T'.
/// The constant-density integral is sum().
struct MomentTensor {
    std::array<Complex, 9> m{};

    Complex& operator()(int a, int b) { return m[std::size_t(a) * 3 + b]; }
    const Complex& operator()(int a, int b) const { return m[std::size_t(a) * 3 + b]; }
    Complex sum() const {
        Complex s = 0;
        for (const auto& x : m) s += x;
        return s;
    }
};

enum class PairClass { coincident, common_edge, common_vertex, regular };

/// Adjacency class of a coplanar triangle pair (vertices matched within a
/// relative tolerance; "regular" means separated beyond cfg.separation_ratio).
PairClass classify_pair(const Triangle2& t1, const Triangle2& t2,
                        const QuadratureConfig& cfg);

/// Kernel moments for a coplanar triangle pair. Singular classes use the
/// Sauter-Schwab relative-coordinate transforms; separated pairs use
/// tensorized Gauss. Throws std::invalid_argument for degenerate triangles.
MomentTensor pair_moments(const Triangle2& t1, const Triangle2& t2, double k,
                          const QuadratureConfig& cfg);

/// One point of a tensorized triangle-pair rule: barycentric coordinates
/// (1-a1-a2, a1, a2) on the first triangle, (1-b1-b2, b1, b2) on the second.
/// Integrals are sum w * f times (2 A1)(2 A2).
struct PairRulePoint {
    double a1, a2, b1, b2, w;
};

/// Cached Sauter-Schwab rule for an adjacency class (common vertices ordered
/// first on both triangles) at the given 1D Gauss order.
const std::vector<PairRulePoint>& sauter_rule(PairClass cls, int order);

/// Gauss-Legendre rule on [0,1].
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w);

/// Single-triangle rule (collapsed tensor Gauss): points in barycentric
/// coordinates (1-a1-a2, a1, a2), weights summing to 1/2. Integrals are
/// 2A * sum w * f.
struct TriRulePoint {
    double a1, a2, w;
};
const std::vector<TriRulePoint>& triangle_rule(int order);

}  // namespace screenbem
