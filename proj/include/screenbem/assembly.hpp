#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "screenbem/mesh.hpp"
#include "screenbem/quadrature.hpp"

namespace screenbem {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Impedance parameters lambda+/lambda- and the derived coefficients of the
/// two-by-two operator system. Constant values drive the fast (translation
/// invariant) path; per-active-triangle values are supported on the dense
/// path only. Per-element arrays follow the screen P0 ordering (active up
/// triangles first, then active down triangles).
struct ImpedanceParams {
    Complex lambda_plus{0.0, 0.0};
    Complex lambda_minus{0.0, 0.0};
    std::vector<Complex> lambda_plus_per_elem;   // empty = constant
    std::vector<Complex> lambda_minus_per_elem;

    bool per_element() const { return !lambda_plus_per_elem.empty(); }
    void validate() const;  // Im >= 0 and |lambda+ + lambda-| bounded away from 0

    Complex c0() const { return lambda_plus * lambda_minus / (lambda_plus + lambda_minus); }
    Complex c1() const { return 0.5 * (lambda_plus - lambda_minus) / (lambda_plus + lambda_minus); }
    Complex c2() const { return 0.5 * (lambda_plus - lambda_minus); }
    Complex cS() const { return lambda_plus + lambda_minus; }
};

/// Plane wave u^i(x) = e^{ik d.x} with |d| = 1; its screen trace and normal
/// derivative (normal +e3) are e^{ik(d1 x1 + d2 x2)} and ik d3 times that.
struct IncidentWave {
    double k = 1.0;
    Point3 d{0.0, 0.0, -1.0};

    void validate() const;
    Complex trace(const Point2& x) const;
};

/// One BTTB generating array: Galerkin entries indexed by the lattice
/// coordinate offset (trial coordinate minus test coordinate).
struct GenArray {
    int lo_a = 0, hi_a = -1, lo_b = 0, hi_b = -1;
    std::vector<Complex> v;

    int na() const { return hi_a - lo_a + 1; }
    int nb() const { return hi_b - lo_b + 1; }
    bool contains(int da, int db) const {
        return da >= lo_a && da <= hi_a && db >= lo_b && db <= hi_b;
    }
    Complex at(int da, int db) const {
        return contains(da, db) ? v[std::size_t(da - lo_a) * nb() + (db - lo_b)] : Complex(0);
    }
    Complex& ref(int da, int db) { return v[std::size_t(da - lo_a) * nb() + (db - lo_b)]; }
    void resize(int la, int ha, int lb, int hb) {
        lo_a = la; hi_a = ha; lo_b = lb; hi_b = hb;
        v.assign(std::size_t(na()) * nb(), Complex(0));
    }
};

enum class BasisKind : int { node = 0, up = 1, down = 2 };

/// Lattice coordinate base of a basis family in the parallelogram indexing
/// (interior nodes start at (1,1), triangles at (0,0)).
inline int kind_base(BasisKind k) { return k == BasisKind::node ? 1 : 0; }
inline int kind_dim_x(BasisKind k, int Nx) { return k == BasisKind::node ? Nx - 1 : Nx; }
inline int kind_dim_y(BasisKind k, int Ny) { return k == BasisKind::node ? Ny - 1 : Ny; }

/// The nine BTTB generating arrays of the parallelogram Galerkin matrix,
/// plus everything needed to apply or reconstruct it.
struct OperatorBlocks {
    LatticeMesh mesh;
    DofMap dofs;
    double k = 0.0;
    ImpedanceParams lambda;
    QuadratureConfig quad;
    GenArray block[3][3];  // [row kind][col kind]

    const GenArray& gen(BasisKind row, BasisKind col) const {
        return block[int(row)][int(col)];
    }
};

/// Computes the nine generating arrays over the full interaction range by
/// evaluating one representative Galerkin entry per lattice offset.
/// Requires constant impedance (translation invariance); per-element lambda
/// is a hard error directing callers to assemble_dense.
OperatorBlocks assemble_generating_blocks(const LatticeMesh& mesh, const DofMap& dofs,
                                          double k, const ImpedanceParams& lambda,
                                          const QuadratureConfig& cfg, int threads = 0);

/// Full Galerkin matrix on the screen DOFs, entry by entry; the oracle for
/// the fast path. Throws std::length_error when the screen dimension exceeds
/// max_dofs.
Matrix assemble_dense(const LatticeMesh& mesh, const DofMap& dofs, double k,
                      const ImpedanceParams& lambda, const QuadratureConfig& cfg,
                      std::size_t max_dofs = 20000, int threads = 0);

/// Single-layer Galerkin block on active P0 DOFs (screen ordering).
Matrix dense_single_layer(const LatticeMesh& mesh, const DofMap& dofs, double k,
                          const QuadratureConfig& cfg, int threads = 0);

/// Hypersingular Galerkin block on active P1 DOFs, assembled in the
/// integration-by-parts form with per-triangle constant surface curls.
Matrix dense_hypersingular(const LatticeMesh& mesh, const DofMap& dofs, double k,
                           const QuadratureConfig& cfg, int threads = 0);

/// Right-hand side of the two-row system for plane-wave incidence.
Vector assemble_rhs(const LatticeMesh& mesh, const DofMap& dofs, const IncidentWave& inc,
                    const ImpedanceParams& lambda, const QuadratureConfig& cfg);

/// Reconstructs the dense parallelogram matrix from generating arrays
/// (testing utility; size (N_tilde x N_tilde)).
Matrix reconstruct_para_dense(const OperatorBlocks& op);

/// In-plane gradient of the barycentric function of local vertex c.
Point2 barycentric_gradient(const Triangle2& t, int c);

}  // namespace screenbem
