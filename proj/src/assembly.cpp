#include "screenbem/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "screenbem/parallel.hpp"

namespace screenbem {

namespace {

struct SupportCell {
    CellKind kind;
    int da, db;  // cell coordinate relative to the node
    int local;   // local vertex index of the node within the cell
};

// The six triangles incident to an interior lattice node.
constexpr SupportCell kNodeSupport[6] = {
    {CellKind::up, 0, 0, 0},    {CellKind::up, -1, 0, 1},   {CellKind::up, 0, -1, 2},
    {CellKind::down, -1, 0, 0}, {CellKind::down, 0, -1, 1}, {CellKind::down, -1, -1, 2},
};

int cell_index(CellKind k) { return k == CellKind::up ? 0 : 1; }

// Moments for the cell pair (kx at the lattice origin, ky at offset (da, db)).
// An offset and its transpose describe the same geometric pair, so evaluate
// only the canonical orientation and transpose the result for the other one;
// otherwise the near-pair order selection could round differently for the two
// and the static operators would lose their symmetry.
MomentTensor lattice_pair_moments(const LatticeMesh& mesh, CellKind kx, CellKind ky,
                                  int da, int db, double k, const QuadratureConfig& cfg) {
    const auto fwd = std::make_tuple(cell_index(kx), cell_index(ky), da, db);
    const auto rev = std::make_tuple(cell_index(ky), cell_index(kx), -da, -db);
    if (rev < fwd) {
        const Triangle2 t1{mesh.triangle(ky, 0, 0)};
        const Triangle2 t2{mesh.triangle(kx, -da, -db)};
        const MomentTensor swapped = pair_moments(t1, t2, k, cfg);
        MomentTensor mom;
        for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d) mom(c, d) = swapped(d, c);
        return mom;
    }
    const Triangle2 t1{mesh.triangle(kx, 0, 0)};
    const Triangle2 t2{mesh.triangle(ky, da, db)};
    return pair_moments(t1, t2, k, cfg);
}

// Moment tensors for every triangle-pair lattice offset, per kind pair.
struct MomentTable {
    int Ra = 0, Rb = 0;  // offsets span [-Ra, Ra] x [-Rb, Rb]
    std::vector<MomentTensor> t[2][2];

    const MomentTensor& at(CellKind kx, CellKind ky, int da, int db) const {
        return t[cell_index(kx)][cell_index(ky)]
                [std::size_t(da + Ra) * (2 * Rb + 1) + (db + Rb)];
    }
};

MomentTable build_moment_table(const LatticeMesh& mesh, double k,
                               const QuadratureConfig& cfg, int threads) {
    MomentTable table;
    table.Ra = mesh.Nx - 1;
    table.Rb = mesh.Ny - 1;
    const std::size_t na = 2 * std::size_t(table.Ra) + 1;
    const std::size_t nb = 2 * std::size_t(table.Rb) + 1;
    for (auto& row : table.t)
        for (auto& cell : row) cell.resize(na * nb);

    // one row of offsets per work item, for all four kind pairs
    parallel_for(4 * na, threads, [&](std::size_t item) {
        const int pair = int(item / na);
        const int da = int(item % na) - table.Ra;
        const CellKind kx = (pair / 2 == 0) ? CellKind::up : CellKind::down;
        const CellKind ky = (pair % 2 == 0) ? CellKind::up : CellKind::down;
        for (int db = -table.Rb; db <= table.Rb; ++db)
            table.t[cell_index(kx)][cell_index(ky)]
                   [std::size_t(da + table.Ra) * nb + (db + table.Rb)] =
                lattice_pair_moments(mesh, kx, ky, da, db, k, cfg);
    });
    return table;
}

struct KindGradients {
    Point2 g[2][3];  // [cell kind][local vertex]
};

KindGradients cell_gradients(const LatticeMesh& mesh) {
    KindGradients grads;
    for (CellKind kind : {CellKind::up, CellKind::down}) {
        const Triangle2 t{mesh.triangle(kind, 0, 0)};
        for (int c = 0; c < 3; ++c) grads.g[cell_index(kind)][c] = barycentric_gradient(t, c);
    }
    return grads;
}

// <T phi_q, phi_p> for hats at node offset (da, db), via the
// integration-by-parts form: the surface curls are per-triangle constants
// and curl.curl = grad.grad, so each entry is a weighted sum of the
// precomputed pair moments.
Complex hypersingular_entry(const MomentTable& table, const KindGradients& grads,
                            double k, int da, int db) {
    Complex acc = 0;
    for (const auto& sx : kNodeSupport) {
        const Point2 gx = grads.g[cell_index(sx.kind)][sx.local];
        for (const auto& sy : kNodeSupport) {
            const Point2 gy = grads.g[cell_index(sy.kind)][sy.local];
            const MomentTensor& mom =
                table.at(sx.kind, sy.kind, da + sy.da - sx.da, db + sy.db - sx.db);
            const double gg = gx[0] * gy[0] + gx[1] * gy[1];
            acc += gg * mom.sum() - (k * k) * mom(sx.local, sy.local);
        }
    }
    return -acc;
}

// P1 mass entry at node offset (da, db): int b_a b_b over a shared triangle
// is area (1 + delta) / 12.
double p1_mass_entry(const LatticeMesh& mesh, int da, int db) {
    double acc = 0;
    for (const auto& sx : kNodeSupport)
        for (const auto& sy : kNodeSupport)
            if (sx.kind == sy.kind && sx.da == da + sy.da && sx.db == db + sy.db)
                acc += mesh.cell_area * (sx.local == sy.local ? 2.0 : 1.0) / 12.0;
    return acc;
}

// Per-element impedance coefficients resolved by screen P0 index (constant
// when no per-element arrays are present).
struct CoeffLookup {
    const ImpedanceParams& lambda;

    Complex lp(std::size_t p0) const {
        return lambda.per_element() ? lambda.lambda_plus_per_elem[p0] : lambda.lambda_plus;
    }
    Complex lm(std::size_t p0) const {
        return lambda.per_element() ? lambda.lambda_minus_per_elem[p0] : lambda.lambda_minus;
    }
    Complex c0(std::size_t p0) const { return lp(p0) * lm(p0) / (lp(p0) + lm(p0)); }
    Complex c1(std::size_t p0) const { return 0.5 * (lp(p0) - lm(p0)) / (lp(p0) + lm(p0)); }
    Complex c2(std::size_t p0) const { return 0.5 * (lp(p0) - lm(p0)); }
    Complex cS(std::size_t p0) const { return lp(p0) + lm(p0); }
};

struct ActiveCell {
    CellKind kind;
    int a, b;
};

// active triangles in screen P0 order (ups then downs)
std::vector<ActiveCell> active_cells(const LatticeMesh& mesh) {
    std::vector<ActiveCell> cells;
    for (CellKind kind : {CellKind::up, CellKind::down})
        for (int a = 0; a < mesh.Nx; ++a)
            for (int b = 0; b < mesh.Ny; ++b) {
                const bool active =
                    kind == CellKind::up ? mesh.up_active(a, b) : mesh.down_active(a, b);
                if (active) cells.push_back({kind, a, b});
            }
    return cells;
}

struct ActiveNode {
    int i, j;
};

std::vector<ActiveNode> active_nodes(const LatticeMesh& mesh, const DofMap& dofs) {
    std::vector<ActiveNode> nodes;
    for (int i = 1; i <= mesh.Nx - 1; ++i)
        for (int j = 1; j <= mesh.Ny - 1; ++j)
            if (dofs.node_screen(i, j) >= 0) nodes.push_back({i, j});
    return nodes;
}

}  // namespace

void ImpedanceParams::validate() const {
    const auto check = [](Complex lp, Complex lm) {
        if (lp.imag() < 0 || lm.imag() < 0)
            throw std::invalid_argument("ImpedanceParams: Im[lambda] must be >= 0");
        if (!(std::abs(lp + lm) > 0))
            throw std::invalid_argument("ImpedanceParams: lambda+ + lambda- must not vanish");
    };
    if (!per_element()) {
        check(lambda_plus, lambda_minus);
        return;
    }
    if (lambda_plus_per_elem.size() != lambda_minus_per_elem.size())
        throw std::invalid_argument("ImpedanceParams: per-element arrays differ in length");
    for (std::size_t i = 0; i < lambda_plus_per_elem.size(); ++i)
        check(lambda_plus_per_elem[i], lambda_minus_per_elem[i]);
}

void IncidentWave::validate() const {
    if (!(k > 0)) throw std::invalid_argument("IncidentWave: k must be positive");
    const double n2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if (std::abs(n2 - 1.0) > 1e-10)
        throw std::invalid_argument("IncidentWave: direction must be a unit vector");
}

Complex IncidentWave::trace(const Point2& x) const {
    return std::polar(1.0, k * (d[0] * x[0] + d[1] * x[1]));
}

Point2 barycentric_gradient(const Triangle2& t, int c) {
    const auto& v0 = t.v[std::size_t(c)];
    const auto& v1 = t.v[std::size_t((c + 1) % 3)];
    const auto& v2 = t.v[std::size_t((c + 2) % 3)];
    // gradient is perpendicular to the opposite edge, scaled so b_c(v0) = 1
    const double ex = v2[0] - v1[0], ey = v2[1] - v1[1];
    const double cr = ex * (v0[1] - v1[1]) - ey * (v0[0] - v1[0]);
    return {-ey / cr, ex / cr};
}

OperatorBlocks assemble_generating_blocks(const LatticeMesh& mesh, const DofMap& dofs,
                                          double k, const ImpedanceParams& lambda,
                                          const QuadratureConfig& cfg, int threads) {
    cfg.validate();
    lambda.validate();
    if (lambda.per_element())
        throw std::invalid_argument(
            "assemble_generating_blocks: per-element impedance breaks translation "
            "invariance; use assemble_dense");

    OperatorBlocks op;
    op.mesh = mesh;
    op.dofs = dofs;
    op.k = k;
    op.lambda = lambda;
    op.quad = cfg;

    const int Nx = mesh.Nx, Ny = mesh.Ny;
    const double area = mesh.cell_area;
    const Complex c0 = lambda.c0(), c1 = lambda.c1(), c2 = lambda.c2(), cS = lambda.cS();

    const MomentTable table = build_moment_table(mesh, k, cfg, threads);
    const KindGradients grads = cell_gradients(mesh);

    // (node, node): -c0 M11 - T
    GenArray& nn = op.block[0][0];
    nn.resize(-(Nx - 2), Nx - 2, -(Ny - 2), Ny - 2);
    for (int da = nn.lo_a; da <= nn.hi_a; ++da)
        for (int db = nn.lo_b; db <= nn.hi_b; ++db)
            nn.ref(da, db) = -c0 * p1_mass_entry(mesh, da, db) -
                             hypersingular_entry(table, grads, k, da, db);

    // (node, up/down): c1 * int of the hat over the trial triangle
    for (BasisKind col : {BasisKind::up, BasisKind::down}) {
        GenArray& g = op.block[0][int(col)];
        g.resize(-(Nx - 1), Nx - 2, -(Ny - 1), Ny - 2);
        for (const auto& s : kNodeSupport)
            if ((s.kind == CellKind::up) == (col == BasisKind::up))
                g.ref(s.da, s.db) = c1 * area / 3.0;
    }

    // (up/down, node): c2 * int of the hat over the test triangle
    for (BasisKind row : {BasisKind::up, BasisKind::down}) {
        GenArray& g = op.block[int(row)][0];
        g.resize(-(Nx - 2), Nx - 1, -(Ny - 2), Ny - 1);
        for (const auto& s : kNodeSupport)
            if ((s.kind == CellKind::up) == (row == BasisKind::up))
                g.ref(-s.da, -s.db) = c2 * area / 3.0;
    }

    // (up/down, up/down): M00 - cS * S
    for (BasisKind row : {BasisKind::up, BasisKind::down})
        for (BasisKind col : {BasisKind::up, BasisKind::down}) {
            const CellKind kr = row == BasisKind::up ? CellKind::up : CellKind::down;
            const CellKind kc = col == BasisKind::up ? CellKind::up : CellKind::down;
            GenArray& g = op.block[int(row)][int(col)];
            g.resize(-(Nx - 1), Nx - 1, -(Ny - 1), Ny - 1);
            for (int da = g.lo_a; da <= g.hi_a; ++da)
                for (int db = g.lo_b; db <= g.hi_b; ++db) {
                    Complex val = -cS * table.at(kr, kc, da, db).sum();
                    if (row == col && da == 0 && db == 0) val += area;
                    g.ref(da, db) = val;
                }
        }
    return op;
}

Matrix dense_single_layer(const LatticeMesh& mesh, const DofMap& dofs, double k,
                          const QuadratureConfig& cfg, int threads) {
    const auto cells = active_cells(mesh);
    const std::size_t n = cells.size();
    Matrix s(n, n);
    parallel_for(n, threads, [&](std::size_t p) {
        // evaluate each pair relative to the test cell so that entries with
        // equal lattice offset agree bitwise (the rounding, and in particular
        // the near-pair order selection, must not depend on the translation)
        for (std::size_t q = 0; q < n; ++q)
            s(Eigen::Index(p), Eigen::Index(q)) =
                lattice_pair_moments(mesh, cells[p].kind, cells[q].kind,
                                     cells[q].a - cells[p].a, cells[q].b - cells[p].b,
                                     k, cfg)
                    .sum();
    });
    return s;
}

Matrix dense_hypersingular(const LatticeMesh& mesh, const DofMap& dofs, double k,
                           const QuadratureConfig& cfg, int threads) {
    const auto nodes = active_nodes(mesh, dofs);
    const KindGradients grads = cell_gradients(mesh);
    const std::size_t n = nodes.size();
    Matrix t(n, n);
    parallel_for(n, threads, [&](std::size_t p) {
        for (std::size_t q = 0; q < n; ++q) {
            Complex acc = 0;
            for (const auto& sx : kNodeSupport) {
                const Point2 gx = grads.g[cell_index(sx.kind)][sx.local];
                for (const auto& sy : kNodeSupport) {
                    const Point2 gy = grads.g[cell_index(sy.kind)][sy.local];
                    const MomentTensor mom = lattice_pair_moments(
                        mesh, sx.kind, sy.kind, nodes[q].i - nodes[p].i + sy.da - sx.da,
                        nodes[q].j - nodes[p].j + sy.db - sx.db, k, cfg);
                    const double gg = gx[0] * gy[0] + gx[1] * gy[1];
                    acc += gg * mom.sum() - (k * k) * mom(sx.local, sy.local);
                }
            }
            t(Eigen::Index(p), Eigen::Index(q)) = -acc;
        }
    });
    return t;
}

Matrix assemble_dense(const LatticeMesh& mesh, const DofMap& dofs, double k,
                      const ImpedanceParams& lambda, const QuadratureConfig& cfg,
                      std::size_t max_dofs, int threads) {
    cfg.validate();
    lambda.validate();
    const std::size_t n = dofs.n_screen();
    if (n > max_dofs)
        throw std::length_error("assemble_dense: screen dimension exceeds the dense cap");
    const std::size_t nn = dofs.n_nodes;
    if (lambda.per_element() && lambda.lambda_plus_per_elem.size() != n - nn)
        throw std::invalid_argument("assemble_dense: per-element impedance length mismatch");

    const auto nodes = active_nodes(mesh, dofs);
    const auto cells = active_cells(mesh);
    const CoeffLookup co{lambda};
    const double area = mesh.cell_area;

    Matrix a = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));

    // (1,1) block: -c0-weighted P1 mass minus the hypersingular part
    const Matrix t_block = dense_hypersingular(mesh, dofs, k, cfg, threads);
    for (std::size_t p = 0; p < nodes.size(); ++p)
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            Complex mass = 0;
            for (const auto& sx : kNodeSupport)
                for (const auto& sy : kNodeSupport) {
                    if (sx.kind != sy.kind) continue;
                    const int ax = nodes[p].i + sx.da, bx = nodes[p].j + sx.db;
                    if (ax != nodes[q].i + sy.da || bx != nodes[q].j + sy.db) continue;
                    const std::int32_t sc = sx.kind == CellKind::up
                                                ? dofs.up_screen(ax, bx)
                                                : dofs.down_screen(ax, bx);
                    const std::size_t p0 = std::size_t(sc) - nn;
                    mass += co.c0(p0) * area * (sx.local == sy.local ? 2.0 : 1.0) / 12.0;
                }
            a(Eigen::Index(p), Eigen::Index(q)) =
                -mass - t_block(Eigen::Index(p), Eigen::Index(q));
        }

    // coupling blocks: hat integrals over single triangles
    for (std::size_t p = 0; p < nodes.size(); ++p)
        for (const auto& s : kNodeSupport) {
            const int ca = nodes[p].i + s.da, cb = nodes[p].j + s.db;
            const std::int32_t sc = s.kind == CellKind::up ? dofs.up_screen(ca, cb)
                                                           : dofs.down_screen(ca, cb);
            const std::size_t p0 = std::size_t(sc) - nn;
            a(Eigen::Index(p), Eigen::Index(sc)) = co.c1(p0) * area / 3.0;
            a(Eigen::Index(sc), Eigen::Index(p)) = co.c2(p0) * area / 3.0;
        }

    // (2,2) block: identity mass minus cS-weighted single layer
    const Matrix s_block = dense_single_layer(mesh, dofs, k, cfg, threads);
    for (std::size_t p = 0; p < cells.size(); ++p)
        for (std::size_t q = 0; q < cells.size(); ++q) {
            Complex val = -co.cS(p) * s_block(Eigen::Index(p), Eigen::Index(q));
            if (p == q) val += area;
            a(Eigen::Index(nn + p), Eigen::Index(nn + q)) = val;
        }
    return a;
}

Vector assemble_rhs(const LatticeMesh& mesh, const DofMap& dofs, const IncidentWave& inc,
                    const ImpedanceParams& lambda, const QuadratureConfig& cfg) {
    cfg.validate();
    lambda.validate();
    inc.validate();
    const std::size_t n = dofs.n_screen();
    const std::size_t nn = dofs.n_nodes;
    if (lambda.per_element() && lambda.lambda_plus_per_elem.size() != n - nn)
        throw std::invalid_argument("assemble_rhs: per-element impedance length mismatch");

    const auto nodes = active_nodes(mesh, dofs);
    const auto cells = active_cells(mesh);
    const CoeffLookup co{lambda};
    const auto& rule = triangle_rule(cfg.regular_order);
    const double two_area = 2.0 * mesh.cell_area;
    const Complex ikd3(0.0, inc.k * inc.d[2]);

    Vector b = Vector::Zero(Eigen::Index(n));

    // first row: <ik d3 u^i, hat_p>
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        Complex acc = 0;
        for (const auto& s : kNodeSupport) {
            const Triangle2 t{mesh.triangle(s.kind, nodes[p].i + s.da, nodes[p].j + s.db)};
            for (const auto& pt : rule) {
                const double bary[3] = {1.0 - pt.a1 - pt.a2, pt.a1, pt.a2};
                const Point2 x{
                    bary[0] * t.v[0][0] + bary[1] * t.v[1][0] + bary[2] * t.v[2][0],
                    bary[0] * t.v[0][1] + bary[1] * t.v[1][1] + bary[2] * t.v[2][1]};
                acc += pt.w * inc.trace(x) * bary[s.local];
            }
        }
        b(Eigen::Index(p)) = ikd3 * two_area * acc;
    }

    // second row: <g+ - g-, 1_T> = -(lambda+ + lambda-) int u^i
    for (std::size_t p = 0; p < cells.size(); ++p) {
        const Triangle2 t{mesh.triangle(cells[p].kind, cells[p].a, cells[p].b)};
        Complex acc = 0;
        for (const auto& pt : rule) {
            const double bary[3] = {1.0 - pt.a1 - pt.a2, pt.a1, pt.a2};
            const Point2 x{bary[0] * t.v[0][0] + bary[1] * t.v[1][0] + bary[2] * t.v[2][0],
                           bary[0] * t.v[0][1] + bary[1] * t.v[1][1] + bary[2] * t.v[2][1]};
            acc += pt.w * inc.trace(x);
        }
        b(Eigen::Index(nn + p)) = -co.cS(p) * two_area * acc;
    }
    return b;
}

Matrix reconstruct_para_dense(const OperatorBlocks& op) {
    const std::size_t n = op.dofs.n_para();
    Matrix a = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t p = 0; p < n; ++p) {
        const auto ep = op.dofs.para_entity(std::int32_t(p));
        for (std::size_t q = 0; q < n; ++q) {
            const auto eq = op.dofs.para_entity(std::int32_t(q));
            const GenArray& g = op.block[int(ep.kind)][int(eq.kind)];
            a(Eigen::Index(p), Eigen::Index(q)) = g.at(eq.a - ep.a, eq.b - ep.b);
        }
    }
    return a;
}

}  // namespace screenbem
