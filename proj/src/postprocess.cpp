#include "screenbem/postprocess.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "screenbem/fastmv.hpp"
#include "screenbem/parallel.hpp"

namespace screenbem {

namespace {

struct EvalCell {
    Triangle2 tri;
    Complex psi;            // P0 density on the cell
    Complex phi_v[3];       // P1 density at the cell vertices
};

std::vector<EvalCell> gather_cells(const LatticeMesh& mesh, const DofMap& dofs,
                                   const Vector& phi, const Vector& psi) {
    if (std::size_t(phi.size()) != dofs.n_nodes ||
        std::size_t(psi.size()) != dofs.n_up + dofs.n_down)
        throw std::invalid_argument("evaluate_field: coefficient size mismatch");

    const auto node_val = [&](int i, int j) -> Complex {
        if (i < 1 || i > mesh.Nx - 1 || j < 1 || j > mesh.Ny - 1) return 0;
        const std::int32_t s = dofs.node_screen(i, j);
        return s >= 0 ? phi(Eigen::Index(s)) : Complex(0);
    };

    std::vector<EvalCell> cells;
    for (CellKind kind : {CellKind::up, CellKind::down})
        for (int a = 0; a < mesh.Nx; ++a)
            for (int b = 0; b < mesh.Ny; ++b) {
                const bool active =
                    kind == CellKind::up ? mesh.up_active(a, b) : mesh.down_active(a, b);
                if (!active) continue;
                EvalCell c;
                c.tri = Triangle2{mesh.triangle(kind, a, b)};
                const std::int32_t s = kind == CellKind::up ? dofs.up_screen(a, b)
                                                            : dofs.down_screen(a, b);
                c.psi = psi(Eigen::Index(std::size_t(s) - dofs.n_nodes));
                if (kind == CellKind::up) {
                    c.phi_v[0] = node_val(a, b);
                    c.phi_v[1] = node_val(a + 1, b);
                    c.phi_v[2] = node_val(a, b + 1);
                } else {
                    c.phi_v[0] = node_val(a + 1, b);
                    c.phi_v[1] = node_val(a, b + 1);
                    c.phi_v[2] = node_val(a + 1, b + 1);
                }
                cells.push_back(c);
            }
    return cells;
}

}  // namespace

Complex incident_field(const IncidentWave& inc, const Point3& x) {
    return std::polar(1.0, inc.k * (inc.d[0] * x[0] + inc.d[1] * x[1] + inc.d[2] * x[2]));
}

FieldGrid make_cube_grid(const Point3& center, double half_width, int n,
                         double standoff) {
    if (n < 2) throw std::invalid_argument("make_cube_grid: n must be >= 2");
    if (!(half_width > 0))
        throw std::invalid_argument("make_cube_grid: half_width must be positive");

    FieldGrid grid;
    grid.center = center;
    grid.half_width = half_width;
    grid.n = n;
    grid.standoff = standoff;

    const auto coord = [&](int i, int axis) {
        return center[std::size_t(axis)] - half_width +
               2.0 * half_width * double(i) / double(n - 1);
    };
    for (int face = 0; face < 6; ++face) {
        const int axis = face / 2;
        const double fixed = center[std::size_t(axis)] + (face % 2 ? half_width : -half_width);
        const int u_axis = axis == 0 ? 1 : 0;
        const int v_axis = axis == 2 ? 1 : 2;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                Point3 x{};
                x[std::size_t(axis)] = fixed;
                x[std::size_t(u_axis)] = coord(ix, u_axis);
                x[std::size_t(v_axis)] = coord(iy, v_axis);
                if (std::abs(x[2]) < standoff) continue;
                grid.points.push_back({face, ix, iy, x});
            }
    }
    return grid;
}

std::vector<Complex> evaluate_field(const LatticeMesh& mesh, const DofMap& dofs,
                                    const Vector& phi, const Vector& psi, double k,
                                    const std::vector<Point3>& pts,
                                    const QuadratureConfig& cfg, int threads) {
    cfg.validate();
    const auto cells = gather_cells(mesh, dofs, phi, psi);
    const auto& rule = triangle_rule(cfg.regular_order);
    const double two_area = 2.0 * mesh.cell_area;
    const Complex ik(0.0, k);

    std::vector<Complex> out(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t p) {
        const Point3& x = pts[p];
        Complex acc = 0;
        for (const auto& c : cells) {
            for (const auto& pt : rule) {
                const double bary[3] = {1.0 - pt.a1 - pt.a2, pt.a1, pt.a2};
                const double yx = bary[0] * c.tri.v[0][0] + bary[1] * c.tri.v[1][0] +
                                  bary[2] * c.tri.v[2][0];
                const double yy = bary[0] * c.tri.v[0][1] + bary[1] * c.tri.v[1][1] +
                                  bary[2] * c.tri.v[2][1];
                const double dx = x[0] - yx, dy = x[1] - yy, dz = x[2];
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                const Complex g = std::polar(1.0 / (4.0 * std::numbers::pi * r), k * r);
                // normal derivative of the kernel at y in the plane, normal +e3
                const Complex dgdn = (-dz / r) * (ik - 1.0 / r) * g;
                const Complex phi_y =
                    bary[0] * c.phi_v[0] + bary[1] * c.phi_v[1] + bary[2] * c.phi_v[2];
                acc += pt.w * (dgdn * phi_y - g * c.psi);
            }
        }
        out[p] = two_area * acc;
    });
    return out;
}

Complex evaluate_field_point(const LatticeMesh& mesh, const DofMap& dofs,
                             const Vector& phi, const Vector& psi, double k,
                             const Point3& x, const QuadratureConfig& cfg) {
    return evaluate_field(mesh, dofs, phi, psi, k, {x}, cfg, 1)[0];
}

double relative_linf_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("relative_linf_error: size mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    if (den == 0) throw std::invalid_argument("relative_linf_error: zero reference");
    return num / den;
}

namespace {

struct LevelField {
    std::vector<Complex> field;
    double h = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::size_t dofs = 0;
};

LevelField solve_level(const ConvergenceOptions& opt, int level,
                       const std::vector<Point3>& pts) {
    const auto t0 = std::chrono::steady_clock::now();
    const PrefractalPolygon poly =
        opt.family == Family::koch ? koch_prefractal(std::numbers::pi / 6.0, level)
                                   : square_prefractal(level);
    const LatticeMesh mesh = build_lattice(poly);
    const DofMap dofs = build_dof_map(mesh);

    const OperatorBlocks blocks = assemble_generating_blocks(
        mesh, dofs, opt.incident.k, opt.lambda, opt.quad, opt.threads);
    const Vector b = assemble_rhs(mesh, dofs, opt.incident, opt.lambda, opt.quad);
    const FastOperator fast(blocks);
    const Solution sol = solve_system([&](const Vector& x) { return fast.apply(x); }, b,
                                      dofs.n_nodes, opt.gmres);

    LevelField lf;
    lf.field = evaluate_field(mesh, dofs, sol.phi, sol.psi, opt.incident.k, pts,
                              opt.quad, opt.threads);
    lf.h = mesh.h;
    lf.iterations = sol.iterations;
    lf.dofs = dofs.n_screen();
    lf.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return lf;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence_study(const ConvergenceOptions& opt) {
    if (opt.levels.empty())
        throw std::invalid_argument("run_convergence_study: no levels requested");
    for (int level : opt.levels)
        if (level >= opt.reference_level)
            throw std::invalid_argument(
                "run_convergence_study: levels must be below the reference level");

    FieldGrid grid = make_cube_grid(opt.cube_center, opt.cube_half_width, opt.cube_n);
    std::vector<Point3> pts;
    pts.reserve(grid.points.size());
    for (const auto& fp : grid.points) pts.push_back(fp.x);

    const LevelField ref = solve_level(opt, opt.reference_level, pts);

    std::vector<ConvergenceRow> rows;
    for (int level : opt.levels) {
        const LevelField lf = solve_level(opt, level, pts);
        ConvergenceRow row;
        row.k = opt.incident.k;
        row.level = level;
        row.h = lf.h;
        row.error = relative_linf_error(lf.field, ref.field);
        row.iterations = lf.iterations;
        row.seconds = lf.seconds;
        row.dofs = lf.dofs;
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open convergence csv: " + path);
    out << "k,level,h,dofs,error,iterations,seconds\n";
    for (const auto& r : rows)
        out << r.k << ',' << r.level << ',' << r.h << ',' << r.dofs << ',' << r.error
            << ',' << r.iterations << ',' << r.seconds << '\n';
}

void write_field_csv(const std::string& path, const FieldGrid& grid,
                     const std::vector<Complex>& scattered, const IncidentWave& inc) {
    if (scattered.size() != grid.points.size())
        throw std::invalid_argument("write_field_csv: size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open field csv: " + path);
    out << "face,ix,iy,x,y,z,re_u,im_u,re_total,im_total\n";
    for (std::size_t i = 0; i < scattered.size(); ++i) {
        const auto& fp = grid.points[i];
        const Complex total = scattered[i] + incident_field(inc, fp.x);
        out << fp.face << ',' << fp.ix << ',' << fp.iy << ',' << fp.x[0] << ','
            << fp.x[1] << ',' << fp.x[2] << ',' << scattered[i].real() << ','
            << scattered[i].imag() << ',' << total.real() << ','
            << total.imag() << '\n';
    }
}

}  // namespace screenbem
