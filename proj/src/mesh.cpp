#include "screenbem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace screenbem {

namespace {
constexpr double kSqrt3Half = 0.8660254037844386467637231707529362;

std::array<double, 2> lattice_to_phys(LatticeKind kind, double pitch, std::int64_t a,
                                      std::int64_t b) {
    if (kind == LatticeKind::triangular)
        return {(double(a) + 0.5 * double(b)) * pitch, double(b) * kSqrt3Half * pitch};
    return {double(a) * pitch, double(b) * pitch};
}
}  // namespace

std::array<double, 2> LatticeMesh::node(int i, int j) const {
    const LatticeKind kind =
        (family == Family::koch) ? LatticeKind::triangular : LatticeKind::square;
    return lattice_to_phys(kind, pitch, origin.a + i, origin.b + j);
}

std::array<std::array<double, 2>, 3> LatticeMesh::triangle(CellKind kind, int a, int b) const {
    if (kind == CellKind::up)
        return {node(a, b), node(a + 1, b), node(a, b + 1)};
    return {node(a + 1, b), node(a, b + 1), node(a + 1, b + 1)};
}

std::size_t LatticeMesh::active_up_count() const {
    return std::size_t(std::count(up_mask.begin(), up_mask.end(), std::uint8_t(1)));
}
std::size_t LatticeMesh::active_down_count() const {
    return std::size_t(std::count(down_mask.begin(), down_mask.end(), std::uint8_t(1)));
}

LatticeMesh build_lattice(const PrefractalPolygon& polygon, int refinement) {
    if (!polygon.lattice_conforming)
        throw std::invalid_argument("build_lattice: polygon is not lattice-conforming");
    if (refinement < 1)
        throw std::invalid_argument("build_lattice: refinement must be >= 1");
    if (polygon.pitch_den < 1)
        throw std::invalid_argument("build_lattice: invalid polygon pitch");
    const bool tri = polygon.lattice == LatticeKind::triangular;
    if (tri != (polygon.family == Family::koch))
        throw std::invalid_argument("build_lattice: polygon lattice does not match family");

    const std::int64_t m = refinement;

    LatticeMesh mesh;
    mesh.family = polygon.family;
    mesh.refinement = refinement;
    mesh.pitch_den = polygon.pitch_den * m;
    mesh.pitch = 1.0 / double(mesh.pitch_den);
    mesh.theta = tri ? std::numbers::pi / 3 : std::numbers::pi / 2;
    mesh.e1 = {mesh.pitch, 0.0};
    mesh.e2 = tri ? std::array<double, 2>{0.5 * mesh.pitch, kSqrt3Half * mesh.pitch}
                  : std::array<double, 2>{0.0, mesh.pitch};
    mesh.h = tri ? mesh.pitch : std::numbers::sqrt2 * mesh.pitch;
    mesh.cell_area = 0.5 * mesh.pitch * mesh.pitch * std::sin(mesh.theta);

    std::int64_t amin = std::numeric_limits<std::int64_t>::max(), amax = -amin;
    std::int64_t bmin = amin, bmax = -amin;
    for (const auto& v : polygon.vertices) {
        amin = std::min(amin, v.a * m);
        amax = std::max(amax, v.a * m);
        bmin = std::min(bmin, v.b * m);
        bmax = std::max(bmax, v.b * m);
    }

    // tight bounding parallelogram plus a one-cell margin
    mesh.origin = {amin - 1, bmin - 1};
    mesh.Nx = int(amax - amin) + 2;
    mesh.Ny = int(bmax - bmin) + 2;

    mesh.up_mask.assign(std::size_t(mesh.Nx) * mesh.Ny, 0);
    mesh.down_mask.assign(std::size_t(mesh.Nx) * mesh.Ny, 0);
    for (int a = 0; a < mesh.Nx; ++a) {
        for (int b = 0; b < mesh.Ny; ++b) {
            const std::int64_t A = mesh.origin.a + a, B = mesh.origin.b + b;
            // triangle centroids have exact thirds coordinates; since the
            // polygon boundary runs along lattice edges a centroid is never
            // on it, and a cell is entirely in or out
            const int up = locate_point(polygon, 3 * A + 1, 3 * B + 1, 3 * m);
            const int dn = locate_point(polygon, 3 * A + 2, 3 * B + 2, 3 * m);
            mesh.up_mask[std::size_t(a) * mesh.Ny + b] = (up > 0);
            mesh.down_mask[std::size_t(a) * mesh.Ny + b] = (dn > 0);
        }
    }
    return mesh;
}

DofMap::Entity DofMap::para_entity(std::int32_t p) const {
    const std::size_t n_int = std::size_t(Nx - 1) * (Ny - 1);
    const std::size_t n_cells = std::size_t(Nx) * Ny;
    std::size_t q = std::size_t(p);
    if (q < n_int)
        return {Entity::node, int(q / (Ny - 1)) + 1, int(q % (Ny - 1)) + 1};
    q -= n_int;
    if (q < n_cells) return {Entity::up, int(q / Ny), int(q % Ny)};
    q -= n_cells;
    return {Entity::down, int(q / Ny), int(q % Ny)};
}

DofMap build_dof_map(const LatticeMesh& mesh) {
    DofMap dofs;
    dofs.Nx = mesh.Nx;
    dofs.Ny = mesh.Ny;
    dofs.para_to_screen.assign(dofs.n_para(), -1);

    const auto node_active = [&](int i, int j) {
        return mesh.up_active(i, j) && mesh.up_active(i - 1, j) && mesh.up_active(i, j - 1) &&
               mesh.down_active(i - 1, j) && mesh.down_active(i, j - 1) &&
               mesh.down_active(i - 1, j - 1);
    };

    std::int32_t next = 0;
    for (int i = 1; i <= mesh.Nx - 1; ++i)
        for (int j = 1; j <= mesh.Ny - 1; ++j)
            if (node_active(i, j)) {
                dofs.para_to_screen[dofs.node_para(i, j)] = next++;
                ++dofs.n_nodes;
            }
    for (int a = 0; a < mesh.Nx; ++a)
        for (int b = 0; b < mesh.Ny; ++b)
            if (mesh.up_active(a, b)) {
                dofs.para_to_screen[dofs.up_para(a, b)] = next++;
                ++dofs.n_up;
            }
    for (int a = 0; a < mesh.Nx; ++a)
        for (int b = 0; b < mesh.Ny; ++b)
            if (mesh.down_active(a, b)) {
                dofs.para_to_screen[dofs.down_para(a, b)] = next++;
                ++dofs.n_down;
            }

    dofs.screen_to_para.assign(dofs.n_screen(), -1);
    for (std::size_t p = 0; p < dofs.para_to_screen.size(); ++p)
        if (dofs.para_to_screen[p] >= 0)
            dofs.screen_to_para[std::size_t(dofs.para_to_screen[p])] = std::int32_t(p);
    return dofs;
}

void export_mesh_csv(const LatticeMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_mesh_csv: cannot open " + path);
    out.precision(17);
    out << "kind,a,b,x0,y0,x1,y1,x2,y2\n";
    for (int a = 0; a < mesh.Nx; ++a)
        for (int b = 0; b < mesh.Ny; ++b)
            for (CellKind kind : {CellKind::up, CellKind::down}) {
                const bool active =
                    kind == CellKind::up ? mesh.up_active(a, b) : mesh.down_active(a, b);
                if (!active) continue;
                const auto t = mesh.triangle(kind, a, b);
                out << (kind == CellKind::up ? "up" : "down") << "," << a << "," << b;
                for (const auto& v : t) out << "," << v[0] << "," << v[1];
                out << "\n";
            }
}

}  // namespace screenbem
