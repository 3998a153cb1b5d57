#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "screenbem/geometry.hpp"

namespace screenbem {

enum class CellKind { up, down };

/// Uniform parallelogram triangulation with active-cell masks selecting the
/// triangles covered by a prefractal polygon.
///
/// Every triangle is a translate of one of two reference triangles:
///   up(a,b)   = (a,b) + Hull(O, e1, e2)
///   down(a,b) = (a,b) + Hull(e1, e2, e1+e2)
/// with e1 = (Rx/Nx, 0) and e2 = (Ry/Ny)(cos theta, sin theta).
struct LatticeMesh {
    Family family = Family::koch;
    double theta = 0.0;   // pi/3 (triangular) or pi/2 (square)
    double pitch = 0.0;   // |e1| = |e2|
    std::int64_t pitch_den = 1;  // pitch = 1/pitch_den exactly
    int refinement = 1;

    int Nx = 0, Ny = 0;
    LatticePoint origin;  // lattice coordinates of the parallelogram corner
    std::vector<std::uint8_t> up_mask, down_mask;  // Nx*Ny, index a*Ny + b

    std::array<double, 2> e1{}, e2{};
    double h = 0.0;           // max element diameter
    double cell_area = 0.0;   // area of each triangle, |e1 x e2| / 2

    bool up_active(int a, int b) const { return up_mask[std::size_t(a) * Ny + b] != 0; }
    bool down_active(int a, int b) const { return down_mask[std::size_t(a) * Ny + b] != 0; }

    /// Physical coordinates of the lattice node at local coordinates (i, j),
    /// i.e. origin + i*e1 + j*e2.
    std::array<double, 2> node(int i, int j) const;

    /// Physical vertices of a triangle, in the reference vertex order.
    std::array<std::array<double, 2>, 3> triangle(CellKind kind, int a, int b) const;

    std::size_t active_up_count() const;
    std::size_t active_down_count() const;
};

/// Builds the tight bounding parallelogram (one-cell margin) on the polygon's
/// lattice refined by the integer factor m, and marks the triangles covered by
/// the polygon using exact centroid point-in-polygon tests.
/// Throws std::invalid_argument for non-lattice polygons or m < 1.
LatticeMesh build_lattice(const PrefractalPolygon& polygon, int refinement = 1);

/// Global degree-of-freedom indexing on the parallelogram and the screen.
///
/// Parallelogram ordering: the (Nx-1)(Ny-1) interior nodes first, then the
/// Nx*Ny upward triangles, then the Nx*Ny downward triangles; within each
/// family column-major (a outer, b inner). Screen ordering keeps the same
/// relative order restricted to active DOFs. The restriction map B
/// (parallelogram x screen, one unit entry per column) is stored as the
/// per-column row index.
struct DofMap {
    int Nx = 0, Ny = 0;
    std::size_t n_nodes = 0, n_up = 0, n_down = 0;

    std::vector<std::int32_t> screen_to_para;  // length N
    std::vector<std::int32_t> para_to_screen;  // length N_tilde, -1 if inactive

    std::size_t n_screen() const { return n_nodes + n_up + n_down; }
    std::size_t n_para() const {
        return std::size_t(Nx - 1) * (Ny - 1) + 2 * std::size_t(Nx) * Ny;
    }

    // parallelogram indices by lattice coordinate
    std::int32_t node_para(int i, int j) const {  // i in [1,Nx-1], j in [1,Ny-1]
        return std::int32_t((i - 1) * std::size_t(Ny - 1) + (j - 1));
    }
    std::int32_t up_para(int a, int b) const {
        return std::int32_t(std::size_t(Nx - 1) * (Ny - 1) + std::size_t(a) * Ny + b);
    }
    std::int32_t down_para(int a, int b) const {
        return std::int32_t(std::size_t(Nx - 1) * (Ny - 1) + std::size_t(Nx) * Ny +
                            std::size_t(a) * Ny + b);
    }

    std::int32_t node_screen(int i, int j) const { return para_to_screen[node_para(i, j)]; }
    std::int32_t up_screen(int a, int b) const { return para_to_screen[up_para(a, b)]; }
    std::int32_t down_screen(int a, int b) const { return para_to_screen[down_para(a, b)]; }

    /// Inverse of the parallelogram index: kind and lattice coordinate.
    struct Entity {
        enum Kind { node, up, down } kind;
        int a, b;  // node grid coordinate (i,j) or cell coordinate (a,b)
    };
    Entity para_entity(std::int32_t p) const;
};

/// A P1 node is active iff every incident triangle is active, so its hat
/// function vanishes on the screen boundary.
DofMap build_dof_map(const LatticeMesh& mesh);

/// Wireframe CSV of the active triangles (one `x0,y0,x1,y1,x2,y2` row each).
void export_mesh_csv(const LatticeMesh& mesh, const std::string& path);

}  // namespace screenbem
