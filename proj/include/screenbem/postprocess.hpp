#pragma once

#include <string>
#include <vector>

#include "screenbem/assembly.hpp"
#include "screenbem/solver.hpp"

namespace screenbem {

/// Full incident plane wave e^{ik d.x} at a 3D point.
Complex incident_field(const IncidentWave& inc, const Point3& x);

struct FieldPoint {
    int face = 0;  // 0..5: -x, +x, -y, +y, -z, +z
    int ix = 0, iy = 0;
    Point3 x{0.0, 0.0, 0.0};
};

/// Evaluation points on the six faces of an axis-aligned cube, n x n per
/// face. Points closer than `standoff` to the screen plane z = 0 are
/// dropped (the scattered field jumps there).
struct FieldGrid {
    Point3 center{0.0, 0.0, 0.0};
    double half_width = 1.0;
    int n = 10;
    double standoff = 1e-6;
    std::vector<FieldPoint> points;
};

FieldGrid make_cube_grid(const Point3& center, double half_width, int n,
                         double standoff = 1e-6);

/// Scattered field u(x) = D phi(x) - S psi(x) from the jump densities, by
/// per-triangle Gauss quadrature of the representation formula. phi holds
/// P1 coefficients on active interior nodes, psi P0 coefficients on active
/// triangles (screen ordering). Parallel over points.
std::vector<Complex> evaluate_field(const LatticeMesh& mesh, const DofMap& dofs,
                                    const Vector& phi, const Vector& psi, double k,
                                    const std::vector<Point3>& pts,
                                    const QuadratureConfig& cfg, int threads = 0);

Complex evaluate_field_point(const LatticeMesh& mesh, const DofMap& dofs,
                             const Vector& phi, const Vector& psi, double k,
                             const Point3& x, const QuadratureConfig& cfg);

/// max_i |a_i - b_i| / max_i |b_i|.
double relative_linf_error(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct ConvergenceRow {
    double k = 0.0;
    int level = 0;
    double h = 0.0;
    double error = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::size_t dofs = 0;
};

struct ConvergenceOptions {
    Family family = Family::koch;
    std::vector<int> levels;
    int reference_level = 0;
    IncidentWave incident;
    ImpedanceParams lambda;
    Point3 cube_center{0.5, 0.25, 0.0};
    double cube_half_width = 0.7;
    int cube_n = 6;
    QuadratureConfig quad;
    GmresConfig gmres;
    int threads = 0;
};

/// Solves on each prefractal level and on the reference level, then compares
/// scattered fields on the shared cube grid. Error is the relative sup
/// difference against the reference field.
std::vector<ConvergenceRow> run_convergence_study(const ConvergenceOptions& opt);

/// CSV header "k,level,h,dofs,error,iterations,seconds".
void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);

/// CSV header "face,ix,iy,x,y,z,re_u,im_u,re_total,im_total" with u the
/// scattered field and total = incident + scattered.
void write_field_csv(const std::string& path, const FieldGrid& grid,
                     const std::vector<Complex>& scattered, const IncidentWave& inc);

}  // namespace screenbem
