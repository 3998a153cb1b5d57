#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace screenbem {

/// Integer point in lattice units.
struct LatticePoint {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

enum class Family { koch, square };

/// Underlying lattice of a prefractal polygon.
///
/// triangular: basis u = pitch*(1,0), v = pitch*(1/2, sqrt(3)/2)
/// square:     basis u = pitch*(1,0), v = pitch*(0,1)
enum class LatticeKind { triangular, square };

/// Boundary polygon of a prefractal screen, oriented counter-clockwise.
///
/// For lattice-conforming families (Koch with beta = pi/6, square snowflake)
/// the vertices are exact integers in lattice units with pitch 1/pitch_den,
/// so all downstream geometric predicates are exact. For other apex angles
/// the polygon is kept in floating point and flagged non-lattice.
struct PrefractalPolygon {
    Family family = Family::koch;
    double beta = 0.0;  // apex half-angle, Koch family only
    int level = 0;
    bool lattice_conforming = true;
    LatticeKind lattice = LatticeKind::triangular;
    std::int64_t pitch_den = 1;  // pitch = 1/pitch_den

    std::vector<LatticePoint> vertices;                 // lattice path (conforming)
    std::vector<std::array<double, 2>> vertices_f;      // float path (non-lattice)

    double pitch() const { return 1.0 / static_cast<double>(pitch_den); }
    std::size_t edge_count() const {
        return lattice_conforming ? vertices.size() : vertices_f.size();
    }

    /// Physical coordinates of vertex i.
    std::array<double, 2> vertex(std::size_t i) const;
};

/// Classical snowflake prefractal of level j with apex angle 2*beta.
/// Exact lattice coordinates for beta = pi/6 (the Koch snowflake).
/// Throws std::invalid_argument unless 0 < beta < pi/2 and j >= 0.
PrefractalPolygon koch_prefractal(double beta, int j);

/// Square snowflake prefractal of level j on the square lattice of
/// pitch 4^-j. Throws std::invalid_argument for j < 0.
PrefractalPolygon square_prefractal(int j);

/// Twice the signed area in lattice-unit coordinates (exact integer shoelace).
std::int64_t shoelace2_lattice(const PrefractalPolygon& poly);

/// Signed physical area (positive for CCW polygons).
double area(const PrefractalPolygon& poly);

/// Exact point-in-polygon test for the point (pa/scale, pb/scale), given in
/// the polygon's lattice units. Returns +1 inside, 0 on the boundary,
/// -1 outside. Requires a lattice-conforming polygon.
int locate_point(const PrefractalPolygon& poly, std::int64_t pa, std::int64_t pb,
                 std::int64_t scale = 1);

/// Exact simplicity check: no two edges intersect except consecutive ones
/// at their shared endpoint. Quadratic sweep over edge pairs.
bool polygon_is_simple(const PrefractalPolygon& poly);

/// Vertex CSV (`x,y` header, physical units, CCW) plus a key=value metadata
/// sidecar next to it (same path with ".meta" appended).
void export_polygon_csv(const PrefractalPolygon& poly, const std::string& path);

}  // namespace screenbem
