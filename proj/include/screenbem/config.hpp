#pragma once

#include <string>
#include <vector>

#include "screenbem/postprocess.hpp"

namespace screenbem {

/// One run description, loadable from JSON. Complex numbers are serialized
/// as [re, im] pairs.
struct RunConfig {
    std::string family = "koch";  // "koch" | "square"
    int level = 2;
    double beta_degrees = 30.0;   // Koch apex half-angle
    int refinement = 1;

    double k = 5.0;
    Point3 direction{0.0, 0.0, -1.0};
    Complex lambda_plus{1.0, 0.0};
    Complex lambda_minus{1.0, 0.0};

    std::string mode = "fast";  // "fast" | "dense"
    int threads = 0;

    QuadratureConfig quad;
    GmresConfig gmres;

    Point3 cube_center{0.5, 0.25, 0.0};
    double cube_half_width = 0.7;
    int cube_n = 10;

    std::vector<int> levels;      // convergence study levels
    int reference_level = 3;

    void validate() const;

    Family family_enum() const;
    IncidentWave incident() const;
    ImpedanceParams impedance() const;
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

}  // namespace screenbem
