#include "screenbem/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace screenbem {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex values must be [re, im] arrays");
    return {j[0].get<double>(), j[1].get<double>()};
}

json point3_to_json(const Point3& p) { return json::array({p[0], p[1], p[2]}); }

Point3 point3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("points must be [x, y, z] arrays");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    if (family != "koch" && family != "square")
        throw std::invalid_argument("config: family must be \"koch\" or \"square\"");
    if (level < 0) throw std::invalid_argument("config: level must be >= 0");
    if (refinement < 1) throw std::invalid_argument("config: refinement must be >= 1");
    if (mode != "fast" && mode != "dense")
        throw std::invalid_argument("config: mode must be \"fast\" or \"dense\"");
    if (!(beta_degrees > 0) || !(beta_degrees < 90))
        throw std::invalid_argument("config: beta_degrees must lie in (0, 90)");
    incident().validate();
    impedance().validate();
    quad.validate();
    gmres.validate();
    if (cube_n < 2) throw std::invalid_argument("config: cube_n must be >= 2");
    if (!(cube_half_width > 0))
        throw std::invalid_argument("config: cube_half_width must be positive");
    for (int l : levels)
        if (l < 0 || l >= reference_level)
            throw std::invalid_argument(
                "config: study levels must be >= 0 and below reference_level");
}

Family RunConfig::family_enum() const {
    return family == "square" ? Family::square : Family::koch;
}

IncidentWave RunConfig::incident() const { return IncidentWave{k, direction}; }

ImpedanceParams RunConfig::impedance() const {
    ImpedanceParams lam;
    lam.lambda_plus = lambda_plus;
    lam.lambda_minus = lambda_minus;
    return lam;
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["family"] = cfg.family;
    j["level"] = cfg.level;
    j["beta_degrees"] = cfg.beta_degrees;
    j["refinement"] = cfg.refinement;
    j["k"] = cfg.k;
    j["direction"] = point3_to_json(cfg.direction);
    j["lambda_plus"] = complex_to_json(cfg.lambda_plus);
    j["lambda_minus"] = complex_to_json(cfg.lambda_minus);
    j["mode"] = cfg.mode;
    j["threads"] = cfg.threads;
    j["quadrature"] = {{"regular_order", cfg.quad.regular_order},
                       {"singular_order", cfg.quad.singular_order},
                       {"separation_ratio", cfg.quad.separation_ratio}};
    j["gmres"] = {{"rel_tol", cfg.gmres.rel_tol},
                  {"restart", cfg.gmres.restart},
                  {"max_iterations", cfg.gmres.max_iterations}};
    j["cube_center"] = point3_to_json(cfg.cube_center);
    j["cube_half_width"] = cfg.cube_half_width;
    j["cube_n"] = cfg.cube_n;
    j["levels"] = cfg.levels;
    j["reference_level"] = cfg.reference_level;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }

    RunConfig cfg;
    get_if(j, "family", cfg.family);
    get_if(j, "level", cfg.level);
    get_if(j, "beta_degrees", cfg.beta_degrees);
    get_if(j, "refinement", cfg.refinement);
    get_if(j, "k", cfg.k);
    if (j.contains("direction")) cfg.direction = point3_from_json(j.at("direction"));
    if (j.contains("lambda_plus")) cfg.lambda_plus = complex_from_json(j.at("lambda_plus"));
    if (j.contains("lambda_minus"))
        cfg.lambda_minus = complex_from_json(j.at("lambda_minus"));
    get_if(j, "mode", cfg.mode);
    get_if(j, "threads", cfg.threads);
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        get_if(q, "regular_order", cfg.quad.regular_order);
        get_if(q, "singular_order", cfg.quad.singular_order);
        get_if(q, "separation_ratio", cfg.quad.separation_ratio);
    }
    if (j.contains("gmres")) {
        const json& g = j.at("gmres");
        get_if(g, "rel_tol", cfg.gmres.rel_tol);
        get_if(g, "restart", cfg.gmres.restart);
        get_if(g, "max_iterations", cfg.gmres.max_iterations);
    }
    if (j.contains("cube_center")) cfg.cube_center = point3_from_json(j.at("cube_center"));
    get_if(j, "cube_half_width", cfg.cube_half_width);
    get_if(j, "cube_n", cfg.cube_n);
    get_if(j, "levels", cfg.levels);
    get_if(j, "reference_level", cfg.reference_level);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open config for writing: " + path);
    out << config_to_json(cfg);
}

}  // namespace screenbem
