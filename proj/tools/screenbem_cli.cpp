#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>

#include "screenbem/config.hpp"
#include "screenbem/fastmv.hpp"

namespace {

using namespace screenbem;

struct Problem {
    PrefractalPolygon poly;
    LatticeMesh mesh;
    DofMap dofs;
};

Problem build_problem(const RunConfig& cfg) {
    Problem p;
    p.poly = cfg.family_enum() == Family::koch
                 ? koch_prefractal(cfg.beta_degrees * std::numbers::pi / 180.0, cfg.level)
                 : square_prefractal(cfg.level);
    p.mesh = build_lattice(p.poly, cfg.refinement);
    p.dofs = build_dof_map(p.mesh);
    return p;
}

void write_coeffs(const std::string& path, const Vector& v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const std::uint64_t n = std::uint64_t(v.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(n * sizeof(Complex)));
}

Vector read_coeffs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    Vector v{Eigen::Index(n)};
    in.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(Complex)));
    if (!in) throw std::runtime_error("truncated coefficient file: " + path);
    return v;
}

Solution solve_problem(const RunConfig& cfg, const Problem& p, GmresResult* log_out) {
    const Vector b = assemble_rhs(p.mesh, p.dofs, cfg.incident(), cfg.impedance(), cfg.quad);
    LinearOp op;
    std::unique_ptr<FastOperator> fast;
    Matrix dense;
    if (cfg.mode == "fast") {
        fast = std::make_unique<FastOperator>(assemble_generating_blocks(
            p.mesh, p.dofs, cfg.k, cfg.impedance(), cfg.quad, cfg.threads));
        op = [&fast](const Vector& x) { return fast->apply(x); };
    } else {
        dense = assemble_dense(p.mesh, p.dofs, cfg.k, cfg.impedance(), cfg.quad, 20000,
                               cfg.threads);
        op = [&dense](const Vector& x) { return Vector(dense * x); };
    }

    const auto t0 = std::chrono::steady_clock::now();
    GmresResult r = gmres(op, b, cfg.gmres);
    const auto t1 = std::chrono::steady_clock::now();
    if (log_out) *log_out = r;
    if (!r.converged)
        throw std::runtime_error("gmres did not converge (relative residual " +
                                 std::to_string(r.relative_residual) + ")");

    Solution sol;
    sol.phi = r.x.head(Eigen::Index(p.dofs.n_nodes));
    sol.psi = r.x.tail(r.x.size() - Eigen::Index(p.dofs.n_nodes));
    sol.iterations = r.iterations;
    sol.relative_residual = r.relative_residual;
    sol.seconds = std::chrono::duration<double>(t1 - t0).count();
    sol.converged = true;
    return sol;
}

int run(int argc, char** argv) {
    CLI::App app{"Boundary element solver for acoustic scattering by fractal screens"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    bool print_config = false;
    RunConfig cfg;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_flag("--print-config", print_config, "print the effective configuration and exit");
    auto* opt_family = app.add_option("--family", cfg.family, "koch | square");
    auto* opt_level = app.add_option("--level", cfg.level, "prefractal level");
    auto* opt_refine = app.add_option("--refinement", cfg.refinement, "mesh refinement factor");
    auto* opt_k = app.add_option("--k", cfg.k, "wavenumber");
    auto* opt_mode = app.add_option("--mode", cfg.mode, "fast | dense");
    auto* opt_threads = app.add_option("--threads", cfg.threads, "worker threads (0 = all)");

    std::string out_prefix = "run";
    app.add_option("--output", out_prefix, "output path prefix");

    auto* cmd_mesh = app.add_subcommand("mesh", "build the prefractal mesh and export CSVs");
    auto* cmd_solve = app.add_subcommand("solve", "solve the scattering problem");
    std::string iter_log;
    cmd_solve->add_option("--iteration-log", iter_log, "residual history CSV");
    auto* cmd_field = app.add_subcommand("field", "evaluate the field on a cube grid");
    std::string solution_prefix;
    cmd_field->add_option("--solution", solution_prefix,
                          "coefficient file prefix from a previous solve");
    auto* cmd_conv = app.add_subcommand("converge", "prefractal convergence study");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            // command-line values override the file
            const RunConfig cli = cfg;
            cfg = load_config(config_path);
            if (*opt_family) cfg.family = cli.family;
            if (*opt_level) cfg.level = cli.level;
            if (*opt_refine) cfg.refinement = cli.refinement;
            if (*opt_k) cfg.k = cli.k;
            if (*opt_mode) cfg.mode = cli.mode;
            if (*opt_threads) cfg.threads = cli.threads;
        }
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (print_config) {
            std::cout << config_to_json(cfg);
            return 0;
        }

        if (*cmd_mesh) {
            const Problem p = build_problem(cfg);
            export_polygon_csv(p.poly, out_prefix + ".polygon.csv");
            export_mesh_csv(p.mesh, out_prefix + ".mesh.csv");
            std::cout << "family " << cfg.family << " level " << cfg.level << "\n"
                      << "area " << area(p.poly) << "\n"
                      << "grid " << p.mesh.Nx << " x " << p.mesh.Ny << ", h = " << p.mesh.h
                      << "\n"
                      << "active triangles "
                      << p.mesh.active_up_count() + p.mesh.active_down_count()
                      << ", interior nodes " << p.dofs.n_nodes << ", screen DOFs "
                      << p.dofs.n_screen() << "\n";
        }

        if (*cmd_solve) {
            const Problem p = build_problem(cfg);
            GmresResult log;
            const Solution sol = solve_problem(cfg, p, &log);
            write_coeffs(out_prefix + ".phi.bin", sol.phi);
            write_coeffs(out_prefix + ".psi.bin", sol.psi);
            if (!iter_log.empty()) write_iteration_log(iter_log, log);
            std::cout << "screen DOFs " << p.dofs.n_screen() << "\n"
                      << "iterations " << sol.iterations << ", relative residual "
                      << sol.relative_residual << "\n"
                      << "solve time " << sol.seconds << " s\n"
                      << "wrote " << out_prefix << ".phi.bin, " << out_prefix
                      << ".psi.bin\n";
        }

        if (*cmd_field) {
            const Problem p = build_problem(cfg);
            Vector phi, psi;
            if (!solution_prefix.empty()) {
                phi = read_coeffs(solution_prefix + ".phi.bin");
                psi = read_coeffs(solution_prefix + ".psi.bin");
                if (std::size_t(phi.size()) != p.dofs.n_nodes ||
                    std::size_t(psi.size()) != p.dofs.n_up + p.dofs.n_down)
                    throw std::runtime_error(
                        "solution files do not match the configured mesh");
            } else {
                const Solution sol = solve_problem(cfg, p, nullptr);
                phi = sol.phi;
                psi = sol.psi;
            }
            const FieldGrid grid =
                make_cube_grid(cfg.cube_center, cfg.cube_half_width, cfg.cube_n);
            std::vector<Point3> pts;
            pts.reserve(grid.points.size());
            for (const auto& fp : grid.points) pts.push_back(fp.x);
            const std::vector<Complex> u = evaluate_field(
                p.mesh, p.dofs, phi, psi, cfg.k, pts, cfg.quad, cfg.threads);
            write_field_csv(out_prefix + ".field.csv", grid, u, cfg.incident());
            std::cout << "evaluated " << u.size() << " points, wrote " << out_prefix
                      << ".field.csv\n";
        }

        if (*cmd_conv) {
            if (cfg.levels.empty())
                throw std::runtime_error("converge: config must list study levels");
            ConvergenceOptions opt;
            opt.family = cfg.family_enum();
            opt.levels = cfg.levels;
            opt.reference_level = cfg.reference_level;
            opt.incident = cfg.incident();
            opt.lambda = cfg.impedance();
            opt.cube_center = cfg.cube_center;
            opt.cube_half_width = cfg.cube_half_width;
            opt.cube_n = cfg.cube_n;
            opt.quad = cfg.quad;
            opt.gmres = cfg.gmres;
            opt.threads = cfg.threads;
            const auto rows = run_convergence_study(opt);
            write_convergence_csv(out_prefix + ".convergence.csv", rows);
            for (const auto& r : rows)
                std::cout << "level " << r.level << ": h = " << r.h << ", DOFs " << r.dofs
                          << ", error " << r.error << ", iterations " << r.iterations
                          << ", " << r.seconds << " s\n";
            std::cout << "wrote " << out_prefix << ".convergence.csv\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
