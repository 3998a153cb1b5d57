#pragma once

#include <functional>
#include <string>

#include "screenbem/assembly.hpp"

namespace screenbem {

struct GmresConfig {
    double rel_tol = 1e-8;
    int restart = 200;
    int max_iterations = 2000;

    void validate() const;
};

struct GmresResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;  // one entry per iteration
};

using LinearOp = std::function<Vector(const Vector&)>;

/// Restarted GMRES with modified Gram-Schmidt (one reorthogonalization pass
/// when orthogonality degrades) and Givens-rotation least squares.
GmresResult gmres(const LinearOp& apply, const Vector& b, const GmresConfig& cfg,
                  const Vector* x0 = nullptr);

/// Jump solution split into its P1 (trace jump, active interior nodes) and
/// P0 (normal-derivative jump, active triangles) parts.
struct Solution {
    Vector phi;  // P1 coefficients
    Vector psi;  // P0 coefficients
    int iterations = 0;
    double relative_residual = 0.0;
    double seconds = 0.0;
    bool converged = false;
};

/// Solves A x = b on screen DOFs and splits the result; throws
/// std::runtime_error with a diagnostic message on non-convergence unless
/// allow_failure is set.
Solution solve_system(const LinearOp& apply, const Vector& b, std::size_t n_nodes,
                      const GmresConfig& cfg, bool allow_failure = false);

/// Writes the residual history as CSV ("iteration,residual").
void write_iteration_log(const std::string& path, const GmresResult& result);

}  // namespace screenbem
