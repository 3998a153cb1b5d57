#include "screenbem/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace screenbem {

void GmresConfig::validate() const {
    if (!(rel_tol > 0) || rel_tol >= 1)
        throw std::invalid_argument("GmresConfig: rel_tol must lie in (0, 1)");
    if (restart < 1) throw std::invalid_argument("GmresConfig: restart must be >= 1");
    if (max_iterations < 1)
        throw std::invalid_argument("GmresConfig: max_iterations must be >= 1");
}

GmresResult gmres(const LinearOp& apply, const Vector& b, const GmresConfig& cfg,
                  const Vector* x0) {
    cfg.validate();
    const Eigen::Index n = b.size();
    const double bnorm = b.norm();

    GmresResult res;
    res.x = x0 ? *x0 : Vector::Zero(n);
    if (bnorm == 0.0) {
        res.x.setZero();
        res.converged = true;
        return res;
    }

    const int m = cfg.restart;
    std::vector<Vector> v(std::size_t(m) + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd cs(m), sn(m), g(m + 1);

    while (res.iterations < cfg.max_iterations) {
        Vector r = b - apply(res.x);
        double beta = r.norm();
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= cfg.rel_tol) {
            res.converged = true;
            return res;
        }

        v[0] = r / beta;
        g.setZero();
        g(0) = beta;

        int j = 0;
        for (; j < m && res.iterations < cfg.max_iterations; ++j) {
            Vector w = apply(v[std::size_t(j)]);
            const double wnorm0 = w.norm();
            for (int i = 0; i <= j; ++i) {
                const Complex hij = v[std::size_t(i)].dot(w);
                h(i, j) = hij;
                w -= hij * v[std::size_t(i)];
            }
            // one reorthogonalization pass when cancellation is severe
            if (w.norm() < 0.1 * wnorm0) {
                for (int i = 0; i <= j; ++i) {
                    const Complex corr = v[std::size_t(i)].dot(w);
                    h(i, j) += corr;
                    w -= corr * v[std::size_t(i)];
                }
            }
            const double hsub = w.norm();
            h(j + 1, j) = hsub;

            for (int i = 0; i < j; ++i) {
                const Complex t = std::conj(cs(i)) * h(i, j) + std::conj(sn(i)) * h(i + 1, j);
                h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
                h(i, j) = t;
            }
            const double denom =
                std::sqrt(std::norm(h(j, j)) + std::norm(h(j + 1, j)));
            if (denom == 0.0) {
                cs(j) = 1.0;
                sn(j) = 0.0;
            } else {
                cs(j) = h(j, j) / denom;
                sn(j) = h(j + 1, j) / denom;
            }
            h(j, j) = std::conj(cs(j)) * h(j, j) + std::conj(sn(j)) * h(j + 1, j);
            h(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = std::conj(cs(j)) * g(j);

            ++res.iterations;
            res.relative_residual = std::abs(g(j + 1)) / bnorm;
            res.residual_history.push_back(res.relative_residual);

            if (res.relative_residual <= cfg.rel_tol) {
                ++j;
                break;
            }
            if (hsub > 0)
                v[std::size_t(j) + 1] = w / hsub;
            else {
                ++j;  // lucky breakdown: Krylov space is invariant
                break;
            }
        }

        // back substitution on the j x j triangular system
        Eigen::VectorXcd y(j);
        for (int i = j - 1; i >= 0; --i) {
            Complex s = g(i);
            for (int l = i + 1; l < j; ++l) s -= h(i, l) * y(l);
            y(i) = s / h(i, i);
        }
        for (int i = 0; i < j; ++i) res.x += y(i) * v[std::size_t(i)];

        if (res.relative_residual <= cfg.rel_tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

Solution solve_system(const LinearOp& apply, const Vector& b, std::size_t n_nodes,
                      const GmresConfig& cfg, bool allow_failure) {
    const auto t0 = std::chrono::steady_clock::now();
    GmresResult r = gmres(apply, b, cfg);
    const auto t1 = std::chrono::steady_clock::now();

    if (!r.converged && !allow_failure) {
        std::ostringstream msg;
        msg << "gmres did not converge: " << r.iterations << " iterations, relative residual "
            << r.relative_residual << " (target " << cfg.rel_tol << ")";
        throw std::runtime_error(msg.str());
    }

    Solution sol;
    sol.phi = r.x.head(Eigen::Index(n_nodes));
    sol.psi = r.x.tail(r.x.size() - Eigen::Index(n_nodes));
    sol.iterations = r.iterations;
    sol.relative_residual = r.relative_residual;
    sol.seconds = std::chrono::duration<double>(t1 - t0).count();
    sol.converged = r.converged;
    return sol;
}

void write_iteration_log(const std::string& path, const GmresResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open iteration log: " + path);
    out << "iteration,residual\n";
    for (std::size_t i = 0; i < result.residual_history.size(); ++i)
        out << (i + 1) << ',' << result.residual_history[i] << '\n';
}

}  // namespace screenbem
