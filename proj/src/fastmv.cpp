#include "screenbem/fastmv.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace screenbem {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

// Plans depend only on the embedding size; created once under a lock and
// executed via the new-array interface (thread safe).
const PlanPair& plans_for(std::size_t La, std::size_t Lb) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, std::size_t>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.try_emplace({La, Lb});
    if (inserted) {
        std::vector<Complex> a(La * Lb), b(La * Lb);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        it->second.fwd =
            fftw_plan_dft_2d(int(La), int(Lb), pa, pb, FFTW_FORWARD, flags);
        it->second.inv =
            fftw_plan_dft_2d(int(La), int(Lb), pa, pb, FFTW_BACKWARD, flags);
        if (!it->second.fwd || !it->second.inv)
            throw std::runtime_error("fftw plan creation failed");
    }
    return it->second;
}

void run(fftw_plan p, Complex* in, Complex* out) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

std::size_t nextfast7(std::size_t n) {
    if (n < 2) return 2;
    for (;; ++n) {
        std::size_t m = n;
        for (std::size_t f : {2, 3, 5, 7})
            while (m % f == 0) m /= f;
        if (m == 1) return n;
    }
}

BCCBSymbol make_symbol(const GenArray& g, int nrow_a, int nrow_b, int ncol_a,
                       int ncol_b, int bd_a, int bd_b, std::size_t La,
                       std::size_t Lb) {
    BCCBSymbol sym;
    sym.nrow_a = nrow_a;
    sym.nrow_b = nrow_b;
    sym.ncol_a = ncol_a;
    sym.ncol_b = ncol_b;
    sym.La = La ? La : nextfast7(std::size_t(nrow_a + ncol_a - 1));
    sym.Lb = Lb ? Lb : nextfast7(std::size_t(nrow_b + ncol_b - 1));
    if (sym.La < std::size_t(nrow_a + ncol_a - 1) ||
        sym.Lb < std::size_t(nrow_b + ncol_b - 1))
        throw std::invalid_argument("make_symbol: embedding size too small");

    // The matvec is y[r] = sum_c g(c - r + bd) x[c], a circular correlation
    // once g is written to the embedding at index (-delta) mod L per axis.
    std::vector<Complex> embed(sym.La * sym.Lb, Complex(0));
    for (int da = -(nrow_a - 1); da <= ncol_a - 1; ++da) {
        const std::size_t ia = da <= 0 ? std::size_t(-da) : sym.La - std::size_t(da);
        for (int db = -(nrow_b - 1); db <= ncol_b - 1; ++db) {
            const std::size_t ib = db <= 0 ? std::size_t(-db) : sym.Lb - std::size_t(db);
            embed[ia * sym.Lb + ib] = g.at(da + bd_a, db + bd_b);
        }
    }

    sym.spectrum.resize(sym.La * sym.Lb);
    run(plans_for(sym.La, sym.Lb).fwd, embed.data(), sym.spectrum.data());
    const double scale = 1.0 / double(sym.La * sym.Lb);
    for (auto& s : sym.spectrum) s *= scale;
    return sym;
}

void symbol_apply(const BCCBSymbol& sym, const Complex* x, Complex* y,
                  Scratch& scratch) {
    const std::size_t L = sym.La * sym.Lb;
    if (scratch.a.size() != L) scratch.ensure(sym.La, sym.Lb);
    std::fill(scratch.a.begin(), scratch.a.end(), Complex(0));
    for (int ca = 0; ca < sym.ncol_a; ++ca)
        for (int cb = 0; cb < sym.ncol_b; ++cb)
            scratch.a[std::size_t(ca) * sym.Lb + std::size_t(cb)] =
                x[std::size_t(ca) * std::size_t(sym.ncol_b) + std::size_t(cb)];

    const PlanPair& p = plans_for(sym.La, sym.Lb);
    run(p.fwd, scratch.a.data(), scratch.b.data());
    for (std::size_t i = 0; i < L; ++i) scratch.b[i] *= sym.spectrum[i];
    run(p.inv, scratch.b.data(), scratch.a.data());

    for (int ra = 0; ra < sym.nrow_a; ++ra)
        for (int rb = 0; rb < sym.nrow_b; ++rb)
            y[std::size_t(ra) * std::size_t(sym.nrow_b) + std::size_t(rb)] +=
                scratch.a[std::size_t(ra) * sym.Lb + std::size_t(rb)];
}

FastOperator::FastOperator(OperatorBlocks op) : op_(std::move(op)) {
    const int Nx = op_.mesh.Nx, Ny = op_.mesh.Ny;
    const std::size_t La = nextfast7(std::size_t(2 * Nx - 1));
    const std::size_t Lb = nextfast7(std::size_t(2 * Ny - 1));
    for (BasisKind row : {BasisKind::node, BasisKind::up, BasisKind::down})
        for (BasisKind col : {BasisKind::node, BasisKind::up, BasisKind::down})
            sym_[int(row)][int(col)] = make_symbol(
                op_.gen(row, col), kind_dim_x(row, Nx), kind_dim_y(row, Ny),
                kind_dim_x(col, Nx), kind_dim_y(col, Ny),
                kind_base(col) - kind_base(row), kind_base(col) - kind_base(row),
                La, Lb);
    scratch_.ensure(La, Lb);
    xpara_.resize(op_.dofs.n_para());
    ypara_.resize(op_.dofs.n_para());
}

Vector FastOperator::apply(const Vector& x) const {
    const DofMap& d = op_.dofs;
    if (std::size_t(x.size()) != d.n_screen())
        throw std::invalid_argument("FastOperator::apply: size mismatch");

    std::fill(xpara_.begin(), xpara_.end(), Complex(0));
    for (std::size_t s = 0; s < d.n_screen(); ++s)
        xpara_[std::size_t(d.screen_to_para[s])] = x(Eigen::Index(s));
    std::fill(ypara_.begin(), ypara_.end(), Complex(0));

    const int Nx = op_.mesh.Nx, Ny = op_.mesh.Ny;
    const std::size_t n_int = std::size_t(Nx - 1) * std::size_t(Ny - 1);
    const std::size_t n_cell = std::size_t(Nx) * std::size_t(Ny);
    const std::size_t col_off[3] = {0, n_int, n_int + n_cell};
    const std::size_t row_off[3] = {0, n_int, n_int + n_cell};

    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
            symbol_apply(sym_[row][col], xpara_.data() + col_off[col],
                         ypara_.data() + row_off[row], scratch_);

    Vector y(Eigen::Index(d.n_screen()));
    for (std::size_t s = 0; s < d.n_screen(); ++s)
        y(Eigen::Index(s)) = ypara_[std::size_t(d.screen_to_para[s])];
    return y;
}

std::size_t FastOperator::spectrum_storage() const {
    std::size_t total = 0;
    for (const auto& row : sym_)
        for (const auto& s : row) total += s.spectrum.size();
    return total;
}

}  // namespace screenbem
