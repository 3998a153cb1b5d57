#pragma once

#include <cstddef>
#include <vector>

#include "screenbem/assembly.hpp"

namespace screenbem {

/// Smallest integer >= n whose prime factors are all <= 7 (good FFT length).
std::size_t nextfast7(std::size_t n);

/// Spectral symbol of one block-Toeplitz block embedded in a block-circulant
/// of size La x Lb: a matvec is pad, forward FFT, pointwise multiply,
/// inverse FFT, extract. The spectrum is pre-scaled by 1/(La*Lb).
struct BCCBSymbol {
    std::size_t La = 0, Lb = 0;
    int nrow_a = 0, nrow_b = 0;
    int ncol_a = 0, ncol_b = 0;
    std::vector<Complex> spectrum;
};

/// Reusable FFT work buffers for a given embedding size.
struct Scratch {
    std::vector<Complex> a, b;

    void ensure(std::size_t La, std::size_t Lb) {
        a.assign(La * Lb, Complex(0));
        b.assign(La * Lb, Complex(0));
    }
};

/// Builds the symbol of the Toeplitz block whose entries are
/// g(col - row + base_diff) with the given row/column grid dimensions
/// (vectors are a-major, b-fastest). La/Lb of 0 selects the smallest valid
/// fast sizes.
BCCBSymbol make_symbol(const GenArray& g, int nrow_a, int nrow_b, int ncol_a,
                       int ncol_b, int bd_a, int bd_b, std::size_t La = 0,
                       std::size_t Lb = 0);

/// y += T x for the symbol's Toeplitz block; x has ncol_a*ncol_b entries,
/// y has nrow_a*nrow_b. Scratch is resized as needed.
void symbol_apply(const BCCBSymbol& sym, const Complex* x, Complex* y, Scratch& scratch);

/// The assembled operator in FFT form: nine block symbols on the
/// parallelogram index set plus the screen restriction. apply() is not
/// reentrant on one instance (shared scratch buffers).
class FastOperator {
  public:
    explicit FastOperator(OperatorBlocks op);

    std::size_t n() const { return op_.dofs.n_screen(); }
    const OperatorBlocks& blocks() const { return op_; }

    /// y = A x on screen DOFs.
    Vector apply(const Vector& x) const;

    /// Total stored spectrum entries (complex), for memory-scaling checks.
    std::size_t spectrum_storage() const;

  private:
    OperatorBlocks op_;
    BCCBSymbol sym_[3][3];
    mutable Scratch scratch_;
    mutable std::vector<Complex> xpara_, ypara_;
};

}  // namespace screenbem
