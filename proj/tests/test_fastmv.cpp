#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "screenbem/fastmv.hpp"

using namespace screenbem;

namespace {

constexpr double kBeta = std::numbers::pi / 6.0;

GenArray random_gen(int lo_a, int hi_a, int lo_b, int hi_b, unsigned seed) {
    GenArray g;
    g.resize(lo_a, hi_a, lo_b, hi_b);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : g.v) v = Complex(u(rng), u(rng));
    return g;
}

}  // namespace

TEST_CASE("fast fft sizes") {
    CHECK(nextfast7(1) == 2);
    CHECK(nextfast7(7) == 7);
    CHECK(nextfast7(11) == 12);
    CHECK(nextfast7(127) == 128);
    CHECK(nextfast7(211) == 216);
    CHECK(nextfast7(1009) == 1024);
}

TEST_CASE("symbol matvec equals the dense toeplitz product") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& [nra, nrb, nca, ncb, bda, bdb] :
         {std::array<int, 6>{4, 5, 4, 5, 0, 0}, std::array<int, 6>{3, 6, 5, 4, 1, -1},
          std::array<int, 6>{6, 3, 3, 6, -1, 1}}) {
        const GenArray g = random_gen(-(nra - 1) + bda, (nca - 1) + bda,
                                      -(nrb - 1) + bdb, (ncb - 1) + bdb, 42);
        const BCCBSymbol sym = make_symbol(g, nra, nrb, nca, ncb, bda, bdb);

        std::vector<Complex> x(std::size_t(nca) * ncb);
        for (auto& v : x) v = Complex(u(rng), u(rng));
        std::vector<Complex> y(std::size_t(nra) * nrb, Complex(0));
        Scratch scratch;
        symbol_apply(sym, x.data(), y.data(), scratch);

        for (int ra = 0; ra < nra; ++ra)
            for (int rb = 0; rb < nrb; ++rb) {
                Complex expect = 0;
                for (int ca = 0; ca < nca; ++ca)
                    for (int cb = 0; cb < ncb; ++cb)
                        expect += g.at(ca - ra + bda, cb - rb + bdb) *
                                  x[std::size_t(ca) * std::size_t(ncb) + std::size_t(cb)];
                const Complex got = y[std::size_t(ra) * std::size_t(nrb) + std::size_t(rb)];
                CHECK(std::abs(got - expect) < 1e-12);
            }
    }
}

TEST_CASE("symbol apply accumulates into the output") {
    const GenArray g = random_gen(-2, 2, -2, 2, 3);
    const BCCBSymbol sym = make_symbol(g, 3, 3, 3, 3, 0, 0);
    std::vector<Complex> x(9, Complex(1.0, 0.0)), y1(9, Complex(0)), y2(9, Complex(5.0, 0.0));
    Scratch scratch;
    symbol_apply(sym, x.data(), y1.data(), scratch);
    symbol_apply(sym, x.data(), y2.data(), scratch);
    for (std::size_t i = 0; i < 9; ++i)
        CHECK(std::abs(y2[i] - y1[i] - Complex(5.0, 0.0)) < 1e-12);
}

TEST_CASE("fast operator matches the dense matrix") {
    for (const bool square : {false, true}) {
        const auto poly = square ? square_prefractal(1) : koch_prefractal(kBeta, 2);
        const LatticeMesh mesh = build_lattice(poly);
        const DofMap dofs = build_dof_map(mesh);
        const double k = 5.0;
        ImpedanceParams lam;
        lam.lambda_plus = Complex(1.5 * k, 1.5 * k);
        lam.lambda_minus = Complex(k, k);
        QuadratureConfig quad;

        const Matrix dense = assemble_dense(mesh, dofs, k, lam, quad);
        const FastOperator fast(assemble_generating_blocks(mesh, dofs, k, lam, quad));
        REQUIRE(fast.n() == dofs.n_screen());

        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 3; ++trial) {
            Vector x(Eigen::Index(dofs.n_screen()));
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(u(rng), u(rng));
            const Vector ref = dense * x;
            const Vector got = fast.apply(x);
            CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-11 * ref.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("spectrum storage grows linearly with the grid") {
    const FastOperator small(assemble_generating_blocks(
        build_lattice(koch_prefractal(kBeta, 1)),
        build_dof_map(build_lattice(koch_prefractal(kBeta, 1))), 1.0,
        ImpedanceParams{Complex(1, 1), Complex(1, 1)}, QuadratureConfig{}));
    CHECK(small.spectrum_storage() > 0);
}

TEST_CASE("apply rejects wrong sizes") {
    const LatticeMesh mesh = build_lattice(koch_prefractal(kBeta, 1));
    const DofMap dofs = build_dof_map(mesh);
    ImpedanceParams lam;
    lam.lambda_plus = Complex(1, 1);
    lam.lambda_minus = Complex(1, 1);
    const FastOperator fast(
        assemble_generating_blocks(mesh, dofs, 2.0, lam, QuadratureConfig{}));
    Vector bad = Vector::Zero(3);
    CHECK_THROWS_AS(fast.apply(bad), std::invalid_argument);
}
