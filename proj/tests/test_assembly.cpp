#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "rvehom/assembly.hpp"

using namespace rvehom;

namespace {

EnsembleParams params(int L, int m0, Rational alpha, double lambda) {
    EnsembleParams p;
    p.L = L;
    p.m0 = m0;
    p.alpha = alpha;
    p.lambda = lambda;
    return p;
}

// Vertex permutation induced by a torus isometry.
std::vector<long> vertex_permutation(const SymmetryOp& op, int n) {
    std::vector<long> perm(std::size_t(n) * n);
    auto wrap = [n](int v) { return ((v % n) + n) % n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int ti = i, tj = j;
            switch (op.kind) {
                case SymmetryOp::Kind::identity: break;
                case SymmetryOp::Kind::translate:
                    ti = wrap(i + op.shift1);
                    tj = wrap(j + op.shift2);
                    break;
                case SymmetryOp::Kind::rotate90:
                    ti = wrap(-j);
                    tj = i;
                    break;
                case SymmetryOp::Kind::reflect_x1:
                    ti = wrap(-i);
                    break;
                case SymmetryOp::Kind::reflect_x2:
                    tj = wrap(-j);
                    break;
                case SymmetryOp::Kind::swap_axes:
                    ti = j;
                    tj = i;
                    break;
            }
            perm[std::size_t(i) * n + j] = long(ti) * n + tj;
        }
    return perm;
}

} // namespace

TEST_CASE("laplacian: null vector, stencil, eigenvalues") {
    for (const int n : {4, 6, 16}) {
        const auto lap = assemble_laplacian(n);
        const Vector ones = Vector::Ones(lap.dim());
        CHECK(lap.apply(ones).lpNorm<Eigen::Infinity>() == 0.0);
        // exactly 5 stored entries per row
        for (long r = 0; r < lap.dim(); ++r) {
            int count = 0;
            for (SparseOperator::Matrix::InnerIterator it(lap.matrix(), int(r)); it; ++it)
                ++count;
            CHECK(count == 5);
        }
    }
    CHECK_THROWS_AS(assemble_laplacian(1), std::invalid_argument);

    // DFT closed form at n = 4.
    const int n = 4;
    const auto lap = assemble_laplacian(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap.dense(), Eigen::EigenvaluesOnly);
    std::vector<double> closed;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            closed.push_back(double(n) * (4.0 - 2.0 * std::cos(2.0 * M_PI * j / n) -
                                          2.0 * std::cos(2.0 * M_PI * k / n)));
    std::sort(closed.begin(), closed.end());
    for (int i = 0; i < n * n; ++i)
        CHECK(std::abs(solver.eigenvalues()(i) - closed[std::size_t(i)]) <= 1e-12 * n * 8);
}

TEST_CASE("stochastic part: empty and full coverage") {
    const auto p = params(2, 4, {1, 4}, 0.5);
    const int n = p.grid_size();
    const auto empty = assemble_stochastic(field_from_cells(p, std::vector<std::uint8_t>(n * n, 0)));
    CHECK(empty.nonzeros() == 0);
    const auto full = assemble_stochastic(field_from_cells(p, std::vector<std::uint8_t>(n * n, 1)));
    CHECK(SparseOperator::max_entry_difference(full, assemble_laplacian(n)) <= 1e-12);
}

TEST_CASE("kronecker assembly equals the element-loop reference") {
    int cases = 0;
    for (const int L : {2, 4})
        for (const int m0 : {4, 8})
            for (const double lambda : {0.1, 0.5, 1.0})
                for (std::uint64_t seed = 1; seed <= 2; ++seed) {
                    const auto p = params(L, m0, {1, 4}, lambda);
                    const auto f = sample_field(p, seed, 1);
                    const auto total = assemble_total(f, lambda);
                    const auto ref = reference_assemble(f, lambda);
                    CHECK(SparseOperator::max_entry_difference(total, ref) <= 1e-12);
                    ++cases;
                }
    CHECK(cases == 24);

    // the stochastic part alone is the lambda = 0 slice of the reference
    const auto f = sample_field(params(2, 8, {1, 4}, 0.3), 9, 1);
    CHECK(SparseOperator::max_entry_difference(assemble_stochastic(f),
                                               reference_assemble(f, 0.0)) <= 1e-12);

    CHECK_THROWS_AS(reference_assemble(sample_field(params(32, 4, {1, 4}, 0.5), 1, 1), 0.5),
                    std::invalid_argument);
}

TEST_CASE("total assembly properties") {
    const auto p = params(2, 8, {1, 4}, 0.25);
    const auto f = sample_field(p, 3, 1);
    CHECK_THROWS_AS(assemble_total(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_total(f, 1.5), std::invalid_argument);

    const auto a1 = assemble_total(f, 1.0);
    CHECK(SparseOperator::max_entry_difference(a1, assemble_laplacian(p.grid_size())) == 0.0);

    const auto full = field_from_cells(p, std::vector<std::uint8_t>(f.cell_covered.size(), 1));
    CHECK(SparseOperator::max_entry_difference(assemble_total(full, 0.4),
                                               assemble_laplacian(p.grid_size())) <= 1e-12);

    const auto a = assemble_total(f, 0.25);
    CHECK(a.nonzeros() <= 9 * a.dim());
    const Vector ones = Vector::Ones(a.dim());
    CHECK(a.apply(ones).lpNorm<Eigen::Infinity>() <= 1e-12);
    // exact symmetry
    Eigen::MatrixXd dense = a.dense();
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // PSD on a small instance
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-10);
}

TEST_CASE("assembly working set is proportional to covered cells") {
    const auto p = params(4, 4, {1, 4}, 0.5);
    const auto f = sample_field(p, 17, 1);
    long covered = 0;
    for (const auto c : f.cell_covered) covered += c;
    const auto as = assemble_stochastic(f);
    CHECK(as.nonzeros() <= 12 * covered);
}

TEST_CASE("rhs: support, compatibility, quadrature oracle") {
    const auto p = params(2, 8, {1, 4}, 0.4);
    const double lambda = p.lambda;
    const int n = p.grid_size();
    const double h = 1.0 / n;

    SUBCASE("constant coefficients give zero load") {
        const auto empty = field_from_cells(p, std::vector<std::uint8_t>(n * n, 0));
        CHECK(assemble_rhs(empty, lambda, 1).values.norm() == 0.0);
        const auto full = field_from_cells(p, std::vector<std::uint8_t>(n * n, 1));
        CHECK(assemble_rhs(full, lambda, 2).values.norm() == 0.0);
    }

    SUBCASE("single inclusion: direction-1 load sits on vertical interface edges") {
        std::vector<std::uint8_t> cells(std::size_t(n) * n, 0);
        for (int i = 4; i < 8; ++i)
            for (int j = 4; j < 8; ++j) cells[std::size_t(i) * n + j] = 1;
        const auto f = assemble_rhs(field_from_cells(p, cells), lambda, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const bool on_interface = (i == 4 || i == 8) && (j >= 4 && j <= 8);
                if (!on_interface) CHECK(f.values[long(i) * n + j] == 0.0);
            }
        CHECK(f.values.cwiseAbs().maxCoeff() > 0.0);
    }

    SUBCASE("matches the per-element quadrature oracle") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const auto field = sample_field(p, seed, 1);
            for (const int dir : {1, 2}) {
                const auto rhs = assemble_rhs(field, lambda, dir);
                CHECK(std::abs(rhs.values.sum()) <= 1e-12 * rhs.values.norm());
                // independent evaluation: midpoint-in-transverse quadrature of
                // the bilinear hat gradients, cell by cell
                Vector oracle = Vector::Zero(long(n) * n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (!field.covered(i, j)) continue;
                        for (int a = 0; a < 2; ++a)
                            for (int b = 0; b < 2; ++b) {
                                const long v = long((i + a) % n) * n + (j + b) % n;
                                // d(psi_ab)/dx1 = (2a-1)/h * psi_b(transverse mid)
                                const double cell_int =
                                    dir == 1 ? (2 * a - 1) / h * 0.5 * h * h
                                             : (2 * b - 1) / h * 0.5 * h * h;
                                oracle[v] += -(1.0 - lambda) * cell_int / h;
                            }
                    }
                CHECK((rhs.values - oracle).lpNorm<Eigen::Infinity>() <= 1e-12);
            }
        }
    }

    CHECK_THROWS_AS(assemble_rhs(sample_field(p, 1, 1), lambda, 3), std::invalid_argument);
}

TEST_CASE("assembly is exactly equivariant under torus isometries") {
    const auto p = params(2, 8, {1, 4}, 0.3);
    const auto f = sample_field(p, 23, 1);
    const int n = p.grid_size();
    const auto a = assemble_total(f, p.lambda);

    for (const auto op : {SymmetryOp::translate(3, 5), SymmetryOp::rotate90(),
                          SymmetryOp::reflect_x1()}) {
        const auto g = transform_field(f, op);
        const auto b = assemble_total(g, p.lambda);
        const auto perm = vertex_permutation(op, n);
        // b[perm(r), perm(c)] must equal a[r, c] exactly
        double worst = 0;
        for (int r = 0; r < a.matrix().outerSize(); ++r)
            for (SparseOperator::Matrix::InnerIterator it(a.matrix(), r); it; ++it) {
                const double other =
                    b.entry(perm[std::size_t(it.row())], perm[std::size_t(it.col())]);
                worst = std::max(worst, std::abs(other - it.value()));
            }
        CHECK(worst == 0.0);
    }
}

TEST_CASE("scaled load from an analytic source") {
    const int n = 16;
    const auto load = load_from_function(n, [](double x, double y) {
        return std::sin(2 * M_PI * x) * std::cos(6 * M_PI * y);
    });
    CHECK(std::abs(load.sum()) <= 1e-12);
    CHECK(load.lpNorm<Eigen::Infinity>() <= 1.0 / n + 1e-12);
}
