#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvehom/field.hpp"

using namespace rvehom;

namespace {

EnsembleParams params(int L, int m0, Rational alpha, double lambda = 0.4) {
    EnsembleParams p;
    p.L = L;
    p.m0 = m0;
    p.alpha = alpha;
    p.lambda = lambda;
    return p;
}

double covered_fraction(const CoefficientField& f) {
    double c = 0;
    for (const auto v : f.cell_covered) c += v;
    return c / double(f.cell_covered.size());
}

} // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(params(0, 4, {1, 4}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(2, 3, {1, 4}).validate(), std::invalid_argument);   // not a power of two
    CHECK_THROWS_AS(params(2, 4, {3, 4}).validate(), std::invalid_argument);   // alpha > 1/2
    CHECK_THROWS_AS(params(2, 4, {1, 16}).validate(), std::invalid_argument);  // alpha*m0 < 1
    CHECK_THROWS_AS(params(2, 8, {1, 3}).validate(), std::invalid_argument);   // not grid aligned
    auto bad_lambda = params(2, 4, {1, 4});
    bad_lambda.lambda = 0.0;
    CHECK_THROWS_AS(bad_lambda.validate(), std::invalid_argument);
    CHECK_NOTHROW(params(2, 4, {1, 2}).validate());
    CHECK(params(2, 8, {1, 4}).inclusion_cells() == 4);
}

TEST_CASE("full-period inclusion covers the torus") {
    const auto f = sample_field(params(1, 4, {1, 2}), 12345, 1);
    for (const auto c : f.cell_covered) CHECK(c == 1);
    for (const double w : f.vertex_weight) CHECK(w == 1.0);
}

TEST_CASE("center count and determinism") {
    const auto p = params(8, 4, {1, 4});
    const auto f1 = sample_field(p, 7, 3);
    const auto f2 = sample_field(p, 7, 3);
    CHECK(f1.centers.size() == 64);
    CHECK(f1.centers == f2.centers);
    CHECK(f1.cell_covered == f2.cell_covered);
    CHECK(f1.vertex_weight == f2.vertex_weight);
    CHECK_THROWS_AS(sample_field(p, 7, 0), std::invalid_argument);
}

TEST_CASE("distinct indices use distinct streams") {
    const auto p = params(4, 4, {1, 4});
    const auto f1 = sample_field(p, 7, 1);
    const auto f2 = sample_field(p, 7, 2);
    CHECK(f1.rng_key != f2.rng_key);
    CHECK(f1.rng_draws == 2 * 16);  // two coordinates per center
    CHECK(f2.rng_draws == 2 * 16);
}

TEST_CASE("vertex weights equal incident covered-cell fraction") {
    const auto f = sample_field(params(4, 8, {1, 4}), 99, 2);
    const int n = f.grid_size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int count = 0;
            count += f.covered(i - 1, j - 1);
            count += f.covered(i - 1, j);
            count += f.covered(i, j - 1);
            count += f.covered(i, j);
            CHECK(f.weight(i, j) == count / 4.0);
        }
}

TEST_CASE("coefficient on grid maps weights affinely") {
    auto p = params(2, 4, {1, 4}, 0.4);
    auto f = sample_field(p, 5, 1);
    const auto a = coefficient_on_grid(f);
    for (std::size_t v = 0; v < a.size(); ++v) {
        CHECK(a[v] == 0.4 + 0.6 * f.vertex_weight[v]);
        CHECK(a[v] >= 0.4);
        CHECK(a[v] <= 1.0);
    }
    // interface vertex value 1/2 -> coefficient 0.7
    const auto stripes = stripe_field(p, 0, 0.5);
    bool found_half = false;
    for (std::size_t v = 0; v < stripes.vertex_weight.size(); ++v)
        if (stripes.vertex_weight[v] == 0.5) {
            found_half = true;
            CHECK(coefficient_on_grid(stripes)[v] == doctest::Approx(0.7).epsilon(1e-15));
        }
    CHECK(found_half);
}

TEST_CASE("coverage probability matches the closed form") {
    // 1 - (1 - k^2/n^2)^(L^2) with L=8, m0=4, alpha=1/4.
    const auto p = params(8, 4, {1, 4});
    const double expected = 1.0 - std::pow(1.0 - 4.0 / 1024.0, 64.0);
    const int samples = 10000;
    double mean = 0, sq = 0;
    for (int s = 1; s <= samples; ++s) {
        const double c = covered_fraction(sample_field(p, 2468, s));
        mean += c;
        sq += c * c;
    }
    mean /= samples;
    const double var = (sq / samples - mean * mean) / double(samples - 1);
    const double se = std::sqrt(var);
    CHECK(std::abs(mean - expected) <= 3 * se);
}

TEST_CASE("coverage is monotone in alpha") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto small = sample_field(params(4, 8, {1, 8}), seed, 1);
        const auto mid = sample_field(params(4, 8, {1, 4}), seed, 1);
        const auto big = sample_field(params(4, 8, {1, 2}), seed, 1);
        REQUIRE(small.centers == mid.centers);
        REQUIRE(mid.centers == big.centers);
        for (std::size_t c = 0; c < small.cell_covered.size(); ++c) {
            CHECK(small.cell_covered[c] <= mid.cell_covered[c]);
            CHECK(mid.cell_covered[c] <= big.cell_covered[c]);
        }
    }
}

TEST_CASE("symmetry transforms") {
    const auto f = sample_field(params(4, 4, {1, 4}), 11, 1);
    const int n = f.grid_size();

    SUBCASE("identity and full-period translation") {
        const auto id = transform_field(f, SymmetryOp::identity());
        CHECK(id.cell_covered == f.cell_covered);
        const auto full = transform_field(f, SymmetryOp::translate(n, 0));
        CHECK(full.cell_covered == f.cell_covered);
        CHECK(full.centers == f.centers);
    }
    SUBCASE("four quarter turns compose to the identity") {
        auto g = f;
        for (int r = 0; r < 4; ++r) g = transform_field(g, SymmetryOp::rotate90());
        CHECK(g.cell_covered == f.cell_covered);
        CHECK(g.centers == f.centers);
        CHECK(g.vertex_weight == f.vertex_weight);
    }
    SUBCASE("reflections are involutions") {
        for (const auto op : {SymmetryOp::reflect_x1(), SymmetryOp::reflect_x2(),
                              SymmetryOp::swap_axes()}) {
            const auto g = transform_field(transform_field(f, op), op);
            CHECK(g.cell_covered == f.cell_covered);
        }
    }
    SUBCASE("transforms preserve coverage and recompute weights consistently") {
        const auto g = transform_field(f, SymmetryOp::rotate90());
        CHECK(covered_fraction(g) == covered_fraction(f));
        CHECK(g.vertex_weight == vertex_weights_from_cells(n, g.cell_covered));
    }
}

TEST_CASE("refinement replicates the geometry") {
    const auto f = sample_field(params(2, 4, {1, 4}), 21, 1);
    const auto g = refine_field(f, 2);
    const int n = f.grid_size();
    CHECK(g.grid_size() == 4 * n);
    CHECK(g.params.inclusion_cells() == 4 * f.params.inclusion_cells());
    for (int i = 0; i < 4 * n; ++i)
        for (int j = 0; j < 4 * n; ++j)
            CHECK(g.covered(i, j) == f.covered(i / 4, j / 4));
    CHECK(covered_fraction(g) == covered_fraction(f));
}

TEST_CASE("stripe field geometry") {
    const auto f = stripe_field(params(4, 4, {1, 4}), 0, 0.5);
    const int n = f.grid_size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(f.covered(i, j) == (i < n / 2));
}
