#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rvehom/homogenize.hpp"
#include "rvehom/spectral.hpp"

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

} // namespace

TEST_CASE("laplacian spectrum matches the DFT closed form") {
    const int n = 4;
    const auto eigs = dense_eigenvalues(assemble_laplacian(n));
    std::vector<double> closed;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            closed.push_back(double(n) * (4.0 - 2.0 * std::cos(2.0 * M_PI * j / n) -
                                          2.0 * std::cos(2.0 * M_PI * k / n)));
    std::sort(closed.begin(), closed.end());
    REQUIRE(eigs.size() == closed.size());
    for (std::size_t i = 0; i < eigs.size(); ++i)
        CHECK(std::abs(eigs[i] - closed[i]) <= 1e-10);
    CHECK(std::is_sorted(eigs.begin(), eigs.end()));
}

TEST_CASE("zero is a simple eigenvalue and the spectrum is nonnegative") {
    const auto p = params(2, 8, {1, 4}, 0.5);
    for (std::uint64_t seed : {1ull, 9ull}) {
        const auto a = assemble_total(sample_field(p, seed, 1), p.lambda);
        const auto eigs = dense_eigenvalues(a);
        CHECK(std::abs(eigs[0]) <= 1e-10);
        CHECK(eigs[1] > 1e-6);  // multiplicity of zero is exactly one
    }
}

TEST_CASE("dense path refuses large operators") {
    EnsembleParams p = params(32, 4, {1, 4}, 0.5);  // n = 128, M = 16384
    const auto a = assemble_total(sample_field(p, 1, 1), p.lambda);
    CHECK_THROWS_AS(dense_eigenvalues(a), std::invalid_argument);
}

TEST_CASE("gaussian broadening basics") {
    SUBCASE("single eigenvalue peak height") {
        const double eta = 0.05;
        const auto grid = dos_grid(0.0, 0.0, eta, 961);
        const auto curve = dos_curve({0.0}, eta, grid);
        // the grid contains t = 0 (odd point count, symmetric interval)
        const double peak = *std::max_element(curve.values.begin(), curve.values.end());
        CHECK(peak == doctest::Approx(1.0 / (std::sqrt(2 * M_PI) * eta)).epsilon(1e-9));
    }
    SUBCASE("halving eta doubles isolated peaks") {
        const double eta = 0.05;
        const auto grid1 = dos_grid(0.0, 1.0, eta, 2001);
        const auto grid2 = dos_grid(0.0, 1.0, 0.5 * eta, 4001);
        const auto c1 = dos_curve({0.0, 1.0}, eta, grid1);
        const auto c2 = dos_curve({0.0, 1.0}, 0.5 * eta, grid2);
        const double p1 = *std::max_element(c1.values.begin(), c1.values.end());
        const double p2 = *std::max_element(c2.values.begin(), c2.values.end());
        CHECK(p2 / p1 == doctest::Approx(2.0).epsilon(1e-3));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(dos_curve({0.0}, 0.0, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(dos_curve({0.0, 5.0}, 0.1, dos_grid(0.0, 1.0, 0.1)),
                        std::invalid_argument);
        CHECK_THROWS_AS(default_broadening({1.0, 1.0}), std::invalid_argument);
    }
}

TEST_CASE("dos curves integrate to one") {
    const auto p = params(2, 8, {1, 4}, 0.5);
    const auto a = assemble_total(sample_field(p, 4, 1), p.lambda);
    const auto eigs = dense_eigenvalues(a);
    const double eta = default_broadening(eigs);
    CHECK(eta == doctest::Approx(0.02 * (eigs.back() - eigs.front())).epsilon(1e-12));
    const auto curve = dos_curve(eigs, eta, dos_grid(eigs.front(), eigs.back(), eta));
    CHECK(std::abs(curve.integral() - 1.0) <= 1e-6);
    CHECK(curve.m == a.dim());
}

TEST_CASE("mean-coefficient operator has a visibly different DOS") {
    const auto p = params(2, 8, {1, 4}, 0.5);
    std::vector<std::vector<double>> spectra;
    double lo = 1e300, hi = -1e300;
    double mean_coefficient = 0;
    for (int i = 1; i <= 20; ++i) {
        const auto field = sample_field(p, 808, i);
        const auto a = assemble_total(field, p.lambda);
        spectra.push_back(dense_eigenvalues(a));
        lo = std::min(lo, spectra.back().front());
        hi = std::max(hi, spectra.back().back());
        const auto c = solve_correctors(field, p.lambda, 1e-8);
        const auto hom = homogenized_matrix(field, c, p.lambda);
        mean_coefficient += 0.5 * (hom.a11 + hom.a22) / 20.0;
    }
    const auto lap = assemble_laplacian(p.grid_size());
    const auto hom_op = SparseOperator::scaled_sum(mean_coefficient, lap, 0.0, lap);
    const auto hom_eigs = dense_eigenvalues(hom_op);
    lo = std::min(lo, hom_eigs.front());
    hi = std::max(hi, hom_eigs.back());

    const double eta = 0.02 * (hi - lo);
    const auto grid = dos_grid(lo, hi, eta);
    std::vector<DosCurve> curves;
    for (const auto& s : spectra) curves.push_back(dos_curve(s, eta, grid));
    const auto avg = average_dos(curves);
    const auto hom_curve = dos_curve(hom_eigs, eta, grid);
    CHECK(dos_l2_distance(avg, hom_curve) > dos_scatter(curves, avg));
}

TEST_CASE("ensemble clustering: batch averages scatter less than single curves") {
    const auto p = params(2, 8, {1, 4}, 0.5);
    std::vector<std::vector<double>> spectra;
    double lo = 1e300, hi = -1e300;
    for (int i = 1; i <= 20; ++i) {
        const auto a = assemble_total(sample_field(p, 31415, i), p.lambda);
        spectra.push_back(dense_eigenvalues(a));
        lo = std::min(lo, spectra.back().front());
        hi = std::max(hi, spectra.back().back());
    }
    const double eta = 0.02 * (hi - lo);
    const auto grid = dos_grid(lo, hi, eta);
    std::vector<DosCurve> curves;
    for (const auto& s : spectra) curves.push_back(dos_curve(s, eta, grid));
    const auto avg = average_dos(curves);
    const double single_scatter = dos_scatter(curves, avg);
    CHECK(single_scatter > 0.0);
    CHECK(std::isfinite(single_scatter));

    std::vector<DosCurve> batches;
    for (int b = 0; b < 4; ++b)
        batches.push_back(average_dos({curves[std::size_t(5 * b)], curves[std::size_t(5 * b + 1)],
                                       curves[std::size_t(5 * b + 2)],
                                       curves[std::size_t(5 * b + 3)],
                                       curves[std::size_t(5 * b + 4)]}));
    CHECK(dos_scatter(batches, avg) < single_scatter);
}
