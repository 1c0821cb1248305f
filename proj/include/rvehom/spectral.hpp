#pragma once

#include <vector>

#include "rvehom/sparse.hpp"

namespace rvehom {

/// All eigenvalues of the symmetric operator, ascending. Dense path only;
/// refuses dimensions above 4096.
std::vector<double> dense_eigenvalues(const SparseOperator& op);

/// Gaussian-broadened density of states phi_eta(t) = (1/m) sum_j g_eta(t - lambda_j).
struct DosCurve {
    std::vector<double> t_grid;
    std::vector<double> values;
    double eta = 0;
    long m = 0;

    /// Trapezoid integral over the t grid.
    double integral() const;
};

DosCurve dos_curve(const std::vector<double>& eigenvalues, double eta,
                   const std::vector<double>& t_grid);

/// Uniform grid over [min - 6 eta, max + 6 eta].
std::vector<double> dos_grid(double eig_min, double eig_max, double eta, int points = 1024);

/// Default broadening: 2% of the spectral width.
double default_broadening(const std::vector<double>& eigenvalues);

/// Pointwise average of curves sharing one t grid.
DosCurve average_dos(const std::vector<DosCurve>& curves);

/// L2 distance between two curves on the same grid (trapezoid quadrature).
double dos_l2_distance(const DosCurve& a, const DosCurve& b);

/// Root-mean-square L2 deviation of the curves from their average.
double dos_scatter(const std::vector<DosCurve>& curves, const DosCurve& average);

} // namespace rvehom
