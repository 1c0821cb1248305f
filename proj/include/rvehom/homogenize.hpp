#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rvehom/assembly.hpp"
#include "rvehom/solver.hpp"

namespace rvehom {

struct CorrectorPair {
    Vector phi1, phi2;
    SolveReport report1, report2;
    bool converged() const { return report1.converged && report2.converged; }
};

/// Per-realization averaged coefficient matrix plus solver diagnostics.
struct HomogenizedMatrix {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    int realization_index = 0;
    int iterations_total = 0;

    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d m;
        m << a11, a12, a21, a22;
        return m;
    }
};

/// Solves the two corrector problems for one realization. A shared
/// preconditioner for the same (n, lambda) may be passed in; otherwise one is
/// built on the fly.
CorrectorPair solve_correctors(const CoefficientField& field, double lambda, double tol,
                               const Preconditioner* shared = nullptr, int max_iter = 200);

/// Flux averages a_ij = integral of a * (d(phi_i)/dx_j + delta_ij), evaluated
/// with the per-cell midpoint quadrature matching the assembly, so the
/// off-diagonal symmetry holds up to the solver residual.
HomogenizedMatrix homogenized_matrix(const CoefficientField& field,
                                     const CorrectorPair& correctors, double lambda);

/// Energy-form route integral (e_j + grad phi_j) . a (e_i + grad phi_i) with
/// the assembly quadrature; agrees with the flux route up to solver residual.
Eigen::Matrix2d energy_matrix(const CoefficientField& field, const CorrectorPair& correctors,
                              double lambda);

/// Bilinear interpolation from an n x n periodic grid to 2n x 2n.
Vector prolongate_bilinear(const Vector& coarse, int grid_size);

struct RefinementRow {
    int level = 0;      // dyadic refinements applied to the base grid
    int grid_size = 0;  // intervals per dimension
    double rel_diff = 0;  // ||u_p - I(u_{p-1})||_2 / ||I(u_{p-1})||_2 on the fine grid
};

/// Solves one fixed coefficient configuration with an analytic source on a
/// dyadically nested grid sequence and reports successive relative
/// differences (coarse solutions injected by bilinear interpolation).
std::vector<RefinementRow> refinement_study(const EnsembleParams& base, std::uint64_t seed,
                                            const std::vector<int>& grid_list,
                                            const std::function<double(double, double)>& rhs,
                                            double tol = 1e-10);

/// Default manufactured source sin(2 pi x) cos(6 pi y).
double refinement_default_rhs(double x, double y);

} // namespace rvehom
