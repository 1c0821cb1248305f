#include "rvehom/homogenize.hpp"

#include <cmath>
#include <stdexcept>

namespace rvehom {

namespace {

inline int wrap(int i, int n) { return i == n ? 0 : i; }

// Cell integrals of the bilinear interpolant's gradient components,
// divided by h^2 (midpoint rule in the transverse variable, exact here).
struct CellGradient {
    double gx, gy;
};

template <typename F>
void for_each_cell(const CoefficientField& field, double lambda, F&& f) {
    const int n = field.grid_size();
    for (int i = 0; i < n; ++i) {
        const int ip = wrap(i + 1, n);
        for (int j = 0; j < n; ++j) {
            const int jp = wrap(j + 1, n);
            const double a_cell =
                lambda + (1.0 - lambda) * field.cell_covered[std::size_t(i) * n + j];
            f(long(i) * n + j, long(ip) * n + j, long(i) * n + jp, long(ip) * n + jp, a_cell);
        }
    }
}

} // namespace

CorrectorPair solve_correctors(const CoefficientField& field, double lambda, double tol,
                               const Preconditioner* shared, int max_iter) {
    const SparseOperator a = assemble_total(field, lambda);
    const Rhs f1 = assemble_rhs(field, lambda, 1);
    const Rhs f2 = assemble_rhs(field, lambda, 2);

    CorrectorPair pair;
    if (shared != nullptr) {
        auto [u1, r1] = pcg_solve(a, *shared, f1, tol, max_iter);
        auto [u2, r2] = pcg_solve(a, *shared, f2, tol, max_iter);
        pair = {std::move(u1), std::move(u2), std::move(r1), std::move(r2)};
    } else {
        const Preconditioner local(field.grid_size(), lambda);
        auto [u1, r1] = pcg_solve(a, local, f1, tol, max_iter);
        auto [u2, r2] = pcg_solve(a, local, f2, tol, max_iter);
        pair = {std::move(u1), std::move(u2), std::move(r1), std::move(r2)};
    }
    return pair;
}

HomogenizedMatrix homogenized_matrix(const CoefficientField& field,
                                     const CorrectorPair& correctors, double lambda) {
    const int n = field.grid_size();
    const double h = 1.0 / n;
    const double cell_area = h * h;
    const Vector& u1 = correctors.phi1;
    const Vector& u2 = correctors.phi2;

    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    for_each_cell(field, lambda,
                  [&](long v00, long v10, long v01, long v11, double a_cell) {
        const double gx1 = 0.5 * h * ((u1[v10] - u1[v00]) + (u1[v11] - u1[v01]));
        const double gy1 = 0.5 * h * ((u1[v01] - u1[v00]) + (u1[v11] - u1[v10]));
        const double gx2 = 0.5 * h * ((u2[v10] - u2[v00]) + (u2[v11] - u2[v01]));
        const double gy2 = 0.5 * h * ((u2[v01] - u2[v00]) + (u2[v11] - u2[v10]));
        a11 += a_cell * (cell_area + gx1);
        a12 += a_cell * gy1;
        a21 += a_cell * gx2;
        a22 += a_cell * (cell_area + gy2);
    });

    HomogenizedMatrix result;
    result.a11 = a11;
    result.a12 = a12;
    result.a21 = a21;
    result.a22 = a22;
    result.realization_index = field.realization_index;
    result.iterations_total = correctors.report1.iterations + correctors.report2.iterations;
    return result;
}

Eigen::Matrix2d energy_matrix(const CoefficientField& field, const CorrectorPair& correctors,
                              double lambda) {
    const int n = field.grid_size();
    const double h = 1.0 / n;
    const double cell_area = h * h;
    const Vector* u[2] = {&correctors.phi1, &correctors.phi2};

    double coeff_mass = 0.0;
    Eigen::Matrix2d flux = Eigen::Matrix2d::Zero();  // flux(i,j) = integral a d(phi_i)/dx_j
    for_each_cell(field, lambda,
                  [&](long v00, long v10, long v01, long v11, double a_cell) {
        coeff_mass += a_cell * cell_area;
        for (int i = 0; i < 2; ++i) {
            const Vector& ui = *u[i];
            flux(i, 0) += a_cell * 0.5 * h * ((ui[v10] - ui[v00]) + (ui[v11] - ui[v01]));
            flux(i, 1) += a_cell * 0.5 * h * ((ui[v01] - ui[v00]) + (ui[v11] - ui[v10]));
        }
    });

    const SparseOperator a_op = assemble_total(field, lambda);
    Eigen::Matrix2d e;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double grad_grad = h * u[i]->dot(a_op.apply(*u[j]));
            e(i, j) = (i == j ? coeff_mass : 0.0) + flux(i, j) + flux(j, i) + grad_grad;
        }
    return e;
}

Vector prolongate_bilinear(const Vector& coarse, int grid_size) {
    const int n = grid_size;
    if (coarse.size() != long(n) * n)
        throw std::invalid_argument("prolongate: size mismatch");
    const int f = 2 * n;
    Vector fine(long(f) * f);
    for (int i = 0; i < n; ++i) {
        const int ip = wrap(i + 1, n);
        for (int j = 0; j < n; ++j) {
            const int jp = wrap(j + 1, n);
            const double c00 = coarse[long(i) * n + j];
            const double c10 = coarse[long(ip) * n + j];
            const double c01 = coarse[long(i) * n + jp];
            const double c11 = coarse[long(ip) * n + jp];
            fine[long(2 * i) * f + 2 * j] = c00;
            fine[long(2 * i + 1) * f + 2 * j] = 0.5 * (c00 + c10);
            fine[long(2 * i) * f + 2 * j + 1] = 0.5 * (c00 + c01);
            fine[long(2 * i + 1) * f + 2 * j + 1] = 0.25 * (c00 + c10 + c01 + c11);
        }
    }
    return fine;
}

double refinement_default_rhs(double x, double y) {
    return std::sin(2.0 * M_PI * x) * std::cos(6.0 * M_PI * y);
}

std::vector<RefinementRow> refinement_study(const EnsembleParams& base, std::uint64_t seed,
                                            const std::vector<int>& grid_list,
                                            const std::function<double(double, double)>& rhs,
                                            double tol) {
    base.validate();
    if (grid_list.size() < 2)
        throw std::invalid_argument("refinement_study: need at least two grids");
    const int n0 = base.grid_size();
    for (std::size_t p = 0; p < grid_list.size(); ++p) {
        const int g = grid_list[p];
        if (p > 0 && g != 2 * grid_list[p - 1])
            throw std::invalid_argument("refinement_study: grids must be dyadically nested");
        int q = g;
        while (q > n0 && q % 2 == 0) q /= 2;
        if (q != n0)
            throw std::invalid_argument("refinement_study: grids must refine the base grid");
    }

    const CoefficientField base_field = sample_field(base, seed, 1);

    std::vector<RefinementRow> rows;
    Vector prev;
    int prev_n = 0;
    for (std::size_t p = 0; p < grid_list.size(); ++p) {
        const int g = grid_list[p];
        int levels = 0;
        for (int q = g; q > n0; q /= 2) ++levels;
        const CoefficientField field = refine_field(base_field, levels);

        const SparseOperator a = assemble_total(field, base.lambda);
        const Vector load = load_from_function(g, rhs);
        const Preconditioner precond(g, base.lambda);
        auto [u, report] = pcg_solve(a, precond, load, tol, 400);
        if (!report.converged)
            throw std::runtime_error("refinement_study: solver did not converge");

        if (p > 0) {
            const Vector injected = prolongate_bilinear(prev, prev_n);
            RefinementRow row;
            row.level = levels;
            row.grid_size = g;
            row.rel_diff = (u - injected).norm() / injected.norm();
            rows.push_back(row);
        }
        prev = std::move(u);
        prev_n = g;
    }
    return rows;
}

} // namespace rvehom
