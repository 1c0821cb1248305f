#pragma once

#include <functional>

#include "rvehom/field.hpp"
#include "rvehom/sparse.hpp"

namespace rvehom {

/// Stiffness assembly on the wrapped periodic grid.
///
/// Scaling convention: every operator carries the 1/h factor of the 1D
/// stiffness matrices, i.e. the constant-coefficient operator has DFT
/// eigenvalues (1/h)*(4 - 2cos(2*pi*j/n) - 2cos(2*pi*k/n)). Loads follow the
/// same convention (h * f at a vertex instead of h^2 * f), so solutions are
/// independent of it.

/// Periodic 5-point Laplacian in SPD convention, built as the Kronecker sum
/// of 1D periodic tridiagonal stiffness matrices.
SparseOperator assemble_laplacian(int grid_size);

/// Coefficient-one stiffness of the covered region, agglomerated from the
/// per-cell Kronecker blocks Q x I + I x Q over the minimal non-overlapping
/// cell decomposition (one block per covered fine cell).
SparseOperator assemble_stochastic(const CoefficientField& field);

/// lambda * Laplacian + (1 - lambda) * stochastic part.
SparseOperator assemble_total(const CoefficientField& field, double lambda);

/// Variational right-hand side f_mu = -(1 - lambda) * sum over covered cells
/// of the cell integral of d(psi_mu)/dx_i, midpoint quadrature in the
/// transverse variable (identical to the stiffness quadrature).
Rhs assemble_rhs(const CoefficientField& field, double lambda, int direction);

/// Element-loop oracle: accumulates the exact 4x4 local bilinear-form block
/// (lumped transverse mass) weighted by the per-cell coefficient value. No
/// Kronecker shortcuts; deliberately limited to small grids.
SparseOperator reference_assemble(const CoefficientField& field, double lambda);

/// Lumped nodal load for an analytic mean-zero source, in the same scaling
/// convention as the stiffness matrices.
Vector load_from_function(int grid_size, const std::function<double(double, double)>& f);

} // namespace rvehom
