#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "rvehom/sparse.hpp"

namespace rvehom {

struct SolveReport {
    int iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;  // relative preconditioned norms, starts at 1
};

/// Constant-coefficient preconditioner B = ((1+lambda)/2) * Laplacian + delta*I.
///
/// The spectral mode applies B^{-1} by 2D Fourier diagonalization in
/// O(M log M); with delta = 0 the constant mode is projected out, so the
/// apply acts as the pseudo-inverse on the mean-zero subspace. The factorized
/// mode solves the bordered system [[B, 1], [1^T, 0]] with a cached sparse LU
/// and has the identical contract. Instances are immutable and safe to share
/// across threads.
class Preconditioner {
public:
    enum class Mode { spectral, factorized };

    Preconditioner(int grid_size, double lambda, double delta = 0.0,
                   Mode mode = Mode::spectral);
    ~Preconditioner();

    Preconditioner(const Preconditioner&) = delete;
    Preconditioner& operator=(const Preconditioner&) = delete;

    Vector apply(const Vector& r) const;

    int grid_size() const { return n_; }
    double contrast() const { return lambda_; }
    double shift() const { return delta_; }
    Mode mode() const { return mode_; }
    /// Periodic-Laplacian eigenvalues scaled by (1+lambda)/2, plus the shift.
    const std::vector<double>& spectrum() const { return eigenvalues_; }

private:
    struct Impl;

    int n_;
    double lambda_;
    double delta_;
    Mode mode_;
    std::vector<double> eigenvalues_;
    std::unique_ptr<Impl> impl_;
};

/// Preconditioned conjugate gradients on the mean-zero subspace. Stops when
/// the relative preconditioned residual drops below tol; exceeding max_iter
/// is reported, not fatal. Throws std::invalid_argument for incompatible f
/// (|<f,1>| > 1e-10 * ||f||) and std::runtime_error on breakdown.
std::pair<Vector, SolveReport> pcg_solve(const SparseOperator& A, const Preconditioner& P,
                                         const Vector& f, double tol, int max_iter = 200);
std::pair<Vector, SolveReport> pcg_solve(const SparseOperator& A, const Preconditioner& P,
                                         const Rhs& f, double tol, int max_iter = 200);

/// Extreme eigenvalues of B^{-1} A on the mean-zero subspace; dense solve for
/// small grids, Lanczos estimation otherwise.
std::pair<double, double> extreme_generalized_eigs(const SparseOperator& A,
                                                   const Preconditioner& P);

/// Lanczos estimate with full reorthogonalization in the B-inner product
/// (exposed separately so the two paths can be cross-checked).
std::pair<double, double> extreme_generalized_eigs_lanczos(const SparseOperator& A,
                                                           const Preconditioner& P,
                                                           int steps = 80);

} // namespace rvehom
