#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace rvehom {

using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

/// Symmetric sparse operator over the n x n periodic grid, compressed
/// row-major with exact duplicate summation at build time.
class SparseOperator {
public:
    using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseOperator() = default;

    static SparseOperator from_triplets(int grid_size, const std::vector<Triplet>& entries);

    int grid_size() const { return n_; }
    long dim() const { return long(mat_.rows()); }
    long nonzeros() const { return long(mat_.nonZeros()); }

    /// Stored value at (row, col), zero when the position is not stored.
    double entry(long row, long col) const { return mat_.coeff(row, col); }

    Vector apply(const Vector& x) const { return mat_ * x; }

    const Matrix& matrix() const { return mat_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat_); }

    /// Entrywise a*A + b*B over the union pattern.
    static SparseOperator scaled_sum(double a, const SparseOperator& A, double b,
                                     const SparseOperator& B);

    /// max |A_ij - B_ij| over the union pattern.
    static double max_entry_difference(const SparseOperator& A, const SparseOperator& B);

private:
    int n_ = 0;
    Matrix mat_;
};

/// Variational right-hand side for one coordinate direction.
struct Rhs {
    Vector values;
    int direction = 1;  // 1 or 2
};

} // namespace rvehom
