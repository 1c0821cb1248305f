#include "rvehom/sparse.hpp"

#include <stdexcept>

namespace rvehom {

SparseOperator SparseOperator::from_triplets(int grid_size, const std::vector<Triplet>& entries) {
    if (grid_size < 2) throw std::invalid_argument("SparseOperator: grid size must be >= 2");
    SparseOperator op;
    op.n_ = grid_size;
    const long m = long(grid_size) * grid_size;
    op.mat_.resize(m, m);
    op.mat_.setFromTriplets(entries.begin(), entries.end());
    op.mat_.makeCompressed();
    return op;
}

SparseOperator SparseOperator::scaled_sum(double a, const SparseOperator& A, double b,
                                          const SparseOperator& B) {
    if (A.n_ != B.n_) throw std::invalid_argument("scaled_sum: dimension mismatch");
    SparseOperator out;
    out.n_ = A.n_;
    out.mat_ = a * A.mat_ + b * B.mat_;
    out.mat_.makeCompressed();
    return out;
}

double SparseOperator::max_entry_difference(const SparseOperator& A, const SparseOperator& B) {
    if (A.dim() != B.dim()) throw std::invalid_argument("max_entry_difference: dimension mismatch");
    Matrix diff = A.mat_ - B.mat_;
    double worst = 0.0;
    for (int r = 0; r < diff.outerSize(); ++r)
        for (Matrix::InnerIterator it(diff, r); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

} // namespace rvehom
