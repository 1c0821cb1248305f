#include "rvehom/assembly.hpp"

#include <stdexcept>

namespace rvehom {

namespace {

inline int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

inline long vid(int i, int j, int n) { return long(wrap(i, n)) * n + wrap(j, n); }

// 1D periodic tridiagonal stiffness (1/h) * tridiag{-1, 2, -1} as triplets.
std::vector<Triplet> periodic_tridiagonal(int n, double scale) {
    std::vector<Triplet> t;
    t.reserve(std::size_t(n) * 3);
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0 * scale);
        t.emplace_back(i, wrap(i + 1, n), -scale);
        t.emplace_back(i, wrap(i - 1, n), -scale);
    }
    return t;
}

} // namespace

SparseOperator assemble_laplacian(int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("assemble_laplacian: grid size must be >= 2");
    const int n = grid_size;
    const double inv_h = double(n);

    const auto one_dim = periodic_tridiagonal(n, inv_h);
    std::vector<Triplet> t;
    t.reserve(one_dim.size() * std::size_t(2 * n));
    // T (x) I acts on the first coordinate, I (x) T on the second.
    for (const auto& e : one_dim) {
        for (int q = 0; q < n; ++q) {
            t.emplace_back(int(long(e.row()) * n + q), int(long(e.col()) * n + q), e.value());
            t.emplace_back(int(long(q) * n + e.row()), int(long(q) * n + e.col()), e.value());
        }
    }
    return SparseOperator::from_triplets(n, t);
}

SparseOperator assemble_stochastic(const CoefficientField& field) {
    const int n = field.grid_size();
    const double inv_h = double(n);

    // Minimal elementary cell: Q = [[1,-1],[-1,1]] (SPD convention) and the
    // lumped transverse factor I = diag(1/2, 1/2); the cell block is
    // (1/h) * (Q (x) I + I (x) Q).
    static constexpr double Q[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
    static constexpr double D[2] = {0.5, 0.5};

    std::vector<Triplet> t;
    std::size_t covered = 0;
    for (const auto c : field.cell_covered) covered += c;
    t.reserve(covered * 12);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!field.cell_covered[std::size_t(i) * n + j]) continue;
            const long v[2][2] = {{vid(i, j, n), vid(i, j + 1, n)},
                                  {vid(i + 1, j, n), vid(i + 1, j + 1, n)}};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d) {
                            double val = 0.0;
                            if (b == d) val += Q[a][c] * D[b];
                            if (a == c) val += D[a] * Q[b][d];
                            if (val != 0.0)
                                t.emplace_back(int(v[a][b]), int(v[c][d]), inv_h * val);
                        }
        }
    }
    return SparseOperator::from_triplets(n, t);
}

SparseOperator assemble_total(const CoefficientField& field, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("assemble_total: lambda must lie in (0, 1]");
    const SparseOperator laplace = assemble_laplacian(field.grid_size());
    const SparseOperator stochastic = assemble_stochastic(field);
    return SparseOperator::scaled_sum(lambda, laplace, 1.0 - lambda, stochastic);
}

Rhs assemble_rhs(const CoefficientField& field, double lambda, int direction) {
    if (direction != 1 && direction != 2)
        throw std::invalid_argument("assemble_rhs: direction must be 1 or 2");
    const int n = field.grid_size();
    const double half = 0.5 * (1.0 - lambda);

    Rhs rhs;
    rhs.direction = direction;
    rhs.values = Vector::Zero(long(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!field.cell_covered[std::size_t(i) * n + j]) continue;
            if (direction == 1) {
                // d(psi)/dx1 integrates to +h/2 on the right edge, -h/2 left.
                rhs.values[vid(i + 1, j, n)] -= half;
                rhs.values[vid(i + 1, j + 1, n)] -= half;
                rhs.values[vid(i, j, n)] += half;
                rhs.values[vid(i, j + 1, n)] += half;
            } else {
                rhs.values[vid(i, j + 1, n)] -= half;
                rhs.values[vid(i + 1, j + 1, n)] -= half;
                rhs.values[vid(i, j, n)] += half;
                rhs.values[vid(i + 1, j, n)] += half;
            }
        }
    }
    return rhs;
}

SparseOperator reference_assemble(const CoefficientField& field, double lambda) {
    const int n = field.grid_size();
    if (n > 64) throw std::invalid_argument("reference_assemble: oracle limited to n <= 64");
    const double h = 1.0 / n;

    // 1D factor integrals over one interval, from explicit quadrature of the
    // two local hat functions psi_0(x) = 1 - x/h, psi_1(x) = x/h:
    //   grad[a][c] = midpoint rule for psi_a' * psi_c'  (exact, constant)
    //   mass[a][c] = trapezoid rule for psi_a * psi_c   (the lumped factor)
    double grad[2][2], mass[2][2];
    const auto psi = [h](int a, double x) { return a == 0 ? 1.0 - x / h : x / h; };
    const auto dpsi = [h](int a) { return a == 0 ? -1.0 / h : 1.0 / h; };
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            grad[a][c] = h * dpsi(a) * dpsi(c);
            mass[a][c] = 0.5 * h * (psi(a, 0.0) * psi(c, 0.0) + psi(a, h) * psi(c, h));
        }

    const double inv_h = double(n);
    std::vector<Triplet> t;
    t.reserve(std::size_t(n) * n * 16);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a_cell =
                lambda + (1.0 - lambda) * field.cell_covered[std::size_t(i) * n + j];
            if (a_cell == 0.0) continue;
            const long v[2][2] = {{vid(i, j, n), vid(i, j + 1, n)},
                                  {vid(i + 1, j, n), vid(i + 1, j + 1, n)}};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d) {
                            const double val =
                                grad[a][c] * mass[b][d] + mass[a][c] * grad[b][d];
                            if (val != 0.0)
                                t.emplace_back(int(v[a][b]), int(v[c][d]),
                                               inv_h * a_cell * val);
                        }
        }
    }
    return SparseOperator::from_triplets(n, t);
}

Vector load_from_function(int grid_size, const std::function<double(double, double)>& f) {
    const int n = grid_size;
    const double h = 1.0 / n;
    Vector load(long(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) load[long(i) * n + j] = h * f(i * h, j * h);
    load.array() -= load.mean();
    return load;
}

} // namespace rvehom
