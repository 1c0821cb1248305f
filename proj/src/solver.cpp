#include "rvehom/solver.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "rvehom/assembly.hpp"
#include "rvehom/rng.hpp"

namespace rvehom {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution on distinct
// buffers is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct Scratch {
    int n = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;

    ~Scratch() { release(); }

    void release() {
        if (in) fftw_free(in);
        if (out) fftw_free(out);
        in = out = nullptr;
        n = 0;
    }

    void ensure(int grid) {
        if (n == grid) return;
        release();
        n = grid;
        const std::size_t m = std::size_t(grid) * grid;
        in = fftw_alloc_complex(m);
        out = fftw_alloc_complex(m);
    }
};

thread_local Scratch tls_scratch;

Eigen::SparseMatrix<double> shifted_laplacian(int n, double lambda, double delta) {
    const double scale = 0.5 * (1.0 + lambda);
    SparseOperator lap = assemble_laplacian(n);
    Eigen::SparseMatrix<double> b = scale * lap.matrix();
    if (delta != 0.0) {
        Eigen::SparseMatrix<double> eye(b.rows(), b.cols());
        eye.setIdentity();
        b += delta * eye;
    }
    return b;
}

} // namespace

struct Preconditioner::Impl {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* canary_in = nullptr;   // alignment/layout reference for the plans
    fftw_complex* canary_out = nullptr;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (canary_in) fftw_free(canary_in);
        if (canary_out) fftw_free(canary_out);
    }
};

Preconditioner::Preconditioner(int grid_size, double lambda, double delta, Mode mode)
    : n_(grid_size), lambda_(lambda), delta_(delta), mode_(mode), impl_(new Impl) {
    if (n_ < 2) throw std::invalid_argument("preconditioner: grid size must be >= 2");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("preconditioner: lambda must lie in (0, 1]");
    if (delta < 0.0) throw std::invalid_argument("preconditioner: delta must be >= 0");

    const double scale = 0.5 * (1.0 + lambda) * n_;  // (1+lambda)/2 times 1/h
    eigenvalues_.resize(std::size_t(n_) * n_);
    for (int j = 0; j < n_; ++j) {
        const double mu1 = 2.0 - 2.0 * std::cos(2.0 * M_PI * j / n_);
        for (int k = 0; k < n_; ++k) {
            const double mu2 = 2.0 - 2.0 * std::cos(2.0 * M_PI * k / n_);
            eigenvalues_[std::size_t(j) * n_ + k] = scale * (mu1 + mu2) + delta_;
        }
    }

    if (mode_ == Mode::spectral) {
        const std::size_t m = std::size_t(n_) * n_;
        std::lock_guard<std::mutex> lock(fftw_mutex());
        impl_->canary_in = fftw_alloc_complex(m);
        impl_->canary_out = fftw_alloc_complex(m);
        impl_->forward = fftw_plan_dft_2d(n_, n_, impl_->canary_in, impl_->canary_out,
                                          FFTW_FORWARD, FFTW_ESTIMATE);
        impl_->backward = fftw_plan_dft_2d(n_, n_, impl_->canary_in, impl_->canary_out,
                                           FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        // Bordered matrix [[B, 1], [1^T, 0]] pins the mean of the solution.
        const long m = long(n_) * n_;
        const Eigen::SparseMatrix<double> b = shifted_laplacian(n_, lambda_, delta_);
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(std::size_t(b.nonZeros()) + 2 * std::size_t(m));
        for (int c = 0; c < b.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(b, c); it; ++it)
                t.emplace_back(int(it.row()), int(it.col()), it.value());
        for (long v = 0; v < m; ++v) {
            t.emplace_back(int(v), int(m), 1.0);
            t.emplace_back(int(m), int(v), 1.0);
        }
        Eigen::SparseMatrix<double> bordered(m + 1, m + 1);
        bordered.setFromTriplets(t.begin(), t.end());
        impl_->lu.compute(bordered);
        if (impl_->lu.info() != Eigen::Success)
            throw std::runtime_error("preconditioner: factorization failed");
    }
}

Preconditioner::~Preconditioner() = default;

Vector Preconditioner::apply(const Vector& r) const {
    const long m = long(n_) * n_;
    if (r.size() != m) throw std::invalid_argument("preconditioner: vector size mismatch");
    const double mean = r.mean();

    if (mode_ == Mode::factorized) {
        Vector rhs(m + 1);
        rhs.head(m) = r.array() - mean;
        rhs[m] = 0.0;
        Vector z = impl_->lu.solve(rhs).head(m);
        if (delta_ > 0.0) z.array() += mean / delta_;
        return z;
    }

    tls_scratch.ensure(n_);
    fftw_complex* in = tls_scratch.in;
    fftw_complex* out = tls_scratch.out;
    for (long v = 0; v < m; ++v) {
        in[v][0] = r[v] - mean;
        in[v][1] = 0.0;
    }
    fftw_execute_dft(impl_->forward, in, out);
    out[0][0] = 0.0;
    out[0][1] = 0.0;
    for (long v = 1; v < m; ++v) {
        const double mu = eigenvalues_[std::size_t(v)];
        out[v][0] /= mu;
        out[v][1] /= mu;
    }
    fftw_execute_dft(impl_->backward, out, in);
    Vector z(m);
    const double norm = 1.0 / double(m);
    for (long v = 0; v < m; ++v) z[v] = in[v][0] * norm;
    if (delta_ > 0.0) z.array() += mean / delta_;
    return z;
}

std::pair<Vector, SolveReport> pcg_solve(const SparseOperator& A, const Preconditioner& P,
                                         const Vector& f, double tol, int max_iter) {
    const long m = A.dim();
    if (f.size() != m) throw std::invalid_argument("pcg: right-hand side size mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("pcg: tol must be positive");

    const double f_norm = f.norm();
    const double f_mean_abs = std::abs(f.sum());
    if (f_norm > 0.0 && f_mean_abs > 1e-10 * f_norm * std::sqrt(double(m)))
        throw std::invalid_argument("pcg: right-hand side is not compatible (<f,1> != 0)");

    SolveReport report;
    Vector u = Vector::Zero(m);
    if (f_norm == 0.0) {
        report.converged = true;
        report.residual_history.push_back(0.0);
        return {u, report};
    }

    Vector r = f.array() - f.mean();
    Vector z = P.apply(r);
    z.array() -= z.mean();
    double rho = r.dot(z);
    if (!(rho > 0.0)) throw std::runtime_error("pcg: preconditioner breakdown");
    const double rho0 = rho;
    Vector p = z;
    report.residual_history.push_back(1.0);

    for (int k = 1; k <= max_iter; ++k) {
        const Vector q = A.apply(p);
        const double p_dot_q = p.dot(q);
        if (!(p_dot_q > 0.0)) throw std::runtime_error("pcg: non-positive curvature");
        const double alpha = rho / p_dot_q;
        u += alpha * p;
        r -= alpha * q;
        z = P.apply(r);
        z.array() -= z.mean();
        const double rho_next = r.dot(z);
        if (rho_next < 0.0) throw std::runtime_error("pcg: preconditioner breakdown");
        const double rel = std::sqrt(rho_next / rho0);
        report.residual_history.push_back(rel);
        report.iterations = k;
        report.final_relative_residual = rel;
        if (rel <= tol) {
            report.converged = true;
            break;
        }
        const double beta = rho_next / rho;
        rho = rho_next;
        p = z + beta * p;
    }
    u.array() -= u.mean();
    return {u, report};
}

std::pair<Vector, SolveReport> pcg_solve(const SparseOperator& A, const Preconditioner& P,
                                         const Rhs& f, double tol, int max_iter) {
    return pcg_solve(A, P, f.values, tol, max_iter);
}

std::pair<double, double> extreme_generalized_eigs(const SparseOperator& A,
                                                   const Preconditioner& P) {
    const int n = A.grid_size();
    if (n > 48) return extreme_generalized_eigs_lanczos(A, P);

    const long m = A.dim();
    const Eigen::SparseMatrix<double> b_sparse = shifted_laplacian(n, P.contrast(), P.shift());
    Eigen::MatrixXd a_dense = A.dense();
    Eigen::MatrixXd b_dense = Eigen::MatrixXd(b_sparse);

    // Both matrices share the constant null vector (for delta = 0). Shift it
    // to an interior generalized eigenvalue: the Rayleigh quotient of any
    // mean-zero vector lies inside [mu_min, mu_max], so the extremes survive.
    Vector probe = Vector::Zero(m);
    probe[0] = 1.0;
    probe[1] = -1.0;
    const double interior = probe.dot(a_dense * probe) / probe.dot(b_dense * probe);
    const double weight = b_dense.trace() / double(m);
    a_dense += (interior * weight / double(m)) * Eigen::MatrixXd::Ones(m, m);
    b_dense += (weight / double(m)) * Eigen::MatrixXd::Ones(m, m);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_dense, b_dense,
                                                                     Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev(0), ev(m - 1)};
}

std::pair<double, double> extreme_generalized_eigs_lanczos(const SparseOperator& A,
                                                           const Preconditioner& P,
                                                           int steps) {
    const long m = A.dim();
    const Eigen::SparseMatrix<double> b =
        shifted_laplacian(A.grid_size(), P.contrast(), P.shift());

    CounterRng rng(0x1a2b3c4dull, 7);
    Vector v(m);
    for (long i = 0; i < m; ++i)
        v[i] = double(rng.next() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    v.array() -= v.mean();

    const int k_max = int(std::min<long>(steps, m - 1));
    std::vector<Vector> basis;
    basis.reserve(std::size_t(k_max));
    Vector bv = b * v;
    v /= std::sqrt(v.dot(bv));

    Eigen::VectorXd alpha(k_max), beta(k_max);
    int k = 0;
    for (; k < k_max; ++k) {
        basis.push_back(v);
        Vector w = P.apply(A.apply(v));
        w.array() -= w.mean();
        alpha[k] = w.dot(b * v);
        // Full reorthogonalization in the B-inner product. The constant mode
        // is invisible to the B-norm, so it has to be projected out again
        // after every update or roundoff in it compounds.
        for (int pass = 0; pass < 2; ++pass) {
            const Vector bw = b * w;
            for (const auto& q : basis) w -= q.dot(bw) * q;
            w.array() -= w.mean();
        }
        const double norm_b = std::sqrt(std::max(0.0, w.dot(b * w)));
        if (norm_b < 1e-13) { ++k; break; }
        beta[k] = norm_b;
        v = w / norm_b;
        v.array() -= v.mean();
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri, Eigen::EigenvaluesOnly);
    return {solver.eigenvalues()(0), solver.eigenvalues()(k - 1)};
}

} // namespace rvehom
