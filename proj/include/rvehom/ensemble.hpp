#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rvehom/homogenize.hpp"
#include "rvehom/params.hpp"

namespace rvehom {

/// Compensated (Kahan) scalar accumulator, so that split/merge reductions
/// agree with single-pass sums to high relative accuracy.
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    void merge(const KahanSum& other) {
        add(other.sum_);
        add(-other.carry_);
    }
    double value() const { return sum_ - carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// One per-realization record retained for jackknife resampling and reports.
struct RealizationRecord {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    int iterations1 = 0, iterations2 = 0;
    double residual1 = 0, residual2 = 0;
    bool converged = true;
};

/// Streaming moment accumulator over homogenized matrices. The quartic
/// second moments are taken over the symmetrized matrices so the structural
/// index symmetries hold exactly.
class EnsembleAccumulator {
public:
    void add(const Eigen::Matrix2d& a);
    void merge(const EnsembleAccumulator& other);

    long count() const { return count_; }
    Eigen::Matrix2d mean() const;
    double std_a12() const;        // raw second moment sqrt((1/N) sum a12^2)
    double std_diag_diff() const;  // sqrt((1/N) sum (a11 - a22)^2)
    /// (L^d / (N-1)) * sum (A_sym - mean)^{(x)2} as a 4x4 Kronecker square.
    Eigen::Matrix4d quartic(int L) const;

    Eigen::Matrix2d symmetrized_sum() const;
    Eigen::Matrix4d second_moment_sum() const;

private:
    long count_ = 0;
    std::array<KahanSum, 4> sum_a_;        // raw entries, row-major
    std::array<KahanSum, 4> sum_sym_;      // symmetrized entries
    std::array<KahanSum, 16> sum_kron_;    // symmetrized Kronecker squares
    KahanSum sum_sq_a12_;
    KahanSum sum_sq_diag_;
};

struct EnsembleStats {
    long N = 0;
    EnsembleParams params;
    std::uint64_t master_seed = 0;
    Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
    double std_a12 = 0;
    double std_diag_diff = 0;
    Eigen::Matrix4d quartic = Eigen::Matrix4d::Zero();
    long total_iterations = 0;
    long nonconverged = 0;
    std::vector<RealizationRecord> realizations;
};

/// Runs N independent realizations (indices 1..N) on the stream derived from
/// (master_seed, L) and accumulates statistics by realization order, so the
/// result is identical for any worker count.
EnsembleStats run_ensemble(const EnsembleParams& params, long N, std::uint64_t master_seed,
                           int workers = 1);

/// Tabular sweep result; first two columns are always L and N.
struct SweepTable {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Mean a11 differences between cell counts L and 2L, independent streams
/// per L, with jackknife standard errors of the difference.
SweepTable systematic_error_sweep(const EnsembleParams& base, const std::vector<int>& L_list,
                                  long N, std::uint64_t master_seed, int workers = 1);

/// Standard deviations of a12 and of a11 - a22 versus L.
SweepTable stddev_sweep(const EnsembleParams& base, const std::vector<int>& L_list, long N,
                        std::uint64_t master_seed, int workers = 1);

/// Quartic diagonal decrements q11(L) - q11(2L) and q14(L) - q14(2L); when
/// realizations_per_L is zero each point uses N = L^2.
SweepTable quartic_diff_sweep(const EnsembleParams& base, const std::vector<int>& L_list,
                              long realizations_per_L, std::uint64_t master_seed,
                              int workers = 1);

/// The distinguished quartic values and the residuals of the entries that
/// vanish by ensemble symmetry, with jackknife standard errors.
struct QuarticReport {
    double q1111 = 0, q1122 = 0, q1212 = 0, q2222 = 0;
    double diag_gap = 0;     // q1111 - q2222
    double diag_gap_se = 0;
    std::array<double, 8> zero_values{};  // (1112, 1121, 1211, 2111, 1222, 2122, 2212, 2221)
    std::array<double, 8> zero_se{};
    double pair_symmetry_residual = 0;    // exact-by-construction block equalities
    double transpose_symmetry_residual = 0;
};

QuarticReport quartic_diagnostics(const EnsembleStats& stats);

struct FitResult {
    double slope = 0, intercept = 0, r2 = 0;
    int excluded = 0;  // non-positive values dropped before the log-log fit
};

/// Least-squares fit of log(value) against log(L).
FitResult scaling_fit(const std::vector<std::pair<double, double>>& points);

/// Jackknife standard error of the sample mean.
double jackknife_se_mean(const std::vector<double>& values);
/// Jackknife standard error of sqrt((1/N) sum x^2).
double jackknife_se_raw_std(const std::vector<double>& values);

} // namespace rvehom
