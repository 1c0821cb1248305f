#include "rvehom/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "rvehom/rng.hpp"

namespace rvehom {

namespace {

Eigen::Matrix2d symmetrize(const Eigen::Matrix2d& a) {
    Eigen::Matrix2d s = a;
    const double off = 0.5 * (a(0, 1) + a(1, 0));
    s(0, 1) = off;
    s(1, 0) = off;
    return s;
}

Eigen::Matrix4d kron_square(const Eigen::Matrix2d& b) {
    Eigen::Matrix4d k;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) k(2 * p + r, 2 * q + s) = b(p, q) * b(r, s);
    return k;
}

void validate_L_list(const std::vector<int>& L_list) {
    if (L_list.empty()) throw std::invalid_argument("sweep: empty L list");
    int prev = 0;
    for (const int L : L_list) {
        if (L < 1 || (L & (L - 1)) != 0)
            throw std::invalid_argument("sweep: L values must be powers of two");
        if (L <= prev) throw std::invalid_argument("sweep: L values must be strictly increasing");
        prev = L;
    }
}

// Runs fn(i) for i in [0, count) on the requested number of workers and keeps
// results indexed, so downstream reductions are order-deterministic.
template <typename T, typename Fn>
std::vector<T> parallel_map(long count, int workers, Fn&& fn) {
    std::vector<T> results(static_cast<std::size_t>(count));
    if (workers <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) results[std::size_t(i)] = fn(i);
        return results;
    }
    std::atomic<long> next{0};
    const int pool = int(std::min<long>(workers, count));
    std::vector<std::thread> threads;
    threads.reserve(std::size_t(pool));
    std::atomic<bool> failed{false};
    for (int w = 0; w < pool; ++w) {
        threads.emplace_back([&]() {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    results[std::size_t(i)] = fn(i);
                } catch (...) {
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failed.load()) throw std::runtime_error("parallel run failed in a worker");
    return results;
}

} // namespace

void EnsembleAccumulator::add(const Eigen::Matrix2d& a) {
    const Eigen::Matrix2d sym = symmetrize(a);
    const Eigen::Matrix4d kron = kron_square(sym);
    ++count_;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            sum_a_[std::size_t(2 * i + j)].add(a(i, j));
            sum_sym_[std::size_t(2 * i + j)].add(sym(i, j));
        }
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) sum_kron_[std::size_t(4 * r + c)].add(kron(r, c));
    sum_sq_a12_.add(a(0, 1) * a(0, 1));
    sum_sq_diag_.add((a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)));
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
    count_ += other.count_;
    for (std::size_t i = 0; i < 4; ++i) {
        sum_a_[i].merge(other.sum_a_[i]);
        sum_sym_[i].merge(other.sum_sym_[i]);
    }
    for (std::size_t i = 0; i < 16; ++i) sum_kron_[i].merge(other.sum_kron_[i]);
    sum_sq_a12_.merge(other.sum_sq_a12_);
    sum_sq_diag_.merge(other.sum_sq_diag_);
}

Eigen::Matrix2d EnsembleAccumulator::mean() const {
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = sum_a_[std::size_t(2 * i + j)].value() / count_;
    return m;
}

double EnsembleAccumulator::std_a12() const {
    return std::sqrt(std::max(0.0, sum_sq_a12_.value() / count_));
}

double EnsembleAccumulator::std_diag_diff() const {
    return std::sqrt(std::max(0.0, sum_sq_diag_.value() / count_));
}

Eigen::Matrix2d EnsembleAccumulator::symmetrized_sum() const {
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = sum_sym_[std::size_t(2 * i + j)].value();
    return m;
}

Eigen::Matrix4d EnsembleAccumulator::second_moment_sum() const {
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = sum_kron_[std::size_t(4 * r + c)].value();
    return m;
}

Eigen::Matrix4d EnsembleAccumulator::quartic(int L) const {
    if (count_ < 2) throw std::invalid_argument("quartic: needs at least two realizations");
    const double n = double(count_);
    const Eigen::Matrix2d mean_sym = symmetrized_sum() / n;
    const Eigen::Matrix4d centered = second_moment_sum() - n * kron_square(mean_sym);
    return (double(L) * L / (n - 1.0)) * centered;
}

EnsembleStats run_ensemble(const EnsembleParams& params, long N, std::uint64_t master_seed,
                           int workers) {
    params.validate();
    if (N < 2) throw std::invalid_argument("run_ensemble: N must be >= 2");

    const std::uint64_t stream_seed = derive_stream_seed(master_seed, std::uint64_t(params.L));
    const Preconditioner precond(params.grid_size(), params.lambda);

    auto records = parallel_map<RealizationRecord>(N, workers, [&](long i) {
        const CoefficientField field = sample_field(params, stream_seed, int(i + 1));
        const CorrectorPair correctors =
            solve_correctors(field, params.lambda, params.tol, &precond);
        const HomogenizedMatrix hom = homogenized_matrix(field, correctors, params.lambda);
        RealizationRecord rec;
        rec.a = hom.matrix();
        rec.iterations1 = correctors.report1.iterations;
        rec.iterations2 = correctors.report2.iterations;
        rec.residual1 = correctors.report1.final_relative_residual;
        rec.residual2 = correctors.report2.final_relative_residual;
        rec.converged = correctors.converged();
        return rec;
    });

    EnsembleAccumulator acc;
    EnsembleStats stats;
    stats.N = N;
    stats.params = params;
    stats.master_seed = master_seed;
    for (const auto& rec : records) {
        acc.add(rec.a);
        stats.total_iterations += rec.iterations1 + rec.iterations2;
        if (!rec.converged) ++stats.nonconverged;
    }
    stats.mean = acc.mean();
    stats.std_a12 = acc.std_a12();
    stats.std_diag_diff = acc.std_diag_diff();
    stats.quartic = acc.quartic(params.L);
    stats.realizations = std::move(records);
    return stats;
}

SweepTable systematic_error_sweep(const EnsembleParams& base, const std::vector<int>& L_list,
                                  long N, std::uint64_t master_seed, int workers) {
    validate_L_list(L_list);
    std::vector<int> needed = L_list;
    for (const int L : L_list) needed.push_back(2 * L);

    std::map<int, EnsembleStats> by_L;
    for (const int L : needed) {
        if (by_L.count(L)) continue;
        EnsembleParams p = base;
        p.L = L;
        by_L.emplace(L, run_ensemble(p, N, master_seed, workers));
    }

    SweepTable table;
    table.kind = "systematic_error";
    table.columns = {"L", "N", "mean_a11_L", "mean_a11_2L", "diff", "se_diff"};
    for (const int L : L_list) {
        const EnsembleStats& lo = by_L.at(L);
        const EnsembleStats& hi = by_L.at(2 * L);
        std::vector<double> a11_lo, a11_hi;
        a11_lo.reserve(lo.realizations.size());
        for (const auto& r : lo.realizations) a11_lo.push_back(r.a(0, 0));
        a11_hi.reserve(hi.realizations.size());
        for (const auto& r : hi.realizations) a11_hi.push_back(r.a(0, 0));
        const double se_lo = jackknife_se_mean(a11_lo);
        const double se_hi = jackknife_se_mean(a11_hi);
        table.rows.push_back({double(L), double(N), lo.mean(0, 0), hi.mean(0, 0),
                              lo.mean(0, 0) - hi.mean(0, 0),
                              std::sqrt(se_lo * se_lo + se_hi * se_hi)});
    }
    return table;
}

SweepTable stddev_sweep(const EnsembleParams& base, const std::vector<int>& L_list, long N,
                        std::uint64_t master_seed, int workers) {
    validate_L_list(L_list);
    SweepTable table;
    table.kind = "std_dev";
    table.columns = {"L", "N", "std_a12", "std_diag_diff", "se_std_a12", "se_std_diag_diff"};
    for (const int L : L_list) {
        EnsembleParams p = base;
        p.L = L;
        const EnsembleStats stats = run_ensemble(p, N, master_seed, workers);
        std::vector<double> a12, diag;
        a12.reserve(stats.realizations.size());
        diag.reserve(stats.realizations.size());
        for (const auto& r : stats.realizations) {
            a12.push_back(r.a(0, 1));
            diag.push_back(r.a(0, 0) - r.a(1, 1));
        }
        table.rows.push_back({double(L), double(N), stats.std_a12, stats.std_diag_diff,
                              jackknife_se_raw_std(a12), jackknife_se_raw_std(diag)});
    }
    return table;
}

SweepTable quartic_diff_sweep(const EnsembleParams& base, const std::vector<int>& L_list,
                              long realizations_per_L, std::uint64_t master_seed, int workers) {
    validate_L_list(L_list);
    const auto realizations_for = [&](int L) {
        return realizations_per_L > 0 ? realizations_per_L : std::max<long>(2, long(L) * L);
    };

    std::map<int, Eigen::Matrix4d> by_L;
    std::map<int, long> n_by_L;
    std::vector<int> needed = L_list;
    for (const int L : L_list) needed.push_back(2 * L);
    for (const int L : needed) {
        if (by_L.count(L)) continue;
        EnsembleParams p = base;
        p.L = L;
        const EnsembleStats stats = run_ensemble(p, realizations_for(L), master_seed, workers);
        by_L.emplace(L, stats.quartic);
        n_by_L.emplace(L, stats.N);
    }

    SweepTable table;
    table.kind = "quartic_diff";
    table.columns = {"L", "N", "q11_L", "q11_2L", "q11_diff", "q14_L", "q14_2L", "q14_diff"};
    for (const int L : L_list) {
        const auto& lo = by_L.at(L);
        const auto& hi = by_L.at(2 * L);
        table.rows.push_back({double(L), double(n_by_L.at(L)), lo(0, 0), hi(0, 0),
                              lo(0, 0) - hi(0, 0), lo(0, 3), hi(0, 3), lo(0, 3) - hi(0, 3)});
    }
    return table;
}

QuarticReport quartic_diagnostics(const EnsembleStats& stats) {
    const long N = stats.N;
    if (N < 3 || stats.realizations.size() != std::size_t(N))
        throw std::invalid_argument("quartic_diagnostics: needs retained realizations, N >= 3");
    const int L = stats.params.L;
    const Eigen::Matrix4d& q = stats.quartic;

    QuarticReport report;
    report.q1111 = q(0, 0);
    report.q1122 = q(1, 1);
    report.q1212 = q(0, 3);
    report.q2222 = q(3, 3);
    report.diag_gap = q(0, 0) - q(3, 3);

    // Entries that vanish by reflection invariance of the ensemble:
    // rows/cols in the Kronecker layout entry(2(i-1)+(k-1), 2(j-1)+(l-1)).
    static constexpr int kZeroRow[8] = {0, 1, 0, 2, 1, 3, 2, 3};
    static constexpr int kZeroCol[8] = {1, 0, 2, 0, 3, 1, 3, 2};
    for (int e = 0; e < 8; ++e) report.zero_values[std::size_t(e)] = q(kZeroRow[e], kZeroCol[e]);

    // Structural residuals (exact by symmetric averaging).
    report.pair_symmetry_residual =
        std::max({std::abs(q(0, 3) - q(1, 2)), std::abs(q(0, 3) - q(2, 1)),
                  std::abs(q(0, 3) - q(3, 0)), std::abs(q(1, 1) - q(2, 2))});
    report.transpose_symmetry_residual = (q - q.transpose()).cwiseAbs().maxCoeff();

    // Jackknife over realizations via leave-one-out moment sums.
    Eigen::Matrix2d s1 = Eigen::Matrix2d::Zero();
    Eigen::Matrix4d s2 = Eigen::Matrix4d::Zero();
    std::vector<Eigen::Matrix2d> sym(static_cast<std::size_t>(N));
    for (long n = 0; n < N; ++n) {
        sym[std::size_t(n)] = symmetrize(stats.realizations[std::size_t(n)].a);
        s1 += sym[std::size_t(n)];
        s2 += kron_square(sym[std::size_t(n)]);
    }
    std::vector<Eigen::Matrix4d> loo(static_cast<std::size_t>(N));
    Eigen::Matrix4d loo_mean = Eigen::Matrix4d::Zero();
    const double scale = double(L) * L / double(N - 2);
    for (long n = 0; n < N; ++n) {
        const Eigen::Matrix2d m = (s1 - sym[std::size_t(n)]) / double(N - 1);
        loo[std::size_t(n)] =
            scale * (s2 - kron_square(sym[std::size_t(n)]) - double(N - 1) * kron_square(m));
        loo_mean += loo[std::size_t(n)];
    }
    loo_mean /= double(N);
    Eigen::Matrix4d var = Eigen::Matrix4d::Zero();
    for (long n = 0; n < N; ++n) {
        const Eigen::Matrix4d d = loo[std::size_t(n)] - loo_mean;
        var += d.cwiseProduct(d);
    }
    const Eigen::Matrix4d se = (var * (double(N - 1) / double(N))).cwiseSqrt();
    for (int e = 0; e < 8; ++e) report.zero_se[std::size_t(e)] = se(kZeroRow[e], kZeroCol[e]);

    double gap_var = 0;
    double gap_mean = 0;
    for (long n = 0; n < N; ++n)
        gap_mean += loo[std::size_t(n)](0, 0) - loo[std::size_t(n)](3, 3);
    gap_mean /= double(N);
    for (long n = 0; n < N; ++n) {
        const double d = (loo[std::size_t(n)](0, 0) - loo[std::size_t(n)](3, 3)) - gap_mean;
        gap_var += d * d;
    }
    report.diag_gap_se = std::sqrt(gap_var * double(N - 1) / double(N));
    return report;
}

FitResult scaling_fit(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> logs;
    int excluded = 0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            ++excluded;
            continue;
        }
        logs.emplace_back(std::log(x), std::log(y));
    }
    if (logs.size() < 3)
        throw std::invalid_argument("scaling_fit: needs at least three positive points");

    double sx = 0, sy = 0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
    }
    const double mx = sx / double(logs.size());
    const double my = sy / double(logs.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.excluded = excluded;
    return fit;
}

double jackknife_se_mean(const std::vector<double>& values) {
    const long n = long(values.size());
    if (n < 2) throw std::invalid_argument("jackknife: needs at least two values");
    double sum = 0;
    for (const double v : values) sum += v;
    // theta_(i) = (sum - x_i) / (n - 1); SE^2 = (n-1)/n * sum (theta_i - mean)^2
    const double mean_loo = sum / double(n);  // mean of theta_(i) equals the sample mean
    double acc = 0;
    for (const double v : values) {
        const double theta = (sum - v) / double(n - 1);
        acc += (theta - mean_loo) * (theta - mean_loo);
    }
    return std::sqrt(acc * double(n - 1) / double(n));
}

double jackknife_se_raw_std(const std::vector<double>& values) {
    const long n = long(values.size());
    if (n < 2) throw std::invalid_argument("jackknife: needs at least two values");
    double s2 = 0;
    for (const double v : values) s2 += v * v;
    std::vector<double> theta(values.size());
    double theta_mean = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        theta[i] = std::sqrt(std::max(0.0, (s2 - values[i] * values[i]) / double(n - 1)));
        theta_mean += theta[i];
    }
    theta_mean /= double(n);
    double acc = 0;
    for (const double t : theta) acc += (t - theta_mean) * (t - theta_mean);
    return std::sqrt(acc * double(n - 1) / double(n));
}

} // namespace rvehom
