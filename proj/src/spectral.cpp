#include "rvehom/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace rvehom {

std::vector<double> dense_eigenvalues(const SparseOperator& op) {
    if (op.dim() > 4096)
        throw std::invalid_argument("dense_eigenvalues: dimension above the dense limit (4096)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense(), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double DosCurve::integral() const {
    double acc = 0;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (t_grid[i] - t_grid[i - 1]);
    return acc;
}

DosCurve dos_curve(const std::vector<double>& eigenvalues, double eta,
                   const std::vector<double>& t_grid) {
    if (!(eta > 0.0)) throw std::invalid_argument("dos_curve: eta must be positive");
    if (eigenvalues.empty()) throw std::invalid_argument("dos_curve: empty spectrum");
    if (t_grid.size() < 2) throw std::invalid_argument("dos_curve: t grid too small");

    const double lo = eigenvalues.front() - 6.0 * eta;
    const double hi = eigenvalues.back() + 6.0 * eta;
    const double slack = 1e-9 * (hi - lo) + 1e-300;
    if (t_grid.front() > lo + slack || t_grid.back() < hi - slack)
        throw std::invalid_argument("dos_curve: t grid must cover the 6-eta extended spectrum");

    DosCurve curve;
    curve.t_grid = t_grid;
    curve.eta = eta;
    curve.m = long(eigenvalues.size());
    curve.values.assign(t_grid.size(), 0.0);
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * eta * double(eigenvalues.size()));
    const double inv_two_eta2 = 1.0 / (2.0 * eta * eta);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double acc = 0;
        for (const double lam : eigenvalues) {
            const double d = t_grid[i] - lam;
            acc += std::exp(-d * d * inv_two_eta2);
        }
        curve.values[i] = norm * acc;
    }
    return curve;
}

std::vector<double> dos_grid(double eig_min, double eig_max, double eta, int points) {
    if (points < 2) throw std::invalid_argument("dos_grid: needs at least two points");
    const double lo = eig_min - 6.0 * eta;
    const double hi = eig_max + 6.0 * eta;
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        t[std::size_t(i)] = lo + (hi - lo) * double(i) / double(points - 1);
    return t;
}

double default_broadening(const std::vector<double>& eigenvalues) {
    if (eigenvalues.empty()) throw std::invalid_argument("broadening: empty spectrum");
    const double width = eigenvalues.back() - eigenvalues.front();
    if (!(width > 0.0))
        throw std::invalid_argument("broadening: degenerate spectrum, supply eta explicitly");
    return 0.02 * width;
}

DosCurve average_dos(const std::vector<DosCurve>& curves) {
    if (curves.empty()) throw std::invalid_argument("average_dos: no curves");
    DosCurve avg = curves.front();
    for (std::size_t c = 1; c < curves.size(); ++c) {
        if (curves[c].t_grid != avg.t_grid)
            throw std::invalid_argument("average_dos: curves must share one t grid");
        for (std::size_t i = 0; i < avg.values.size(); ++i) avg.values[i] += curves[c].values[i];
    }
    for (auto& v : avg.values) v /= double(curves.size());
    return avg;
}

double dos_l2_distance(const DosCurve& a, const DosCurve& b) {
    if (a.t_grid != b.t_grid)
        throw std::invalid_argument("dos_l2_distance: curves must share one t grid");
    double acc = 0;
    for (std::size_t i = 1; i < a.t_grid.size(); ++i) {
        const double d1 = a.values[i] - b.values[i];
        const double d0 = a.values[i - 1] - b.values[i - 1];
        acc += 0.5 * (d1 * d1 + d0 * d0) * (a.t_grid[i] - a.t_grid[i - 1]);
    }
    return std::sqrt(acc);
}

double dos_scatter(const std::vector<DosCurve>& curves, const DosCurve& average) {
    if (curves.empty()) throw std::invalid_argument("dos_scatter: no curves");
    double acc = 0;
    for (const auto& c : curves) {
        const double d = dos_l2_distance(c, average);
        acc += d * d;
    }
    return std::sqrt(acc / double(curves.size()));
}

} // namespace rvehom
