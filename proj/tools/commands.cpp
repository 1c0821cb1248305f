#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "rvehom/ensemble.hpp"
#include "rvehom/io.hpp"
#include "rvehom/rng.hpp"
#include "rvehom/spectral.hpp"

namespace rvehom::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

void write_sweep_csv(const fs::path& path, const SweepTable& table) {
    auto out = open_out(path);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
}

json params_json(const EnsembleParams& p) {
    return json{{"L", p.L},       {"m0", p.m0},   {"alpha", p.alpha.str()},
                {"lambda", p.lambda}, {"tol", p.tol}, {"grid_size", p.grid_size()}};
}

void write_summary(const fs::path& path, const json& summary) {
    auto out = open_out(path);
    out << summary.dump(2) << '\n';
}

} // namespace

int RunOptions::effective_workers() const {
    if (serial) return 1;
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void echo_config(const RunOptions& opt, const std::string& command) {
    KeyValueConfig cfg;
    cfg.set("command", command);
    cfg.set("L", std::to_string(opt.params.L));
    cfg.set("m0", std::to_string(opt.params.m0));
    cfg.set("alpha", opt.params.alpha.str());
    cfg.set("lambda", format_double(opt.params.lambda));
    cfg.set("tol", format_double(opt.params.tol));
    cfg.set("delta", format_double(opt.delta));
    cfg.set("eta", format_double(opt.eta));
    cfg.set("seed", std::to_string(opt.seed));
    cfg.set("index", std::to_string(opt.index));
    cfg.set("n_realizations", std::to_string(opt.n_realizations));
    std::string l_list;
    for (std::size_t i = 0; i < opt.L_list.size(); ++i)
        l_list += (i ? "," : "") + std::to_string(opt.L_list[i]);
    cfg.set("L_list", l_list);
    cfg.set("levels", std::to_string(opt.levels));
    cfg.set("workers", std::to_string(opt.workers));
    cfg.set("serial", opt.serial ? "1" : "0");
    cfg.set("strict", opt.strict ? "1" : "0");
    cfg.set("dump_matrix", opt.dump_matrix ? "1" : "0");
    cfg.set("out_dir", opt.out_dir.string());
    cfg.save(opt.out_dir / "config_resolved.cfg");
}

int cmd_field(const RunOptions& opt) {
    opt.params.validate();
    fs::create_directories(opt.out_dir);
    echo_config(opt, "field");

    const auto field = sample_field(opt.params, opt.seed, opt.index);
    const auto dump = opt.out_dir / "field.txt";
    const auto centers = opt.out_dir / "centers.csv";
    write_field_dump(dump, field);
    write_centers_csv(centers, field);

    write_summary(opt.out_dir / "summary.json",
                  json{{"command", "field"},
                       {"params", params_json(opt.params)},
                       {"seed", opt.seed},
                       {"index", opt.index},
                       {"centers", field.centers.size()},
                       {"field_file", dump.string()},
                       {"centers_file", centers.string()}});
    std::cout << "wrote " << dump.string() << " and " << centers.string() << "\n";
    return 0;
}

int cmd_solve(const RunOptions& opt) {
    opt.params.validate();
    fs::create_directories(opt.out_dir);
    echo_config(opt, "solve");

    const std::uint64_t stream_seed = derive_stream_seed(opt.seed, std::uint64_t(opt.params.L));
    const Preconditioner precond(opt.params.grid_size(), opt.params.lambda, opt.delta);

    // timing columns live in a separate file so the data table is
    // byte-deterministic for a fixed seed
    auto out = open_out(opt.out_dir / "realizations.csv");
    out << "index,seed,a11,a12,a21,a22,iters1,iters2,res1,res2\n";
    auto timings = open_out(opt.out_dir / "timings.csv");
    timings << "index,t_matrix,t_rhs,t_solve\n";

    long nonconverged = 0;
    for (long idx = 1; idx <= opt.n_realizations; ++idx) {
        const auto field = sample_field(opt.params, stream_seed, int(idx));

        auto t0 = std::chrono::steady_clock::now();
        const auto a = assemble_total(field, opt.params.lambda);
        const double t_matrix = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto f1 = assemble_rhs(field, opt.params.lambda, 1);
        const auto f2 = assemble_rhs(field, opt.params.lambda, 2);
        const double t_rhs = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        auto [u1, r1] = pcg_solve(a, precond, f1, opt.params.tol);
        auto [u2, r2] = pcg_solve(a, precond, f2, opt.params.tol);
        const double t_solve = seconds_since(t0);

        const CorrectorPair pair{u1, u2, r1, r2};
        const auto hom = homogenized_matrix(field, pair, opt.params.lambda);
        if (!pair.converged()) ++nonconverged;

        out << idx << ',' << stream_seed << ',' << format_double(hom.a11) << ','
            << format_double(hom.a12) << ',' << format_double(hom.a21) << ','
            << format_double(hom.a22) << ',' << r1.iterations << ',' << r2.iterations << ','
            << format_double(r1.final_relative_residual) << ','
            << format_double(r2.final_relative_residual) << '\n';
        timings << idx << ',' << format_double(t_matrix) << ',' << format_double(t_rhs)
                << ',' << format_double(t_solve) << '\n';

        if (idx == 1 && opt.dump_matrix)
            write_matrix_market(opt.out_dir / "matrix_realization_1.mtx", a);
    }

    write_summary(opt.out_dir / "summary.json",
                  json{{"command", "solve"},
                       {"params", params_json(opt.params)},
                       {"master_seed", opt.seed},
                       {"n_realizations", opt.n_realizations},
                       {"nonconverged", nonconverged}});
    if (nonconverged > 0) {
        std::cerr << nonconverged << " realizations did not converge\n";
        if (opt.strict) return 3;
    }
    return 0;
}

int cmd_sweep(const RunOptions& opt) {
    opt.params.validate();
    fs::create_directories(opt.out_dir);
    echo_config(opt, "sweep");
    const int workers = opt.effective_workers();

    const auto systematic =
        systematic_error_sweep(opt.params, opt.L_list, opt.n_realizations, opt.seed, workers);
    write_sweep_csv(opt.out_dir / "systematic_error.csv", systematic);

    const auto stddev =
        stddev_sweep(opt.params, opt.L_list, opt.n_realizations, opt.seed, workers);
    write_sweep_csv(opt.out_dir / "stddev.csv", stddev);

    const auto quartic = quartic_diff_sweep(opt.params, opt.L_list, 0, opt.seed, workers);
    write_sweep_csv(opt.out_dir / "quartic_diff.csv", quartic);

    std::vector<std::pair<double, double>> p12, pdd;
    for (const auto& row : stddev.rows) {
        p12.push_back({row[0], row[2]});
        pdd.push_back({row[0], row[3]});
    }
    json fits = json::object();
    if (p12.size() >= 3) {
        const auto f12 = scaling_fit(p12);
        const auto fdd = scaling_fit(pdd);
        fits["std_a12"] = {{"slope", f12.slope}, {"intercept", f12.intercept}, {"r2", f12.r2}};
        fits["std_diag_diff"] = {
            {"slope", fdd.slope}, {"intercept", fdd.intercept}, {"r2", fdd.r2}};
    }

    write_summary(opt.out_dir / "summary.json",
                  json{{"command", "sweep"},
                       {"params", params_json(opt.params)},
                       {"master_seed", opt.seed},
                       {"n_realizations", opt.n_realizations},
                       {"L_list", opt.L_list},
                       {"fits", fits}});
    std::cout << "wrote sweep tables to " << opt.out_dir.string() << "\n";
    return 0;
}

int cmd_refine(const RunOptions& opt) {
    opt.params.validate();
    fs::create_directories(opt.out_dir);
    echo_config(opt, "refine");

    std::vector<int> grids;
    for (int p = 0; p <= opt.levels; ++p) grids.push_back(opt.params.grid_size() << p);
    const auto rows = refinement_study(opt.params, opt.seed, grids, refinement_default_rhs,
                                       std::min(opt.params.tol, 1e-10));

    auto out = open_out(opt.out_dir / "refine.csv");
    out << "level,n,rel_diff,decay_factor\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double factor = i == 0 ? 0.0 : rows[i - 1].rel_diff / rows[i].rel_diff;
        out << rows[i].level << ',' << rows[i].grid_size << ','
            << format_double(rows[i].rel_diff) << ',' << format_double(factor) << '\n';
    }

    write_summary(opt.out_dir / "summary.json",
                  json{{"command", "refine"},
                       {"params", params_json(opt.params)},
                       {"seed", opt.seed},
                       {"levels", opt.levels},
                       {"grids", grids}});
    std::cout << "wrote " << (opt.out_dir / "refine.csv").string() << "\n";
    return 0;
}

int cmd_dos(const RunOptions& opt) {
    opt.params.validate();
    if (opt.params.dof_count() > 4096)
        throw std::invalid_argument("dos: grid too large for the dense eigensolver (n <= 64)");
    fs::create_directories(opt.out_dir);
    echo_config(opt, "dos");

    const std::uint64_t stream_seed = derive_stream_seed(opt.seed, std::uint64_t(opt.params.L));
    std::vector<std::vector<double>> spectra;
    double lo = 1e300, hi = -1e300;
    Eigen::Matrix2d mean_matrix = Eigen::Matrix2d::Zero();
    const Preconditioner precond(opt.params.grid_size(), opt.params.lambda, opt.delta);
    for (long i = 1; i <= opt.n_realizations; ++i) {
        const auto field = sample_field(opt.params, stream_seed, int(i));
        const auto a = assemble_total(field, opt.params.lambda);
        spectra.push_back(dense_eigenvalues(a));
        lo = std::min(lo, spectra.back().front());
        hi = std::max(hi, spectra.back().back());
        const auto pair = solve_correctors(field, opt.params.lambda, opt.params.tol, &precond);
        mean_matrix += homogenized_matrix(field, pair, opt.params.lambda).matrix() /
                       double(opt.n_realizations);
    }

    // constant-coefficient comparison operator from the isotropic part of the
    // ensemble-mean matrix
    const double mean_coefficient = 0.5 * (mean_matrix(0, 0) + mean_matrix(1, 1));
    const auto lap = assemble_laplacian(opt.params.grid_size());
    const auto hom_op = SparseOperator::scaled_sum(mean_coefficient, lap, 0.0, lap);
    const auto hom_eigs = dense_eigenvalues(hom_op);
    lo = std::min(lo, hom_eigs.front());
    hi = std::max(hi, hom_eigs.back());

    const double eta = opt.eta > 0 ? opt.eta : 0.02 * (hi - lo);
    const auto grid = dos_grid(lo, hi, eta);

    std::vector<DosCurve> curves;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        curves.push_back(dos_curve(spectra[i], eta, grid));
        auto out = open_out(opt.out_dir / ("dos_" + std::to_string(i + 1) + ".csv"));
        out << "t,phi\n";
        for (std::size_t k = 0; k < grid.size(); ++k)
            out << format_double(grid[k]) << ',' << format_double(curves.back().values[k])
                << '\n';
    }
    const auto avg = average_dos(curves);
    const auto hom_curve = dos_curve(hom_eigs, eta, grid);
    for (const auto& [name, curve] :
         {std::pair<std::string, const DosCurve&>{"dos_average.csv", avg},
          std::pair<std::string, const DosCurve&>{"dos_mean_coefficient.csv", hom_curve}}) {
        auto out = open_out(opt.out_dir / name);
        out << "t,phi\n";
        for (std::size_t k = 0; k < grid.size(); ++k)
            out << format_double(grid[k]) << ',' << format_double(curve.values[k]) << '\n';
    }

    write_summary(
        opt.out_dir / "summary.json",
        json{{"command", "dos"},
             {"params", params_json(opt.params)},
             {"master_seed", opt.seed},
             {"n_realizations", opt.n_realizations},
             {"eta", eta},
             {"mean_coefficient", mean_coefficient},
             {"average_integral", avg.integral()},
             {"distance_to_mean_coefficient_dos", dos_l2_distance(avg, hom_curve)},
             {"ensemble_scatter", dos_scatter(curves, avg)}});
    std::cout << "wrote " << curves.size() << " DOS curves to " << opt.out_dir.string() << "\n";
    return 0;
}

int cmd_bench(const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    echo_config(opt, "bench");

    auto out = open_out(opt.out_dir / "bench.csv");
    out << "L,n,dofs,t_matrix,t_rhs,t_solve,iters1,iters2\n";
    for (const int L : opt.L_list) {
        EnsembleParams p = opt.params;
        p.L = L;
        p.validate();
        const auto field = sample_field(p, derive_stream_seed(opt.seed, std::uint64_t(L)), 1);

        auto t0 = std::chrono::steady_clock::now();
        const auto a = assemble_total(field, p.lambda);
        const double t_matrix = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto f1 = assemble_rhs(field, p.lambda, 1);
        const auto f2 = assemble_rhs(field, p.lambda, 2);
        const double t_rhs = seconds_since(t0);

        const Preconditioner precond(p.grid_size(), p.lambda, opt.delta);
        t0 = std::chrono::steady_clock::now();
        auto [u1, r1] = pcg_solve(a, precond, f1, p.tol);
        auto [u2, r2] = pcg_solve(a, precond, f2, p.tol);
        const double t_solve = seconds_since(t0);

        out << L << ',' << p.grid_size() << ',' << p.dof_count() << ','
            << format_double(t_matrix) << ',' << format_double(t_rhs) << ','
            << format_double(t_solve) << ',' << r1.iterations << ',' << r2.iterations << '\n';
        std::cout << "L=" << L << " n=" << p.grid_size() << " matrix " << t_matrix << "s rhs "
                  << t_rhs << "s solve " << t_solve << "s\n";
    }
    return 0;
}

} // namespace rvehom::cli
