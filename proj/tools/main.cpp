#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "rvehom/io.hpp"

using namespace rvehom;
using namespace rvehom::cli;

namespace {

// Applies config-file values for everything the command line did not set.
void apply_config_file(const std::string& path, CLI::App& cmd, RunOptions& opt,
                       std::string& alpha_text) {
    const auto cfg = KeyValueConfig::load(path);
    const auto unset = [&cmd](const std::string& flag) {
        const CLI::Option* o = cmd.get_option_no_throw(flag);
        return o != nullptr && o->count() == 0;
    };
    if (cfg.has("L") && unset("--L")) opt.params.L = int(cfg.get_long("L", opt.params.L));
    if (cfg.has("m0") && unset("--m0")) opt.params.m0 = int(cfg.get_long("m0", opt.params.m0));
    if (cfg.has("alpha") && unset("--alpha")) alpha_text = cfg.get("alpha", alpha_text);
    if (cfg.has("lambda") && unset("--lambda"))
        opt.params.lambda = cfg.get_double("lambda", opt.params.lambda);
    if (cfg.has("tol") && unset("--tol")) opt.params.tol = cfg.get_double("tol", opt.params.tol);
    if (cfg.has("delta") && unset("--delta")) opt.delta = cfg.get_double("delta", opt.delta);
    if (cfg.has("eta") && unset("--eta")) opt.eta = cfg.get_double("eta", opt.eta);
    if (cfg.has("seed") && unset("--seed")) opt.seed = cfg.get_u64("seed", opt.seed);
    if (cfg.has("index") && unset("--index")) opt.index = int(cfg.get_long("index", opt.index));
    if (cfg.has("n_realizations") && unset("--n-realizations"))
        opt.n_realizations = cfg.get_long("n_realizations", opt.n_realizations);
    if (cfg.has("levels") && unset("--levels"))
        opt.levels = int(cfg.get_long("levels", opt.levels));
    if (cfg.has("workers") && unset("--workers"))
        opt.workers = int(cfg.get_long("workers", opt.workers));
    if (cfg.has("serial") && unset("--serial")) opt.serial = cfg.get_long("serial", 0) != 0;
    if (cfg.has("strict") && unset("--strict")) opt.strict = cfg.get_long("strict", 0) != 0;
    if (cfg.has("dump_matrix") && unset("--dump-matrix"))
        opt.dump_matrix = cfg.get_long("dump_matrix", 0) != 0;
    if (cfg.has("out_dir") && unset("--out-dir")) opt.out_dir = cfg.get("out_dir", "out");
    if (cfg.has("L_list") && unset("--L-list")) {
        opt.L_list.clear();
        std::string item;
        std::istringstream ss(cfg.get("L_list", ""));
        while (std::getline(ss, item, ',')) opt.L_list.push_back(std::stoi(item));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic-cell homogenization studies for two-valued random coefficients"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string params_file;
    std::string alpha_text = "1/4";
    opt.params.m0 = 4;
    opt.params.lambda = 0.4;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--params", params_file, "key=value configuration file");
        cmd->add_option("--L", opt.params.L, "cells per torus side");
        cmd->add_option("--m0", opt.params.m0, "grid intervals per cell (power of two)");
        cmd->add_option("--alpha", alpha_text, "overlap factor, e.g. 1/4 or 0.25");
        cmd->add_option("--lambda", opt.params.lambda, "contrast in (0, 1]");
        cmd->add_option("--tol", opt.params.tol, "solver tolerance");
        cmd->add_option("--delta", opt.delta, "preconditioner shift (default 0)");
        cmd->add_option("--seed", opt.seed, "master seed");
        cmd->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
        cmd->add_flag("--serial", opt.serial, "single worker, bit-reproducible ordering");
        cmd->add_flag("--strict", opt.strict, "exit 3 on any non-converged realization");
        cmd->add_option("--out-dir", opt.out_dir, "output directory");
        return cmd;
    };

    auto* field = add_common(app.add_subcommand("field", "sample one field and dump it"));
    field->add_option("--index", opt.index, "realization index");

    auto* solve = add_common(
        app.add_subcommand("solve", "assemble, solve and average per realization"));
    solve->add_option("--n-realizations", opt.n_realizations, "realization count");
    solve->add_flag("--dump-matrix", opt.dump_matrix,
                    "export the first stiffness matrix (MatrixMarket)");

    auto* sweep = add_common(
        app.add_subcommand("sweep", "systematic error, spread and quartic tables over L"));
    sweep->add_option("--n-realizations", opt.n_realizations, "realizations per L");
    sweep->add_option("--L-list", opt.L_list, "cell counts, e.g. 2 4 8 16")->delimiter(',');

    auto* refine = add_common(
        app.add_subcommand("refine", "dyadic refinement study with the manufactured source"));
    refine->add_option("--levels", opt.levels, "number of dyadic refinements");

    auto* dos = add_common(app.add_subcommand("dos", "density-of-states curves"));
    dos->add_option("--n-realizations", opt.n_realizations, "realization count");
    dos->add_option("--eta", opt.eta, "Gaussian broadening (0 = 2% of spectral width)");

    auto* bench =
        add_common(app.add_subcommand("bench", "assembly/solve timings per cell count"));
    bench->add_option("--L-list", opt.L_list, "cell counts")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    CLI::App* active = app.get_subcommands().front();
    try {
        if (!params_file.empty()) apply_config_file(params_file, *active, opt, alpha_text);
        opt.params.alpha = Rational::parse(alpha_text);

        if (active == field) return cmd_field(opt);
        if (active == solve) return cmd_solve(opt);
        if (active == sweep) return cmd_sweep(opt);
        if (active == refine) return cmd_refine(opt);
        if (active == dos) return cmd_dos(opt);
        if (active == bench) return cmd_bench(opt);
    } catch (const std::invalid_argument& err) {
        std::cerr << "invalid configuration: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
