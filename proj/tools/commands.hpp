#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rvehom/params.hpp"

namespace rvehom::cli {

struct RunOptions {
    EnsembleParams params;
    std::uint64_t seed = 1;
    int index = 1;
    long n_realizations = 100;
    std::vector<int> L_list = {2, 4, 8, 16};
    double delta = 0.0;
    double eta = 0.0;  // 0 selects the 2%-width default
    int workers = 0;   // 0 selects the hardware concurrency
    bool serial = false;
    bool strict = false;
    bool dump_matrix = false;
    int levels = 5;
    std::filesystem::path out_dir = "out";

    int effective_workers() const;
};

int cmd_field(const RunOptions& opt);
int cmd_solve(const RunOptions& opt);
int cmd_sweep(const RunOptions& opt);
int cmd_refine(const RunOptions& opt);
int cmd_dos(const RunOptions& opt);
int cmd_bench(const RunOptions& opt);

/// Writes the resolved key=value configuration next to the outputs.
void echo_config(const RunOptions& opt, const std::string& command);

} // namespace rvehom::cli
