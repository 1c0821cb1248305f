#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rvehom/assembly.hpp"
#include "rvehom/io.hpp"

using namespace rvehom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "rvehom_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

EnsembleParams params(int L, int m0, Rational alpha, double lambda) {
    EnsembleParams p;
    p.L = L;
    p.m0 = m0;
    p.alpha = alpha;
    p.lambda = lambda;
    return p;
}

} // namespace

TEST_CASE("field dump round-trips bit-exactly") {
    TempDir tmp;
    const auto p = params(8, 4, {1, 4}, 0.4123456789012345);
    const auto field = sample_field(p, 9876543210123456789ull, 17);
    const auto path = tmp.path / "field.txt";
    write_field_dump(path, field);

    const auto loaded = read_field_dump(path);
    CHECK(loaded.params.L == p.L);
    CHECK(loaded.params.m0 == p.m0);
    CHECK(loaded.params.alpha == p.alpha);
    CHECK(loaded.params.lambda == p.lambda);
    CHECK(loaded.seed == field.seed);
    CHECK(loaded.realization_index == field.realization_index);
    CHECK(loaded.cell_covered == field.cell_covered);
    CHECK(loaded.vertex_weight == field.vertex_weight);

    // a second write produces identical bytes
    const auto path2 = tmp.path / "field2.txt";
    write_field_dump(path2, loaded);
    std::ifstream f1(path), f2(path2);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
}

TEST_CASE("centers csv round-trips") {
    TempDir tmp;
    const auto field = sample_field(params(4, 4, {1, 4}, 0.5), 42, 1);
    const auto path = tmp.path / "centers.csv";
    write_centers_csv(path, field);
    CHECK(read_centers_csv(path) == field.centers);
}

TEST_CASE("matrix market round-trips the assembled operator") {
    TempDir tmp;
    const auto p = params(2, 4, {1, 4}, 0.3);
    const auto a = assemble_total(sample_field(p, 5, 1), p.lambda);
    const auto path = tmp.path / "matrix.mtx";
    write_matrix_market(path, a);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");

    const auto b = read_matrix_market(path);
    CHECK(b.dim() == a.dim());
    CHECK(b.grid_size() == a.grid_size());
    CHECK(SparseOperator::max_entry_difference(a, b) == 0.0);
}

TEST_CASE("key=value config parsing and echo") {
    TempDir tmp;
    const auto path = tmp.path / "run.cfg";
    {
        std::ofstream out(path);
        out << "# run configuration\n"
            << "L = 8\n"
            << "alpha= 1/4\n"
            << "lambda =0.4   # contrast\n"
            << "seed = 12345678901234567890\n"
            << "out_dir = results\n";
    }
    const auto cfg = KeyValueConfig::load(path);
    CHECK(cfg.get_long("L", 0) == 8);
    CHECK(cfg.get("alpha", "") == "1/4");
    CHECK(cfg.get_double("lambda", 0) == 0.4);
    CHECK(cfg.get_u64("seed", 0) == 12345678901234567890ull);
    CHECK(cfg.get("missing", "fallback") == "fallback");
    CHECK(!cfg.has("missing"));

    auto copy = cfg;
    copy.set("workers", "2");
    const auto echo = tmp.path / "resolved.cfg";
    copy.save(echo);
    const auto reloaded = KeyValueConfig::load(echo);
    CHECK(reloaded.get_long("workers", 0) == 2);
    CHECK(reloaded.get("alpha", "") == "1/4");
}

TEST_CASE("full-precision double formatting round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, 0.4123456789012345, 1e-300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
