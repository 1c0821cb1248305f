#include "rvehom/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rvehom {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

} // namespace

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(std::numeric_limits<double>::max_digits10);
    ss << v;
    return ss.str();
}

void write_field_dump(const std::filesystem::path& path, const CoefficientField& field) {
    const int n = field.grid_size();
    auto out = open_out(path);
    out << n << ' ' << field.params.L << ' ' << field.params.m0 << ' '
        << field.params.alpha.str() << ' ' << format_double(field.params.lambda) << ' '
        << field.seed << ' ' << field.realization_index << '\n';
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            out << (field.cell_covered[std::size_t(i) * n + j] ? '1' : '0');
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

CoefficientField read_field_dump(const std::filesystem::path& path) {
    auto in = open_in(path);
    int n = 0;
    EnsembleParams params;
    std::string alpha_text, lambda_text;
    std::uint64_t seed = 0;
    int index = 0;
    in >> n >> params.L >> params.m0 >> alpha_text >> lambda_text >> seed >> index;
    if (!in) throw std::runtime_error("malformed field dump header: " + path.string());
    params.alpha = Rational::parse(alpha_text);
    params.lambda = std::stod(lambda_text);
    if (n != params.grid_size())
        throw std::runtime_error("field dump grid size mismatch: " + path.string());

    std::vector<std::uint8_t> cells(std::size_t(n) * n, 0);
    std::string row;
    for (int i = 0; i < n; ++i) {
        in >> row;
        if (!in || row.size() != std::size_t(n))
            throw std::runtime_error("malformed field dump row: " + path.string());
        for (int j = 0; j < n; ++j) cells[std::size_t(i) * n + j] = row[std::size_t(j)] == '1';
    }
    CoefficientField field = field_from_cells(params, std::move(cells));
    field.seed = seed;
    field.realization_index = index;
    return field;
}

void write_centers_csv(const std::filesystem::path& path, const CoefficientField& field) {
    auto out = open_out(path);
    out << "index,c1,c2\n";
    for (std::size_t s = 0; s < field.centers.size(); ++s)
        out << s + 1 << ',' << field.centers[s][0] << ',' << field.centers[s][1] << '\n';
}

std::vector<std::array<int, 2>> read_centers_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::array<int, 2>> centers;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        int idx = 0, c1 = 0, c2 = 0;
        row >> idx >> c1 >> c2;
        centers.push_back({c1, c2});
    }
    return centers;
}

void write_matrix_market(const std::filesystem::path& path, const SparseOperator& op) {
    auto out = open_out(path);
    const auto& m = op.matrix();
    long lower = 0;
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it)
            if (it.row() >= it.col()) ++lower;

    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << "% grid " << op.grid_size() << "\n";
    out << m.rows() << ' ' << m.cols() << ' ' << lower << '\n';
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it)
            if (it.row() >= it.col())
                out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value())
                    << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SparseOperator read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw std::runtime_error("not a MatrixMarket file: " + path.string());
    const bool symmetric = line.find("symmetric") != std::string::npos;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream header(line);
    long rows = 0, cols = 0, nnz = 0;
    header >> rows >> cols >> nnz;
    if (rows != cols) throw std::runtime_error("matrix must be square: " + path.string());
    const int n = int(std::lround(std::sqrt(double(rows))));
    if (long(n) * n != rows)
        throw std::runtime_error("dimension is not a grid square: " + path.string());

    std::vector<Triplet> t;
    t.reserve(std::size_t(nnz) * (symmetric ? 2 : 1));
    for (long e = 0; e < nnz; ++e) {
        long r = 0, c = 0;
        double v = 0;
        in >> r >> c >> v;
        if (!in) throw std::runtime_error("truncated MatrixMarket file: " + path.string());
        t.emplace_back(int(r - 1), int(c - 1), v);
        if (symmetric && r != c) t.emplace_back(int(c - 1), int(r - 1), v);
    }
    return SparseOperator::from_triplets(n, t);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    auto in = open_in(path);
    KeyValueConfig config;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) config.values_[key] = value;
    }
    return config;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stol(it->second);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoull(it->second);
}

void KeyValueConfig::save(const std::filesystem::path& path) const {
    auto out = open_out(path);
    for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
}

} // namespace rvehom
