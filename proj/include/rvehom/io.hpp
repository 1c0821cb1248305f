#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rvehom/field.hpp"
#include "rvehom/sparse.hpp"

namespace rvehom {

/// Plain-text field dump: header "n L m0 alpha lambda seed index", then n
/// rows of n characters '0'/'1' (cell indicator, first index as row).
/// Round-trips bit-exactly; lambda is printed with full precision.
void write_field_dump(const std::filesystem::path& path, const CoefficientField& field);
CoefficientField read_field_dump(const std::filesystem::path& path);

/// CSV of inclusion centers: "index,c1,c2".
void write_centers_csv(const std::filesystem::path& path, const CoefficientField& field);
std::vector<std::array<int, 2>> read_centers_csv(const std::filesystem::path& path);

/// MatrixMarket coordinate format, symmetric (lower triangle stored).
void write_matrix_market(const std::filesystem::path& path, const SparseOperator& op);
SparseOperator read_matrix_market(const std::filesystem::path& path);

/// Flat key=value run configuration ('#' starts a comment).
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    long get_long(const std::string& key, long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void save(const std::filesystem::path& path) const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Full-precision decimal formatting (round-trips doubles exactly).
std::string format_double(double v);

} // namespace rvehom
