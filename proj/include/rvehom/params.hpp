#pragma once

#include <cstdint>
#include <string>

namespace rvehom {

/// Exact rational number, used for the overlap factor so that grid alignment
/// checks and file round-trips are exact.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return double(num) / double(den); }
    Rational normalized() const;
    std::string str() const;

    /// Accepts "p/q" and plain decimals such as "0.25".
    static Rational parse(const std::string& text);

    friend bool operator==(const Rational& a, const Rational& b) {
        const Rational x = a.normalized(), y = b.normalized();
        return x.num == y.num && x.den == y.den;
    }
};

/// Parameters of one torus configuration: L x L unit cells, m0 grid
/// intervals per cell, inclusion half-side alpha in cell units, contrast
/// lambda, and the iterative solver tolerance.
struct EnsembleParams {
    int L = 1;
    int m0 = 4;
    Rational alpha{1, 4};
    double lambda = 1.0;
    double tol = 1e-8;

    /// Grid intervals per dimension (wrapped periodic grid).
    int grid_size() const { return m0 * L; }
    /// Periodic degrees of freedom.
    long dof_count() const { return long(grid_size()) * grid_size(); }
    double mesh_width() const { return 1.0 / grid_size(); }
    /// Inclusion side length in grid cells, k = 2 alpha m0.
    int inclusion_cells() const;

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const;
};

} // namespace rvehom
