#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rvehom/params.hpp"

namespace rvehom {

/// Lattice-preserving isometry of the periodic grid.
struct SymmetryOp {
    enum class Kind { identity, translate, rotate90, reflect_x1, reflect_x2, swap_axes };

    Kind kind = Kind::identity;
    int shift1 = 0;
    int shift2 = 0;

    static SymmetryOp identity() { return {}; }
    static SymmetryOp translate(int d1, int d2) { return {Kind::translate, d1, d2}; }
    static SymmetryOp rotate90() { return {Kind::rotate90, 0, 0}; }
    static SymmetryOp reflect_x1() { return {Kind::reflect_x1, 0, 0}; }
    static SymmetryOp reflect_x2() { return {Kind::reflect_x2, 0, 0}; }
    static SymmetryOp swap_axes() { return {Kind::swap_axes, 0, 0}; }
};

/// One sampled realization of the two-valued coefficient field.
///
/// Arrays are stored row-major with flat index i*n + j, where i indexes the
/// first coordinate and j the second; both wrap periodically. A cell (i, j)
/// spans [i*h, (i+1)*h) x [j*h, (j+1)*h), and its four corner vertices are
/// (i, j), (i+1, j), (i, j+1), (i+1, j+1) modulo n.
struct CoefficientField {
    EnsembleParams params;
    std::vector<std::array<int, 2>> centers;   // L^2 lattice points; empty for synthetic fields
    std::vector<std::uint8_t> cell_covered;    // n*n cell indicator
    std::vector<double> vertex_weight;          // n*n values in {0, 1/4, 1/2, 3/4, 1}
    int realization_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t rng_key = 0;                  // stream identity, for reproducibility audits
    std::uint64_t rng_draws = 0;                // counter positions consumed

    int grid_size() const { return params.grid_size(); }
    bool covered(int i, int j) const;
    double weight(int i, int j) const;
};

/// Draws L^2 independent uniform inclusion centers on the n^2 lattice from
/// the counter-based stream keyed by (seed, index) and marks the periodic
/// union of k x k cell blocks centered at each of them. Vertex weights are
/// the fraction of the four incident cells that are covered.
CoefficientField sample_field(const EnsembleParams& params, std::uint64_t seed, int index);

/// Vertex-sampled coefficient lambda + (1 - lambda) * weight, flat n*n array.
std::vector<double> coefficient_on_grid(const CoefficientField& field);

/// Applies a torus isometry to the field (cells, centers, vertex weights).
CoefficientField transform_field(const CoefficientField& field, const SymmetryOp& op);

/// Builds a field from an explicit cell indicator (test fixtures, laminates).
CoefficientField field_from_cells(const EnsembleParams& params, std::vector<std::uint8_t> cells);

/// Stripe pattern covering a `fill` fraction of cells; the coefficient varies
/// along the given axis (0: depends on x1 only, 1: depends on x2 only).
CoefficientField stripe_field(const EnsembleParams& params, int axis, double fill);

/// Refines the same physical inclusion geometry onto a grid with 2^levels
/// more intervals per cell (centers scale, cell blocks replicate).
CoefficientField refine_field(const CoefficientField& field, int levels);

/// Recomputes vertex weights by counting covered incident cells.
std::vector<double> vertex_weights_from_cells(int n, const std::vector<std::uint8_t>& cells);

} // namespace rvehom
