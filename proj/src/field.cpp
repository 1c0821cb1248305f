#include "rvehom/field.hpp"

#include <cmath>
#include <stdexcept>

#include "rvehom/rng.hpp"

namespace rvehom {

namespace {

inline int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

// Vertex (i, j) -> image vertex under the isometry.
std::array<int, 2> map_vertex(const SymmetryOp& op, int i, int j, int n) {
    switch (op.kind) {
        case SymmetryOp::Kind::identity: return {i, j};
        case SymmetryOp::Kind::translate: return {wrap(i + op.shift1, n), wrap(j + op.shift2, n)};
        case SymmetryOp::Kind::rotate90: return {wrap(-j, n), wrap(i, n)};
        case SymmetryOp::Kind::reflect_x1: return {wrap(-i, n), j};
        case SymmetryOp::Kind::reflect_x2: return {i, wrap(-j, n)};
        case SymmetryOp::Kind::swap_axes: return {j, i};
    }
    return {i, j};
}

// Cell (i, j) -> image cell. A cell is identified with its low corner, so
// orientation-reversing maps shift by one.
std::array<int, 2> map_cell(const SymmetryOp& op, int i, int j, int n) {
    switch (op.kind) {
        case SymmetryOp::Kind::identity: return {i, j};
        case SymmetryOp::Kind::translate: return {wrap(i + op.shift1, n), wrap(j + op.shift2, n)};
        case SymmetryOp::Kind::rotate90: return {wrap(-j - 1, n), wrap(i, n)};
        case SymmetryOp::Kind::reflect_x1: return {wrap(-i - 1, n), j};
        case SymmetryOp::Kind::reflect_x2: return {i, wrap(-j - 1, n)};
        case SymmetryOp::Kind::swap_axes: return {j, i};
    }
    return {i, j};
}

} // namespace

bool CoefficientField::covered(int i, int j) const {
    const int n = grid_size();
    return cell_covered[std::size_t(wrap(i, n)) * n + wrap(j, n)] != 0;
}

double CoefficientField::weight(int i, int j) const {
    const int n = grid_size();
    return vertex_weight[std::size_t(wrap(i, n)) * n + wrap(j, n)];
}

std::vector<double> vertex_weights_from_cells(int n, const std::vector<std::uint8_t>& cells) {
    std::vector<double> w(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int im = wrap(i - 1, n);
        for (int j = 0; j < n; ++j) {
            const int jm = wrap(j - 1, n);
            const int count = cells[std::size_t(im) * n + jm] + cells[std::size_t(im) * n + j] +
                              cells[std::size_t(i) * n + jm] + cells[std::size_t(i) * n + j];
            w[std::size_t(i) * n + j] = 0.25 * count;
        }
    }
    return w;
}

CoefficientField sample_field(const EnsembleParams& params, std::uint64_t seed, int index) {
    params.validate();
    if (index < 1) throw std::invalid_argument("sample_field: index must be >= 1");

    const int n = params.grid_size();
    const int k = params.inclusion_cells();
    const int half = k / 2;  // k = 2*alpha*m0 is even

    CoefficientField field;
    field.params = params;
    field.realization_index = index;
    field.seed = seed;

    CounterRng rng(seed, std::uint64_t(index));
    field.rng_key = rng.key();

    const long count = long(params.L) * params.L;
    field.centers.reserve(std::size_t(count));
    field.cell_covered.assign(std::size_t(n) * n, 0);
    for (long s = 0; s < count; ++s) {
        const int c1 = int(rng.below(std::uint64_t(n)));
        const int c2 = int(rng.below(std::uint64_t(n)));
        field.centers.push_back({c1, c2});
        for (int di = -half; di < half; ++di) {
            const int i = wrap(c1 + di, n);
            for (int dj = -half; dj < half; ++dj) {
                field.cell_covered[std::size_t(i) * n + wrap(c2 + dj, n)] = 1;
            }
        }
    }
    field.rng_draws = rng.position();
    field.vertex_weight = vertex_weights_from_cells(n, field.cell_covered);
    return field;
}

std::vector<double> coefficient_on_grid(const CoefficientField& field) {
    const double lambda = field.params.lambda;
    std::vector<double> a(field.vertex_weight.size());
    for (std::size_t v = 0; v < a.size(); ++v)
        a[v] = lambda + (1.0 - lambda) * field.vertex_weight[v];
    return a;
}

CoefficientField transform_field(const CoefficientField& field, const SymmetryOp& op) {
    const int n = field.grid_size();
    CoefficientField out;
    out.params = field.params;
    out.realization_index = field.realization_index;
    out.seed = field.seed;
    out.rng_key = field.rng_key;
    out.rng_draws = field.rng_draws;

    out.cell_covered.assign(field.cell_covered.size(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto [ti, tj] = map_cell(op, i, j, n);
            out.cell_covered[std::size_t(ti) * n + tj] =
                field.cell_covered[std::size_t(i) * n + j];
        }
    }
    out.centers.reserve(field.centers.size());
    for (const auto& c : field.centers) {
        const auto [ti, tj] = map_vertex(op, c[0], c[1], n);
        out.centers.push_back({ti, tj});
    }
    out.vertex_weight = vertex_weights_from_cells(n, out.cell_covered);
    return out;
}

CoefficientField field_from_cells(const EnsembleParams& params, std::vector<std::uint8_t> cells) {
    params.validate();
    const int n = params.grid_size();
    if (cells.size() != std::size_t(n) * n)
        throw std::invalid_argument("field_from_cells: indicator size mismatch");
    CoefficientField field;
    field.params = params;
    field.cell_covered = std::move(cells);
    field.vertex_weight = vertex_weights_from_cells(n, field.cell_covered);
    return field;
}

CoefficientField stripe_field(const EnsembleParams& params, int axis, double fill) {
    if (axis != 0 && axis != 1) throw std::invalid_argument("stripe_field: axis must be 0 or 1");
    const int n = params.grid_size();
    const int covered = int(std::lround(fill * n));
    std::vector<std::uint8_t> cells(std::size_t(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cells[std::size_t(i) * n + j] = std::uint8_t((axis == 0 ? i : j) < covered);
    return field_from_cells(params, std::move(cells));
}

CoefficientField refine_field(const CoefficientField& field, int levels) {
    if (levels < 0) throw std::invalid_argument("refine_field: levels must be >= 0");
    if (levels == 0) return field;

    const int factor = 1 << levels;
    const int n = field.grid_size();
    const int fine = n * factor;

    CoefficientField out;
    out.params = field.params;
    out.params.m0 = field.params.m0 * factor;
    out.realization_index = field.realization_index;
    out.seed = field.seed;
    out.rng_key = field.rng_key;
    out.rng_draws = field.rng_draws;

    out.centers.reserve(field.centers.size());
    for (const auto& c : field.centers) out.centers.push_back({c[0] * factor, c[1] * factor});

    out.cell_covered.assign(std::size_t(fine) * fine, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!field.cell_covered[std::size_t(i) * n + j]) continue;
            for (int di = 0; di < factor; ++di) {
                const std::size_t row = std::size_t(i * factor + di) * fine;
                for (int dj = 0; dj < factor; ++dj) out.cell_covered[row + j * factor + dj] = 1;
            }
        }
    }
    out.vertex_weight = vertex_weights_from_cells(fine, out.cell_covered);
    return out;
}

} // namespace rvehom
