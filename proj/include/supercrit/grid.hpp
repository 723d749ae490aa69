#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "supercrit/common.hpp"
#include "supercrit/geometry.hpp"

namespace supercrit::solver {

/// Uniform node-centered lattice with an inside mask. Outside nodes carry the
/// homogeneous Dirichlet value; inside nodes are the unknowns.
struct MaskedGrid {
    int dim = 2;  // 2 or 3
    std::array<double, 3> origin{};
    double h = 0.0;
    std::array<int, 3> extents = {1, 1, 1};
    std::vector<std::uint8_t> mask;      // lattice -> inside flag
    std::vector<std::int32_t> compact;   // lattice -> inside index, -1 outside
    std::vector<std::int64_t> nodes;     // inside index -> lattice index

    std::int64_t lattice_size() const {
        return std::int64_t(extents[0]) * extents[1] * extents[2];
    }
    std::int64_t inside_count() const { return static_cast<std::int64_t>(nodes.size()); }
    std::int64_t lattice_index(int i, int j, int k = 0) const {
        return (std::int64_t(k) * extents[1] + j) * extents[0] + i;
    }
    std::array<int, 3> lattice_coords(std::int64_t idx) const {
        std::array<int, 3> c{};
        c[0] = static_cast<int>(idx % extents[0]);
        idx /= extents[0];
        c[1] = static_cast<int>(idx % extents[1]);
        c[2] = static_cast<int>(idx / extents[1]);
        return c;
    }
    Point point_at(std::int64_t lattice) const {
        const auto c = lattice_coords(lattice);
        Point x(dim);
        for (int q = 0; q < dim; ++q) x[q] = origin[q] + h * c[q];
        return x;
    }
    double cell_volume() const { return std::pow(h, dim); }

    /// Lattice index of the mirror node across the plane {x_axis = center};
    /// the grid must have been built symmetric for this to be exact.
    std::int64_t mirror_lattice(std::int64_t lattice, int axis) const {
        auto c = lattice_coords(lattice);
        c[axis] = extents[axis] - 1 - c[axis];
        return lattice_index(c[0], c[1], c[2]);
    }
};

/// Builds the grid covering `domain` with spacing h and a margin of
/// `margin_cells` cells of outside nodes around the bounding box. When
/// `reflect_axis` is set the lattice is made symmetric about the box center
/// of that axis. Throws ConfigError when the mask does not resolve the
/// domain (no interior node has an 8-node-thick axis cross).
MaskedGrid build_grid(const geometry::ProfileDomain& domain, double h, int margin_cells = 2,
                      std::optional<int> reflect_axis = std::nullopt);

/// Grid over an explicit box; nodes on the box faces are outside (Dirichlet).
MaskedGrid build_grid_box(const Point& lo, const Point& hi, double h,
                          const std::function<bool(const Point&)>& inside);

/// Scalar field on the inside nodes of a grid.
struct Field {
    std::shared_ptr<const MaskedGrid> grid;
    std::vector<double> values;  // one entry per inside node

    static Field zeros(std::shared_ptr<const MaskedGrid> g) {
        Field f;
        f.values.assign(static_cast<std::size_t>(g->inside_count()), 0.0);
        f.grid = std::move(g);
        return f;
    }
    double sup_abs() const;
};

/// C^2 interpolant of a field: tensor-product cubic B-spline through the node
/// values (zero on outside nodes and beyond the lattice). Smoothness is what
/// makes finite-difference probes of lifted fields meaningful; values match
/// the nodes exactly.
class FieldEvaluator {
public:
    explicit FieldEvaluator(const Field& f);

    double value(const Point& x) const;
    Point gradient(const Point& x) const;
    double laplacian(const Point& x) const;
    bool in_box(const Point& x) const;

    int dim() const { return dim_; }

    struct Basis {
        int base;            // leftmost coefficient index
        double w[4], dw[4], ddw[4];
    };

private:
    Basis basis_1d(int axis, double x) const;

    int dim_;
    std::array<double, 3> origin_{};
    double h_;
    std::array<int, 3> extents_ = {1, 1, 1};
    std::vector<double> coeff_;
};

}  // namespace supercrit::solver
