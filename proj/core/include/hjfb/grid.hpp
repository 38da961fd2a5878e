#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hjfb/box.hpp"
#include "hjfb/hamiltonian.hpp"

namespace hjfb {

/// Uniform node-centred grid on a 1D or 2D box.
///
/// Node (i, j) sits at lower + (i hx, j hy). Flat node indices are row-major
/// over (i, j): flat = i * (ny + 1) + j, so the last axis varies fastest.
class Grid {
public:
    Grid() = default;
    /// cells[k] >= 4 for every axis.
    Grid(Box box, std::array<int, 2> cells);
    /// Same number of cells on every axis.
    Grid(Box box, int cells_per_axis);

    [[nodiscard]] int dim() const noexcept { return box_.dim(); }
    [[nodiscard]] const Box& box() const noexcept { return box_; }
    [[nodiscard]] int cells(int axis) const noexcept { return cells_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] int nodes(int axis) const noexcept { return cells(axis) + 1; }
    [[nodiscard]] double spacing(int axis) const noexcept { return spacing_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] double max_spacing() const noexcept;
    [[nodiscard]] double min_spacing() const noexcept;
    [[nodiscard]] std::size_t node_count() const noexcept;

    [[nodiscard]] std::size_t flat(int i, int j = 0) const noexcept;
    [[nodiscard]] std::array<int, 2> multi(std::size_t flat) const noexcept;
    /// Flat index of the neighbour offset by `step` along `axis`.
    [[nodiscard]] std::size_t neighbour(std::size_t flat, int axis, int step) const noexcept;

    [[nodiscard]] Vec coordinates(std::size_t flat) const;
    [[nodiscard]] bool is_boundary(std::size_t flat) const noexcept;

    /// Cells are indexed by their lower-left node (i, j), i < nx, j < ny.
    [[nodiscard]] std::size_t cell_count() const noexcept;
    [[nodiscard]] std::vector<std::size_t> cell_corners(std::size_t cell) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Box box_;
    std::array<int, 2> cells_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
};

/// Node values of a scalar field on a Grid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(Grid grid, double fill = 0.0);
    GridFunction(Grid grid, std::vector<double> values);
    static GridFunction sample(const Grid& grid, const ScalarField& field);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }

    [[nodiscard]] double sup_norm() const noexcept;
    [[nodiscard]] bool all_finite() const noexcept;
    /// sup |this - other|; grids must match.
    [[nodiscard]] double distance(const GridFunction& other) const;

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// CSV with header "x,value" or "x,y,value", one row per node in flat order,
/// 17 significant digits.
void write_csv(std::ostream& out, const GridFunction& u, const std::string& value_column = "value");

/// Reads a CSV written by write_csv and checks that its coordinates match `grid`.
GridFunction read_csv(std::istream& in, const Grid& grid);

/// Infers the grid from the coordinates of a CSV written by write_csv.
GridFunction read_csv(std::istream& in);

}  // namespace hjfb
