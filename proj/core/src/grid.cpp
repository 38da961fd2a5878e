#include "hjfb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "hjfb/errors.hpp"

namespace hjfb {

Grid::Grid(Box box, std::array<int, 2> cells) : box_(std::move(box)), cells_(cells) {
    if (box_.dim() < 1 || box_.dim() > 2) throw InvalidArgument("grids are 1D or 2D");
    for (int k = 0; k < 2; ++k) {
        if (k >= box_.dim()) {
            cells_[static_cast<std::size_t>(k)] = 0;
            spacing_[static_cast<std::size_t>(k)] = 1.0;
            continue;
        }
        if (cells_[static_cast<std::size_t>(k)] < 4) throw InvalidArgument("grids need >= 4 cells per axis");
        spacing_[static_cast<std::size_t>(k)] =
            (box_.upper[k] - box_.lower[k]) / cells_[static_cast<std::size_t>(k)];
    }
}

Grid::Grid(Box box, int cells_per_axis) : Grid(std::move(box), {cells_per_axis, cells_per_axis}) {}

double Grid::max_spacing() const noexcept {
    return dim() == 1 ? spacing_[0] : std::max(spacing_[0], spacing_[1]);
}

double Grid::min_spacing() const noexcept {
    return dim() == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

std::size_t Grid::node_count() const noexcept {
    std::size_t n = static_cast<std::size_t>(nodes(0));
    if (dim() == 2) n *= static_cast<std::size_t>(nodes(1));
    return n;
}

std::size_t Grid::flat(int i, int j) const noexcept {
    if (dim() == 1) return static_cast<std::size_t>(i);
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nodes(1)) +
           static_cast<std::size_t>(j);
}

std::array<int, 2> Grid::multi(std::size_t flat) const noexcept {
    if (dim() == 1) return {static_cast<int>(flat), 0};
    const auto ny = static_cast<std::size_t>(nodes(1));
    return {static_cast<int>(flat / ny), static_cast<int>(flat % ny)};
}

std::size_t Grid::neighbour(std::size_t flat, int axis, int step) const noexcept {
    if (dim() == 1 || axis == 1) return static_cast<std::size_t>(static_cast<long long>(flat) + step);
    return static_cast<std::size_t>(static_cast<long long>(flat) +
                                    static_cast<long long>(step) * nodes(1));
}

Vec Grid::coordinates(std::size_t flat) const {
    const auto ij = multi(flat);
    Vec x(dim());
    for (int k = 0; k < dim(); ++k) x[k] = box_.lower[k] + ij[static_cast<std::size_t>(k)] * spacing(k);
    return x;
}

bool Grid::is_boundary(std::size_t flat) const noexcept {
    const auto ij = multi(flat);
    for (int k = 0; k < dim(); ++k) {
        const int i = ij[static_cast<std::size_t>(k)];
        if (i == 0 || i == cells(k)) return true;
    }
    return false;
}

std::size_t Grid::cell_count() const noexcept {
    std::size_t n = static_cast<std::size_t>(cells(0));
    if (dim() == 2) n *= static_cast<std::size_t>(cells(1));
    return n;
}

std::vector<std::size_t> Grid::cell_corners(std::size_t cell) const {
    if (dim() == 1) return {cell, cell + 1};
    const auto ny = static_cast<std::size_t>(cells(1));
    const int i = static_cast<int>(cell / ny);
    const int j = static_cast<int>(cell % ny);
    return {flat(i, j), flat(i + 1, j), flat(i, j + 1), flat(i + 1, j + 1)};
}

GridFunction::GridFunction(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
        throw DimensionMismatch("value count does not match grid node count");
    }
}

GridFunction GridFunction::sample(const Grid& grid, const ScalarField& field) {
    GridFunction u(grid);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = field(grid.coordinates(k));
    return u;
}

double GridFunction::sup_norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

bool GridFunction::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::distance(const GridFunction& other) const {
    if (!(grid_ == other.grid_)) throw DimensionMismatch("grid functions live on different grids");
    double s = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) s = std::max(s, std::abs(values_[k] - other.values_[k]));
    return s;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvRows {
    int dim = 0;
    std::vector<Vec> points;
    std::vector<double> values;
};

CsvRows parse_rows(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw InvalidArgument("empty CSV");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto commas = std::count(header.begin(), header.end(), ',');
    if (commas < 1 || commas > 2 || header.rfind("x,", 0) != 0) {
        throw InvalidArgument("CSV header must be x,value or x,y,value");
    }
    CsvRows rows;
    rows.dim = static_cast<int>(commas);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> fields;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw InvalidArgument("malformed CSV number: " + cell);
            }
        }
        if (static_cast<int>(fields.size()) != rows.dim + 1) throw InvalidArgument("malformed CSV row");
        if (!std::isfinite(fields.back())) throw InvalidArgument("non-finite CSV value");
        Vec x(rows.dim);
        for (int k = 0; k < rows.dim; ++k) x[k] = fields[static_cast<std::size_t>(k)];
        rows.points.push_back(x);
        rows.values.push_back(fields.back());
    }
    return rows;
}

GridFunction match(const CsvRows& rows, const Grid& grid) {
    if (rows.dim != grid.dim() || rows.values.size() != grid.node_count()) {
        throw InvalidArgument("CSV does not match the grid");
    }
    const double tol = 1e-9 * std::max(1.0, grid.box().diameter());
    for (std::size_t k = 0; k < rows.points.size(); ++k) {
        if ((rows.points[k] - grid.coordinates(k)).norm() > tol) {
            throw InvalidArgument("CSV node coordinates do not match the grid");
        }
    }
    return GridFunction(grid, rows.values);
}

}  // namespace

void write_csv(std::ostream& out, const GridFunction& u, const std::string& value_column) {
    const Grid& g = u.grid();
    out << (g.dim() == 1 ? "x," : "x,y,") << value_column << '\n';
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec x = g.coordinates(k);
        for (int a = 0; a < g.dim(); ++a) out << format_double(x[a]) << ',';
        out << format_double(u[k]) << '\n';
    }
}

GridFunction read_csv(std::istream& in, const Grid& grid) { return match(parse_rows(in), grid); }

GridFunction read_csv(std::istream& in) {
    const CsvRows rows = parse_rows(in);
    if (rows.points.empty()) throw InvalidArgument("CSV has no rows");
    Vec lo = rows.points.front();
    Vec hi = rows.points.front();
    for (const auto& p : rows.points) {
        for (int k = 0; k < rows.dim; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    std::array<int, 2> cells{0, 0};
    if (rows.dim == 1) {
        cells[0] = static_cast<int>(rows.points.size()) - 1;
    } else {
        // Row-major with y fastest: the y coordinate first repeats after ny+1 rows.
        std::size_t ny1 = 1;
        while (ny1 < rows.points.size() && rows.points[ny1][0] == rows.points[0][0]) ++ny1;
        if (rows.points.size() % ny1 != 0) throw InvalidArgument("CSV is not a full tensor grid");
        cells[1] = static_cast<int>(ny1) - 1;
        cells[0] = static_cast<int>(rows.points.size() / ny1) - 1;
    }
    try {
        return match(rows, Grid(Box(lo, hi), cells));
    } catch (const DimensionMismatch&) {
        throw InvalidArgument("CSV is not a uniform grid");
    }
}

}  // namespace hjfb
