#include "wegnerlab/grid.hpp"

#include <cmath>
#include <string>

#include "wegnerlab/error.hpp"

namespace wl {

GridSpec GridSpec::cube(int dim, int cells, double spacing) {
  return cube(dim, cells, spacing, Eigen::VectorXd::Zero(dim));
}

GridSpec GridSpec::cube(int dim, int cells, double spacing, const Eigen::VectorXd& origin) {
  GridSpec g;
  g.dim = dim;
  g.shape = {1, 1, 1};
  for (int k = 0; k < dim && k < 3; ++k) g.shape[k] = cells;
  g.spacing = spacing;
  g.origin = origin;
  g.validate();
  return g;
}

GridSpec GridSpec::unit_cells(int dim, int side, int nodes_per_unit) {
  require(nodes_per_unit >= 1, "nodes_per_unit must be >= 1");
  return cube(dim, side * nodes_per_unit, 1.0 / nodes_per_unit,
              Eigen::VectorXd::Constant(dim, -0.5));
}

GridSpec GridSpec::centered(int dim, int cells, double spacing) {
  return cube(dim, cells, spacing, Eigen::VectorXd::Constant(dim, -0.5 * cells * spacing));
}

void GridSpec::validate() const {
  require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
  require(std::isfinite(spacing) && spacing > 0.0, "grid spacing must be positive");
  require(origin.size() == dim, "grid origin has wrong dimension");
  for (int k = 0; k < 3; ++k) {
    if (k < dim)
      require(shape[k] >= 1, "grid needs at least one node per axis");
    else
      require(shape[k] == 1, "unused grid axes must have extent 1");
  }
}

Index GridSpec::node_count() const {
  return static_cast<Index>(shape[0]) * shape[1] * shape[2];
}

double GridSpec::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= extent(k);
  return v;
}

bool GridSpec::is_cube() const {
  for (int k = 1; k < dim; ++k)
    if (shape[k] != shape[0]) return false;
  return true;
}

std::array<int, 3> GridSpec::multi_index(Index linear) const {
  std::array<int, 3> m{0, 0, 0};
  m[0] = static_cast<int>(linear % shape[0]);
  linear /= shape[0];
  m[1] = static_cast<int>(linear % shape[1]);
  m[2] = static_cast<int>(linear / shape[1]);
  return m;
}

Index GridSpec::linear_index(const std::array<int, 3>& m) const {
  return m[0] + static_cast<Index>(shape[0]) * (m[1] + static_cast<Index>(shape[1]) * m[2]);
}

Eigen::VectorXd GridSpec::node(Index linear) const {
  const auto m = multi_index(linear);
  Eigen::VectorXd x(dim);
  for (int k = 0; k < dim; ++k) x[k] = origin[k] + (m[k] + 0.5) * spacing;
  return x;
}

Eigen::MatrixXd GridSpec::node_positions() const {
  Eigen::MatrixXd p(node_count(), dim);
  for (Index i = 0; i < node_count(); ++i) p.row(i) = node(i).transpose();
  return p;
}

std::pair<GridSpec, GridSpec> GridSpec::bisect(int axis, int first_cells) const {
  require(axis >= 0 && axis < dim, "bisection axis out of range");
  require(first_cells >= 1 && first_cells < shape[axis], "bisection must leave both parts non-empty");
  GridSpec a = *this;
  GridSpec b = *this;
  a.shape[axis] = first_cells;
  b.shape[axis] = shape[axis] - first_cells;
  b.origin[axis] = origin[axis] + first_cells * spacing;
  return {a, b};
}

std::vector<GridSpec> GridSpec::subdivide(int parts) const {
  require(parts >= 1, "subdivision needs at least one part per axis");
  for (int k = 0; k < dim; ++k)
    require(shape[k] % parts == 0, "grid extent is not divisible into " + std::to_string(parts) + " parts");
  std::vector<GridSpec> out;
  std::array<int, 3> counts{1, 1, 1};
  for (int k = 0; k < dim; ++k) counts[k] = parts;
  for (int c = 0; c < counts[2]; ++c)
    for (int b = 0; b < counts[1]; ++b)
      for (int a = 0; a < counts[0]; ++a) {
        GridSpec sub = *this;
        const std::array<int, 3> block{a, b, c};
        for (int k = 0; k < dim; ++k) {
          sub.shape[k] = shape[k] / parts;
          sub.origin[k] = origin[k] + block[k] * sub.shape[k] * spacing;
        }
        out.push_back(sub);
      }
  return out;
}

std::array<int, 3> GridSpec::offset_of(const GridSpec& child) const {
  require(child.dim == dim && child.spacing == spacing, "sub-grid must share dimension and spacing");
  std::array<int, 3> off{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    const double steps = (child.origin[k] - origin[k]) / spacing;
    const double rounded = std::round(steps);
    require(std::abs(steps - rounded) < 1e-9, "sub-grid is not aligned with the parent grid");
    off[k] = static_cast<int>(rounded);
    require(off[k] >= 0 && off[k] + child.shape[k] <= shape[k], "sub-grid is not contained in the parent grid");
  }
  return off;
}

Eigen::VectorXd restrict_to(const GridSpec& parent, const Eigen::VectorXd& values,
                            const GridSpec& child) {
  require(values.size() == parent.node_count(), "field size does not match the grid");
  const auto off = parent.offset_of(child);
  Eigen::VectorXd out(child.node_count());
  for (Index i = 0; i < child.node_count(); ++i) {
    auto m = child.multi_index(i);
    for (int k = 0; k < 3; ++k) m[k] += off[k];
    out[i] = values[parent.linear_index(m)];
  }
  return out;
}

}  // namespace wl
