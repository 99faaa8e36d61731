#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wl {

using Index = Eigen::Index;

/// Axis-aligned box of cell-centred nodes.
///
/// Node `i` along axis `k` sits at `origin[k] + (i + 1/2) * spacing`, so the box
/// spans `[origin, origin + shape * spacing]` and every node owns a cell of
/// volume `spacing^dim`.
struct GridSpec {
  int dim = 1;
  std::array<int, 3> shape{1, 1, 1};
  double spacing = 1.0;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);

  static GridSpec cube(int dim, int cells, double spacing);
  static GridSpec cube(int dim, int cells, double spacing, const Eigen::VectorXd& origin);
  /// Cube of `side` unit cells Λ(j) centred on integer sites 0..side-1.
  static GridSpec unit_cells(int dim, int side, int nodes_per_unit);
  /// Cube of side `cells * spacing` centred at the origin.
  static GridSpec centered(int dim, int cells, double spacing);

  void validate() const;

  Index node_count() const;
  double extent(int axis) const { return shape[axis] * spacing; }
  double volume() const;
  bool is_cube() const;

  Eigen::VectorXd node(Index linear) const;
  std::array<int, 3> multi_index(Index linear) const;
  Index linear_index(const std::array<int, 3>& multi) const;
  /// Node positions as an (N x dim) matrix.
  Eigen::MatrixXd node_positions() const;

  /// Splits along `axis` after `first_cells` nodes.
  std::pair<GridSpec, GridSpec> bisect(int axis, int first_cells) const;
  /// Partitions into `parts^dim` congruent sub-boxes.
  std::vector<GridSpec> subdivide(int parts) const;
  /// Index offset of `child` inside this grid; throws unless aligned and contained.
  std::array<int, 3> offset_of(const GridSpec& child) const;
};

/// Restricts nodal values on `parent` to the nodes of an aligned sub-box.
Eigen::VectorXd restrict_to(const GridSpec& parent, const Eigen::VectorXd& values,
                            const GridSpec& child);

}  // namespace wl
