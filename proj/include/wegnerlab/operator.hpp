#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wegnerlab/gauge.hpp"
#include "wegnerlab/grid.hpp"

namespace wl {

using Complex = std::complex<double>;
using SparseMatrixXc = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

enum class Boundary { dirichlet, neumann };

char boundary_tag(Boundary bc);
Boundary parse_boundary(char tag);

/// Discretised finite-volume magnetic Schrödinger operator.
///
/// Entries (i, j) and (j, i) are written as exact complex conjugates, so the
/// matrix is Hermitian bit for bit. Rows are indexed by `nodes` (positions).
struct HermitianOperator {
  SparseMatrixXc matrix;
  Boundary bc = Boundary::neumann;
  Eigen::MatrixXd nodes;  // N x dim
  std::uint64_t potential_hash = 0;

  Index size() const { return matrix.rows(); }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }
};

/// Link phase theta for the bond from `from` to `from + h e_axis`; the hopping
/// entry is -(1/2h^2) exp(-i theta).
using BondPhase = std::function<double(const Eigen::VectorXd& from, int axis, double h)>;

/// Peierls phase h * A_axis(midpoint) of the symmetric gauge.
BondPhase symmetric_gauge_phase(const ConstantFieldGauge& gauge);

/// Kinetic part: for each interior bond, hopping -(1/2h^2) e^{-i theta} and
/// (1/2h^2) on both diagonals. X = N drops exterior bonds (reflecting);
/// X = D adds 2 (1/2h^2) per exterior bond (face Dirichlet).
HermitianOperator assemble(const GridSpec& grid, Boundary bc, const ConstantFieldGauge& gauge,
                           const Eigen::VectorXd& potential);
HermitianOperator assemble(const GridSpec& grid, Boundary bc, const ConstantFieldGauge& gauge);
HermitianOperator assemble_with_phases(const GridSpec& grid, Boundary bc, const BondPhase& phase,
                                       const Eigen::VectorXd& potential);

/// Block-diagonal direct sum over disjoint node sets.
HermitianOperator decouple(const HermitianOperator& first, const HermitianOperator& second);

/// Adds a diagonal potential to a copy of `op`.
HermitianOperator with_potential(const HermitianOperator& op, const Eigen::VectorXd& potential);

/// Coordinate text format: one `row col re im` line per stored entry.
void write_coordinate(std::ostream& out, const HermitianOperator& op);

std::uint64_t hash_values(const Eigen::VectorXd& values);

}  // namespace wl
