#include "wegnerlab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <vector>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"

namespace wl {

char boundary_tag(Boundary bc) { return bc == Boundary::dirichlet ? 'D' : 'N'; }

Boundary parse_boundary(char tag) {
  if (tag == 'D' || tag == 'd') return Boundary::dirichlet;
  if (tag == 'N' || tag == 'n') return Boundary::neumann;
  fail(std::string("unknown boundary condition '") + tag + "'");
}

std::uint64_t hash_values(const Eigen::VectorXd& values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Index i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &values[i], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

BondPhase symmetric_gauge_phase(const ConstantFieldGauge& gauge) {
  return [field = gauge.field](const Eigen::VectorXd& from, int axis, double h) {
    Eigen::VectorXd mid = from;
    mid[axis] += 0.5 * h;
    // h * A_axis(mid), A_k(x) = sum_j x_j B_jk / 2
    return h * 0.5 * mid.dot(field.col(axis));
  };
}

HermitianOperator assemble_with_phases(const GridSpec& grid, Boundary bc, const BondPhase& phase,
                                       const Eigen::VectorXd& potential) {
  grid.validate();
  const Index n = grid.node_count();
  require(potential.size() == 0 || potential.size() == n, "potential size does not match the grid");
  if (potential.size() != 0 && !potential.allFinite())
    throw Error(ErrorKind::numerical, "potential contains NaN or Inf");

  const double h = grid.spacing;
  const double hop = 0.5 / (h * h);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(n) * (2 * grid.dim + 1));
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);

  for (Index i = 0; i < n; ++i) {
    const auto m = grid.multi_index(i);
    const Eigen::VectorXd x = grid.node(i);
    for (int k = 0; k < grid.dim; ++k) {
      // the backward bond is handled by the neighbour; only count exterior faces here
      if (m[k] == 0 && bc == Boundary::dirichlet) diagonal[i] += 2.0 * hop;
      if (m[k] + 1 == grid.shape[k]) {
        if (bc == Boundary::dirichlet) diagonal[i] += 2.0 * hop;
        continue;
      }
      auto mn = m;
      mn[k] += 1;
      const Index j = grid.linear_index(mn);
      const Complex value = -hop * std::polar(1.0, -phase(x, k, h));
      entries.emplace_back(static_cast<int>(i), static_cast<int>(j), value);
      entries.emplace_back(static_cast<int>(j), static_cast<int>(i), std::conj(value));
      diagonal[i] += hop;
      diagonal[j] += hop;
    }
  }
  if (potential.size() == n) diagonal += potential;
  for (Index i = 0; i < n; ++i)
    entries.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(diagonal[i], 0.0));

  HermitianOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  op.bc = bc;
  op.nodes = grid.node_positions();
  op.potential_hash = potential.size() == n ? hash_values(potential) : 0;
  return op;
}

HermitianOperator assemble(const GridSpec& grid, Boundary bc, const ConstantFieldGauge& gauge,
                           const Eigen::VectorXd& potential) {
  gauge.validate();
  require(gauge.dim() == grid.dim, "gauge dimension does not match the grid");
  return assemble_with_phases(grid, bc, symmetric_gauge_phase(gauge), potential);
}

HermitianOperator assemble(const GridSpec& grid, Boundary bc, const ConstantFieldGauge& gauge) {
  return assemble(grid, bc, gauge, Eigen::VectorXd());
}

HermitianOperator decouple(const HermitianOperator& first, const HermitianOperator& second) {
  require(first.bc == second.bc, "direct sum needs a common boundary condition");
  require(first.nodes.cols() == second.nodes.cols(), "direct sum parts differ in dimension");
  std::set<std::vector<double>> seen;
  for (Index i = 0; i < first.nodes.rows(); ++i) {
    const Eigen::VectorXd row = first.nodes.row(i);
    seen.insert(std::vector<double>(row.data(), row.data() + row.size()));
  }
  for (Index i = 0; i < second.nodes.rows(); ++i) {
    const Eigen::VectorXd row = second.nodes.row(i);
    if (seen.count(std::vector<double>(row.data(), row.data() + row.size())))
      fail("direct sum parts share a node");
  }

  const Index n1 = first.size();
  const Index n = n1 + second.size();
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(first.matrix.nonZeros() + second.matrix.nonZeros());
  for (int c = 0; c < first.matrix.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(first.matrix, c); it; ++it)
      entries.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < second.matrix.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(second.matrix, c); it; ++it)
      entries.emplace_back(static_cast<int>(it.row() + n1), static_cast<int>(it.col() + n1), it.value());

  HermitianOperator op;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  op.bc = first.bc;
  op.nodes.resize(n, first.nodes.cols());
  op.nodes << first.nodes, second.nodes;
  op.potential_hash = first.potential_hash ^ (second.potential_hash * 0x9e3779b97f4a7c15ULL);
  return op;
}

HermitianOperator with_potential(const HermitianOperator& op, const Eigen::VectorXd& potential) {
  require(potential.size() == op.size(), "potential size does not match the operator");
  if (!potential.allFinite()) throw Error(ErrorKind::numerical, "potential contains NaN or Inf");
  HermitianOperator out = op;
  for (Index i = 0; i < op.size(); ++i) out.matrix.coeffRef(i, i) += potential[i];
  out.potential_hash = hash_values(potential);
  return out;
}

void write_coordinate(std::ostream& out, const HermitianOperator& op) {
  out << "# rows=" << op.size() << " bc=" << boundary_tag(op.bc) << " nnz=" << op.matrix.nonZeros()
      << "\n";
  std::vector<std::tuple<int, int, Complex>> rows;
  for (int c = 0; c < op.matrix.outerSize(); ++c)
    for (SparseMatrixXc::InnerIterator it(op.matrix, c); it; ++it)
      rows.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  for (const auto& [r, c, v] : rows)
    out << r << ' ' << c << ' ' << fmt_double(v.real()) << ' ' << fmt_double(v.imag()) << '\n';
}

}  // namespace wl
