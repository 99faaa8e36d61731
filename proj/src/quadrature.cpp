#include "wegnerlab/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wegnerlab/error.hpp"

namespace wl {

namespace {

// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components times the total mass.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mass) {
  const Eigen::Index n = off_diagonal.size() + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diagonal[k];
    jacobi(k + 1, k) = off_diagonal[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mass * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  require(n >= 1, "quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(off, 2.0);
}

QuadratureRule mapped(const QuadratureRule& rule, double a, double b) {
  QuadratureRule out;
  out.nodes = (0.5 * (b - a)) * (rule.nodes.array() + 1.0) + a;
  out.weights = 0.5 * (b - a) * rule.weights;
  return out;
}

QuadratureRule gauss_hermite_normal(int n) {
  require(n >= 1, "quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  return golub_welsch(off, 1.0);
}

IntegrationResult integrate(const std::function<double(double)>& f, double a, double b,
                            double tolerance) {
  IntegrationResult r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, tolerance,
                                                                         &r.error);
  return r;
}

}  // namespace wl
