#include "wegnerlab/gauge.hpp"

#include <cmath>

#include "wegnerlab/error.hpp"

namespace wl {

ConstantFieldGauge ConstantFieldGauge::none(int dim) {
  return ConstantFieldGauge{Eigen::MatrixXd::Zero(dim, dim)};
}

ConstantFieldGauge ConstantFieldGauge::planar(int dim, double b) {
  require(dim >= 2 || b == 0.0, "a magnetic field needs at least two dimensions");
  ConstantFieldGauge g = none(dim);
  if (dim >= 2) {
    g.field(0, 1) = b;
    g.field(1, 0) = -b;
  }
  return g;
}

void ConstantFieldGauge::validate() const {
  require(field.rows() == field.cols(), "field tensor must be square");
  require(field.allFinite(), "field tensor must be finite");
  require((field + field.transpose()).isZero(0.0), "field tensor must be antisymmetric");
  require(dim() != 1 || is_zero(), "d = 1 admits no magnetic field");
}

Eigen::VectorXd vector_potential(const ConstantFieldGauge& gauge, const Eigen::VectorXd& x) {
  // A_k = sum_j x_j B_jk / 2
  return 0.5 * gauge.field.transpose() * x;
}

double magnetic_translation_phase(const ConstantFieldGauge& gauge, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
  return 0.5 * x.dot(gauge.field * (y - x));
}

}  // namespace wl
