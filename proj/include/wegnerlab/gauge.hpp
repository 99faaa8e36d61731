#pragma once

#include <Eigen/Dense>

namespace wl {

/// Constant magnetic field tensor B_jk in the symmetric gauge.
struct ConstantFieldGauge {
  Eigen::MatrixXd field;

  static ConstantFieldGauge none(int dim);
  /// Perpendicular field of strength `b` in the (x1, x2) plane, d >= 2.
  static ConstantFieldGauge planar(int dim, double b);

  int dim() const { return static_cast<int>(field.rows()); }
  bool is_zero() const { return field.isZero(0.0); }
  void validate() const;
};

/// A_k(x) = sum_j x_j B_jk / 2.
Eigen::VectorXd vector_potential(const ConstantFieldGauge& gauge, const Eigen::VectorXd& x);

/// Phi_x(y) = sum_{j,k} x_j B_jk (y_k - x_k) / 2.
double magnetic_translation_phase(const ConstantFieldGauge& gauge, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y);

}  // namespace wl
