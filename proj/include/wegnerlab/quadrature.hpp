#pragma once

#include <functional>

#include <Eigen/Dense>

namespace wl {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss–Legendre rule on [-1, 1] (Golub–Welsch).
QuadratureRule gauss_legendre(int n);
/// Maps a [-1, 1] rule onto [a, b].
QuadratureRule mapped(const QuadratureRule& rule, double a, double b);
/// n-point Gauss–Hermite rule for the standard normal weight (weights sum to 1).
QuadratureRule gauss_hermite_normal(int n);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss–Kronrod (15-point) on a finite interval.
IntegrationResult integrate(const std::function<double(double)>& f, double a, double b,
                            double tolerance = 1e-12);

}  // namespace wl
