#pragma once

#include <random>

#include <Eigen/Dense>

namespace wltest {

inline Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {normal(rng), normal(rng)};
  return 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXcd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {normal(rng), normal(rng)};
  return v;
}

inline Eigen::VectorXd random_real(int n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * normal(rng);
  return v;
}

}  // namespace wltest
