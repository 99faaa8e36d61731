#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "wegnerlab/error.hpp"
#include "wegnerlab/quadrature.hpp"
#include "wegnerlab/spectral.hpp"

using namespace wl;
using doctest::Approx;

namespace {

Eigen::MatrixXcd diag(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v.cast<Complex>().asDiagonal();
}

Eigen::MatrixXcd taylor_exp(const Eigen::MatrixXcd& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXcd scaled = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

TEST_CASE("eigenvalues") {
  const Spectrum s = eigenvalues(diag({3, 1, 2}));
  CHECK(s.values[0] == 1.0);
  CHECK(s.values[1] == 2.0);
  CHECK(s.values[2] == 3.0);

  const Eigen::MatrixXcd h = wltest::random_hermitian(30, 1);
  SpectralOptions opts;
  opts.vectors = true;
  const Spectrum r = eigenvalues(h, opts);
  for (Index i = 1; i < r.size(); ++i) CHECK(r.values[i - 1] <= r.values[i]);
  CHECK(r.values.sum() == Approx(h.trace().real()).epsilon(1e-8));
  CHECK(r.residual <= 1e-8 * h.cwiseAbs().maxCoeff() * 30);
  REQUIRE(r.vectors);
  CHECK((h * *r.vectors - *r.vectors * r.values.cast<Complex>().asDiagonal()).norm() < 1e-9);

  SpectralOptions tight;
  tight.dense_limit = 10;
  CHECK_THROWS_AS(eigenvalues(h, tight), Error);
  try {
    eigenvalues(h, tight);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource_limit);
  }
}

TEST_CASE("counting and IDS") {
  const Spectrum s = eigenvalues(diag({1, 1, 2}));
  CHECK(count_in_interval(s, EnergyInterval::closed(0.5, 1.5)).count == 2);
  CHECK(count_in_interval(s, EnergyInterval::closed(5, 6)).count == 0);
  CHECK(count_in_interval(s, EnergyInterval::closed(1, 2)).count == 3);
  CHECK(count_in_interval(s, EnergyInterval::half_open(1, 2)).count == 2);
  EnergyInterval open{1.0, 2.0, false, false};
  CHECK(count_in_interval(s, open).count == 0);
  CHECK(count_in_interval(s, EnergyInterval::closed(0, 4), 2.0).per_volume() == 1.5);
  CHECK_THROWS_AS(EnergyInterval::closed(1, 1).validate(), Error);

  const Spectrum r = eigenvalues(wltest::random_hermitian(20, 4));
  std::vector<double> cuts{-1e300, -3, -1, 0, 0.5, 2, 1e300};
  Index total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += count_in_interval(r, EnergyInterval::half_open(cuts[i], cuts[i + 1])).count;
  CHECK(total == 20);

  const Spectrum d = eigenvalues(diag({0, 1}));
  CHECK(finite_volume_ids(d, -1.0, 2.0) == 0.0);
  CHECK(finite_volume_ids(d, 1.0, 2.0) == 0.5);
  CHECK(finite_volume_ids(d, 1.5, 2.0) == 1.0);
  double previous = 0.0;
  for (double e = -4; e <= 4; e += 0.01) {
    const double n = finite_volume_ids(r, e, 3.0);
    CHECK(n >= previous);
    previous = n;
  }
  for (Index i = 0; i < r.size(); ++i) CHECK(finite_volume_ids(r, r.values[i], 1.0) <= i);
}

TEST_CASE("heat trace") {
  CHECK(heat_trace(eigenvalues(diag({0})), 3.0) == 1.0);
  CHECK(heat_trace(eigenvalues(diag({0, 1})), std::log(2.0)) == Approx(1.5));
  CHECK(heat_trace(eigenvalues(diag({0, 1})), 1.0) == Approx(1.0 + std::exp(-1.0)));
  CHECK_THROWS_AS(heat_trace(eigenvalues(diag({-1e6})), 1.0), Error);
}

TEST_CASE("semigroup") {
  const Eigen::MatrixXcd h = wltest::random_hermitian(8, 7);
  const SpectralCalculus calc(h);
  const Eigen::VectorXcd psi = wltest::random_vector(8, 8);
  CHECK((semigroup_apply(calc, 0.0, psi) - psi).norm() <= 1e-14 * psi.norm());
  for (double t : {0.1, 0.7, 2.0}) {
    const Eigen::VectorXcd ref = taylor_exp(-t * h) * psi;
    CHECK((semigroup_apply(calc, t, psi) - ref).norm() <= 1e-9 * ref.norm());
  }
  const Eigen::VectorXcd both = semigroup_apply(calc, 0.3, semigroup_apply(calc, 0.5, psi));
  const Eigen::VectorXcd once = semigroup_apply(calc, 0.8, psi);
  CHECK((both - once).norm() <= 1e-9 * once.norm());

  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(1);
  CHECK(semigroup_apply(SpectralCalculus(diag({2.5})), 0.4, ones)[0].real() == Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(semigroup_apply(calc, 1.0, ones), Error);
  CHECK_THROWS_AS(semigroup_apply(calc, -1.0, psi), Error);
}

TEST_CASE("resolvent powers") {
  const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
  const SpectralCalculus two(diag({2}));
  CHECK(resolvent_power_apply(two, 0.0, 1.0, one)[0].real() == Approx(0.5));
  CHECK(resolvent_power_apply(two, 0.0, 2.0, one)[0].real() == Approx(0.25));
  CHECK_THROWS_AS(resolvent_power_apply(two, 2.5, 1.0, one), Error);
  CHECK_THROWS_AS(resolvent_power_apply(two, 0.0, 0.0, one), Error);

  const Eigen::MatrixXcd h = wltest::random_hermitian(6, 11);
  const SpectralCalculus calc(h);
  const Eigen::VectorXcd psi = wltest::random_vector(6, 12);
  const double floor = calc.eigenvalues()[0];
  for (std::complex<double> z : {std::complex<double>(floor - 1.0, 0.0), std::complex<double>(floor - 0.5, 2.0)})
    for (double alpha : {0.5, 1.0, 2.0}) {
      const Eigen::VectorXcd a = resolvent_power_apply(calc, z, alpha, psi);
      const Eigen::VectorXcd b = resolvent_power_laplace(calc, z, alpha, psi);
      CHECK((a - b).norm() <= 1e-6 * a.norm());
    }
  const Eigen::VectorXcd inv = (h - Complex(floor - 1.0) * Eigen::MatrixXcd::Identity(6, 6)).inverse() * psi;
  CHECK((resolvent_power_apply(calc, floor - 1.0, 1.0, psi) - inv).norm() <= 1e-10 * inv.norm());
}

TEST_CASE("quadrature rules") {
  const QuadratureRule gl = gauss_legendre(10);
  CHECK(gl.weights.sum() == Approx(2.0));
  CHECK((gl.weights.array() * gl.nodes.array().pow(18)).sum() == Approx(2.0 / 19.0));
  const QuadratureRule gh = gauss_hermite_normal(20);
  CHECK(gh.weights.sum() == Approx(1.0));
  CHECK((gh.weights.array() * gh.nodes.array().square()).sum() == Approx(1.0));
  CHECK((gh.weights.array() * gh.nodes.array().pow(4)).sum() == Approx(3.0));
  const IntegrationResult r = integrate([](double x) { return std::exp(-x * x); }, -10, 10);
  CHECK(r.value == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("spectrum export") {
  std::ostringstream out;
  write_spectrum_csv(out, eigenvalues(diag({2, 1})));
  CHECK(out.str().find("0,1\n1,2\n") != std::string::npos);
}
