#include "wegnerlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"

namespace wl {

namespace {

void check_limit(Index n, Index limit) {
  if (n > limit) {
    std::ostringstream msg;
    msg << "operator of size " << n << " exceeds the dense eigensolver limit " << limit
        << "; decouple the domain into smaller cubes or coarsen the grid";
    throw Error(ErrorKind::resource_limit, msg.str());
  }
}

Spectrum solve(const Eigen::MatrixXcd& h, const SpectralOptions& options) {
  require(h.rows() == h.cols(), "operator matrix must be square");
  check_limit(h.rows(), options.dense_limit);
  Spectrum s;
  if (h.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h, options.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "eigensolver did not converge");
  s.values = solver.eigenvalues();
  if (options.vectors) {
    s.vectors = solver.eigenvectors();
    s.residual = ((h * *s.vectors) - (*s.vectors) * s.values.asDiagonal()).colwise().norm().maxCoeff();
  }
  return s;
}

}  // namespace

Spectrum eigenvalues(const HermitianOperator& op, const SpectralOptions& options) {
  check_limit(op.size(), options.dense_limit);
  return solve(op.dense(), options);
}

Spectrum eigenvalues(const Eigen::MatrixXcd& hermitian, const SpectralOptions& options) {
  return solve(hermitian, options);
}

EnergyInterval EnergyInterval::closed(double lower, double upper) {
  EnergyInterval i{lower, upper, true, true};
  i.validate();
  return i;
}

EnergyInterval EnergyInterval::half_open(double lower, double upper) {
  EnergyInterval i{lower, upper, true, false};
  i.validate();
  return i;
}

bool EnergyInterval::contains(double e) const {
  const bool above = lower_closed ? e >= lower : e > lower;
  const bool below = upper_closed ? e <= upper : e < upper;
  return above && below;
}

void EnergyInterval::validate() const {
  require(lower < upper, "energy interval must have positive length");
}

CountingResult count_in_interval(const Spectrum& spectrum, const EnergyInterval& interval,
                                 double volume) {
  require(volume > 0.0, "volume must be positive");
  CountingResult r;
  r.volume = volume;
  for (Index i = 0; i < spectrum.values.size(); ++i)
    if (interval.contains(spectrum.values[i])) ++r.count;
  return r;
}

double finite_volume_ids(const Spectrum& spectrum, double energy, double volume) {
  require(volume > 0.0, "volume must be positive");
  const auto* begin = spectrum.values.data();
  const auto* end = begin + spectrum.values.size();
  return static_cast<double>(std::lower_bound(begin, end, energy) - begin) / volume;
}

double heat_trace(const Spectrum& spectrum, double beta) {
  require(beta > 0.0, "beta must be positive");
  if (spectrum.values.size() == 0) return 0.0;
  const double exponent = -beta * spectrum.values.minCoeff();
  if (exponent > std::log(std::numeric_limits<double>::max()) - 40.0) {
    std::ostringstream msg;
    msg << "heat trace overflows: beta * lambda_min = " << -exponent;
    throw Error(ErrorKind::numerical, msg.str());
  }
  double sum = 0.0;
  for (Index i = 0; i < spectrum.values.size(); ++i) sum += std::exp(-beta * spectrum.values[i]);
  return sum;
}

SpectralCalculus::SpectralCalculus(const Eigen::MatrixXcd& hermitian) {
  SpectralOptions opts;
  opts.vectors = true;
  Spectrum s = solve(hermitian, opts);
  values_ = std::move(s.values);
  vectors_ = std::move(*s.vectors);
}

SpectralCalculus::SpectralCalculus(const HermitianOperator& op) : SpectralCalculus(op.dense()) {}

Eigen::VectorXcd SpectralCalculus::apply(const std::function<std::complex<double>(double)>& f,
                                         const Eigen::VectorXcd& psi) const {
  require(psi.size() == size(), "vector dimension does not match the operator");
  Eigen::VectorXcd coeff = vectors_.adjoint() * psi;
  for (Index i = 0; i < coeff.size(); ++i) coeff[i] *= f(values_[i]);
  return vectors_ * coeff;
}

Eigen::MatrixXcd SpectralCalculus::matrix(const std::function<std::complex<double>(double)>& f) const {
  Eigen::VectorXcd fv(size());
  for (Index i = 0; i < size(); ++i) fv[i] = f(values_[i]);
  return vectors_ * fv.asDiagonal() * vectors_.adjoint();
}

Eigen::VectorXcd semigroup_apply(const SpectralCalculus& calc, double t, const Eigen::VectorXcd& psi) {
  require(t >= 0.0, "semigroup time must be non-negative");
  require(psi.size() == calc.size(), "vector dimension does not match the operator");
  if (t == 0.0) return psi;
  return calc.apply([t](double l) { return std::complex<double>(std::exp(-t * l), 0.0); }, psi);
}

Eigen::VectorXcd semigroup_apply(const HermitianOperator& op, double t, const Eigen::VectorXcd& psi) {
  require(psi.size() == op.size(), "vector dimension does not match the operator");
  if (t == 0.0) return psi;
  return semigroup_apply(SpectralCalculus(op), t, psi);
}

namespace {

void check_resolvent_args(const SpectralCalculus& calc, std::complex<double> z, double alpha) {
  require(alpha > 0.0, "resolvent power must be positive");
  if (calc.size() > 0 && !(z.real() < calc.eigenvalues().minCoeff())) {
    std::ostringstream msg;
    msg << "Re z = " << z.real() << " is not below the spectrum (min eigenvalue "
        << calc.eigenvalues().minCoeff() << ")";
    fail(msg.str());
  }
}

}  // namespace

Eigen::VectorXcd resolvent_power_apply(const SpectralCalculus& calc, std::complex<double> z,
                                       double alpha, const Eigen::VectorXcd& psi) {
  check_resolvent_args(calc, z, alpha);
  return calc.apply([z, alpha](double l) { return std::pow(std::complex<double>(l) - z, -alpha); }, psi);
}

Eigen::VectorXcd resolvent_power_apply(const HermitianOperator& op, std::complex<double> z,
                                       double alpha, const Eigen::VectorXcd& psi) {
  return resolvent_power_apply(SpectralCalculus(op), z, alpha, psi);
}

Eigen::VectorXcd resolvent_power_laplace(const SpectralCalculus& calc, std::complex<double> z,
                                         double alpha, const Eigen::VectorXcd& psi,
                                         double tolerance) {
  check_resolvent_args(calc, z, alpha);
  require(psi.size() == calc.size(), "vector dimension does not match the operator");
  // t = u^{1/alpha} turns t^{alpha-1} dt into du / alpha and removes the endpoint singularity
  auto integrand = [&](double u) -> Eigen::VectorXcd {
    const double t = std::pow(u, 1.0 / alpha);
    if (!std::isfinite(t)) return Eigen::VectorXcd::Zero(psi.size());
    return calc.apply([&](double l) { return std::exp(t * (z - l)); }, psi);
  };
  boost::math::quadrature::exp_sinh<double> rule;
  Eigen::VectorXcd out(psi.size());
  for (Index i = 0; i < psi.size(); ++i) {
    const double re = rule.integrate([&](double u) { return integrand(u)[i].real(); }, tolerance);
    const double im = rule.integrate([&](double u) { return integrand(u)[i].imag(); }, tolerance);
    out[i] = std::complex<double>(re, im);
  }
  return out / (alpha * std::tgamma(alpha));
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "index,eigenvalue\n";
  for (Index i = 0; i < spectrum.values.size(); ++i)
    out << i << ',' << fmt_double(spectrum.values[i]) << '\n';
}

}  // namespace wl
