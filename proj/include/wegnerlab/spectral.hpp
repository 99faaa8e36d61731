#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "wegnerlab/operator.hpp"

namespace wl {

struct Spectrum {
  Eigen::VectorXd values;  // ascending, with multiplicity
  std::optional<Eigen::MatrixXcd> vectors;
  double residual = 0.0;   // max ||Hv - lambda v|| over retained pairs

  Index size() const { return values.size(); }
};

struct SpectralOptions {
  Index dense_limit = 8192;
  bool vectors = false;
};

Spectrum eigenvalues(const HermitianOperator& op, const SpectralOptions& options = {});
Spectrum eigenvalues(const Eigen::MatrixXcd& hermitian, const SpectralOptions& options = {});

struct EnergyInterval {
  double lower = 0.0;
  double upper = 1.0;
  bool lower_closed = true;
  bool upper_closed = true;

  static EnergyInterval closed(double lower, double upper);
  static EnergyInterval half_open(double lower, double upper);  // [lower, upper)

  double length() const { return upper - lower; }
  double sup() const { return upper; }
  bool contains(double energy) const;
  void validate() const;
};

struct CountingResult {
  Index count = 0;
  double volume = 1.0;
  double per_volume() const { return static_cast<double>(count) / volume; }
};

CountingResult count_in_interval(const Spectrum& spectrum, const EnergyInterval& interval,
                                 double volume = 1.0);

/// N(E)/|Λ| with Θ(0) = 0: eigenvalues strictly below E.
double finite_volume_ids(const Spectrum& spectrum, double energy, double volume);

double heat_trace(const Spectrum& spectrum, double beta);

/// Functional calculus f(H) through a cached eigendecomposition.
class SpectralCalculus {
 public:
  explicit SpectralCalculus(const Eigen::MatrixXcd& hermitian);
  explicit SpectralCalculus(const HermitianOperator& op);

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
  Index size() const { return values_.size(); }

  Eigen::VectorXcd apply(const std::function<std::complex<double>(double)>& f,
                         const Eigen::VectorXcd& psi) const;
  Eigen::MatrixXcd matrix(const std::function<std::complex<double>(double)>& f) const;

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
};

/// e^{-tH} psi.
Eigen::VectorXcd semigroup_apply(const HermitianOperator& op, double t, const Eigen::VectorXcd& psi);
Eigen::VectorXcd semigroup_apply(const SpectralCalculus& calc, double t, const Eigen::VectorXcd& psi);

/// (H - z)^{-alpha} psi, principal branch; requires Re z < min spec H.
Eigen::VectorXcd resolvent_power_apply(const HermitianOperator& op, std::complex<double> z, double alpha,
                                       const Eigen::VectorXcd& psi);
Eigen::VectorXcd resolvent_power_apply(const SpectralCalculus& calc, std::complex<double> z,
                                       double alpha, const Eigen::VectorXcd& psi);

/// Same quantity from Γ(α)^{-1} ∫_0^∞ dt t^{α-1} e^{tz} e^{-tH} psi by double-exponential quadrature.
Eigen::VectorXcd resolvent_power_laplace(const SpectralCalculus& calc, std::complex<double> z,
                                         double alpha, const Eigen::VectorXcd& psi,
                                         double tolerance = 1e-12);

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace wl
