#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wegnerlab/estimators.hpp"
#include "wegnerlab/gauge.hpp"
#include "wegnerlab/grid.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/spectral.hpp"

namespace wl {

/// Outcome of one inequality check. `worst_violation` is the largest value of
/// (left side - right side) over everything examined; negative means slack.
struct CheckReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  void settle() { pass = worst_violation <= tolerance; }
  std::string jsonl() const;
};

/// Componentwise |e^{-tH(A,v)} psi| <= e^{-tH(0,v)} |psi| for random psi, both X.
/// Violations are relative to max|psi|.
CheckReport check_diamagnetic_semigroup(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                        const Eigen::VectorXd& potential, double t, int trials,
                                        std::uint64_t seed, double tolerance = 1e-10);

/// Tr e^{-beta H(A,v)} <= Tr e^{-beta H(0,v)}, both X; relative to the right side.
CheckReport check_diamagnetic_partition(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                        const Eigen::VectorXd& potential, double beta,
                                        double tolerance = 1e-10);

/// |(H(A,v) - z)^{-alpha} psi| <= (H(0,v) - Re z)^{-alpha} |psi|, both X.
CheckReport check_resolvent_power(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                  const Eigen::VectorXd& potential, std::complex<double> z,
                                  double alpha, int trials, std::uint64_t seed,
                                  double tolerance = 1e-9);

/// Eigenvalue-wise chain λ_k(N, split) <= λ_k(N) <= λ_k(D) <= λ_k(D, split).
CheckReport check_bracketing(const GridSpec& grid, int axis, int first_cells,
                             const ConstantFieldGauge& gauge, const Eigen::VectorXd& potential,
                             double tolerance = 1e-10);

/// Spectrum of the direct sum equals the merged spectra of the parts.
CheckReport check_decoupling(const HermitianOperator& first, const HermitianOperator& second,
                             double tolerance = 1e-10);

struct SpectralAveragingInstance {
  Eigen::MatrixXcd l;
  Eigen::MatrixXcd k;
  Eigen::MatrixXcd m;
  std::function<double(double)> g;
  double g_sup = 1.0;
  EnergyInterval interval;
  Eigen::VectorXcd psi;
};

/// kappa = inf_{K phi != 0} <phi, M phi> / <phi, K^2 phi>.
double spectral_averaging_kappa(const Eigen::MatrixXcd& k, const Eigen::MatrixXcd& m);

struct SpectralAveragingValue {
  double integral = 0.0;
  double error = 0.0;
  double bound = 0.0;
  double kappa = 0.0;
};

/// Evaluates ∫ dξ |g(ξ)| <psi, K 1_I(L + ξM) K psi> piecewise between the
/// parameters where an eigenvalue of L + ξM crosses an endpoint of I.
SpectralAveragingValue spectral_averaging_integral(const SpectralAveragingInstance& instance,
                                                   double tolerance = 1e-12);

CheckReport check_spectral_averaging(const SpectralAveragingInstance& instance,
                                     double tolerance = 1e-10);

/// E Tr e^{-beta H(A,V)} <= Tr e^{-beta H(A,0)} max_x E e^{-beta V(x)} within 3 sigma.
CheckReport check_golden_thompson_avg(const EnsembleSpec& spec, double beta,
                                      const RunOptions& options = {});

/// Continuum free Neumann trace sum_n exp(-beta pi^2 |n|^2 / (2 L^2)).
double neumann_free_trace(double side, double beta, int dim);

/// neumann_free_trace <= |Λ| (|Λ|^{-1/d} + (2 pi beta)^{-1/2})^d.
CheckReport check_neumann_partition_bound(double side, double beta, int dim);

/// Ten closed intervals [0.3k, 0.3(k+1)] covering [0, 3].
std::vector<EnergyInterval> wegner_ladder();

/// Monte Carlo E nu(I) <= wegner_rhs (Z = Z3, beta minimised per interval) + 3 sigma.
CheckReport check_wegner_mc(const EnsembleSpec& spec, const std::vector<EnergyInterval>& intervals,
                            const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Randomised suites used by `verify` and the acceptance tests.

struct SuiteOptions {
  bool quick = false;
  int instances = 0;  // 0: suite default
  int jobs = 1;
  std::uint64_t seed = 20240601;
  std::optional<double> tolerance;
};

std::vector<std::string> suite_names();
/// Runs one named suite and returns its reports (the last one aggregates).
std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& options);

}  // namespace wl
