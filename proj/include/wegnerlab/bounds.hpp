#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "wegnerlab/estimators.hpp"
#include "wegnerlab/random_fields.hpp"
#include "wegnerlab/spectral.hpp"

namespace wl {

/// Constants of the finite-volume Wegner estimate.
struct WegnerConstants {
  double v1 = 1.0;
  double v2 = 1.0;
  double beta = 1.0;
  double density_bound = 1.0;  // R, ess sup of the weighted conditional density
  double trace_bound = 1.0;    // Z, bound on E Tr e^{-beta H_N(A, U_j)} / |Λ_j|
  int dim = 2;

  void validate() const;
};

/// |Λ| |I| (R Z / v1) e^{beta sup I}.
double wegner_rhs(const WegnerConstants& c, double volume, const EnergyInterval& interval);

/// (|Λ|^{-1/d} + (2 pi beta)^{-1/2})^d, the free Neumann partition-function bound per volume.
double free_trace_factor(double cell_volume, int dim, double beta);

double z3(double beta, double cell_volume, int dim, double mgf_sup);

/// |Λ_j|^{-1} E Tr e^{-beta H_N(0, U_j)} over the ensemble of backgrounds.
MCResult z1_estimate(const EnsembleSpec& cell_spec,
                     const std::function<Eigen::VectorXd(const FieldRealization&)>& background,
                     double beta, const RunOptions& options = {});

/// |Λ_j|^{-1} Tr e^{-beta H_N(A, 0)} times the moment-generating supremum.
double z2_estimate(const HermitianOperator& free_neumann, double cell_volume, double beta,
                   double mgf_sup);

/// ess sup_x E[e^{-beta U_j(x)}] for the alloy background U_j = V - lambda_j u_j,
/// over the full lattice.
double alloy_mgf_sup(const AlloyModel& model, int dim, double beta);

/// Largest ess sup over the nodes of an ensemble grid of E[e^{-beta U(x)}] for a
/// Gaussian background with Var U(x) = C(0) - u(x)^2.
double gaussian_mgf_sup(const CovarianceModel& model, const Eigen::VectorXd& profile, double beta);

double w_alloy_uniform(double energy, int dim, double beta, double gmax, double v1);

/// K_beta = -inf_{x in Λ(0)} sum_j ln(1 - (beta alpha u0(x - j))^2).
double k_beta(const SingleSiteProfile& profile, int dim, double alpha, double beta);
double w_alloy_laplace(double energy, int dim, double beta, double alpha, double v1, double k_beta);

struct GaussBoundParams {
  double c0 = 1.0;
  double ell = 1.0;
  double s = 0.0;
  double upper = 1.0;   // B_l = sup u / sqrt(C0) over Λ^(l)
  double lower = 1.0;   // b_l = inf u / sqrt(C0) over Λ^(l)
  double c_ell = 1.0;   // C0 (1 + B_l^2 - b_l^2)
  double gamma = 0.0;
};

/// Constants over the origin-centred cube of edge `ell`; `gamma` is the
/// threshold defining Γ = {u >= gamma sqrt(C0)}.
GaussBoundParams gauss_constants(const CovarianceModel& model, double s, double ell,
                                 double gamma = 1e-3);
/// Largest admissible edge for the given gamma.
double gauss_max_ell(const CovarianceModel& model, double s, double gamma);

double w_gauss(double energy, int dim, double beta, const GaussBoundParams& p);
double log_w_gauss(double energy, int dim, double beta, const GaussBoundParams& p);

// ---------------------------------------------------------------------------

struct AlloyUniformFamily {
  int dim = 2;
  double gmax = 1.0;
  double v1 = 1.0;
};

struct AlloyLaplaceFamily {
  int dim = 2;
  double alpha = 1.0;
  double v1 = 1.0;
  SingleSiteProfile profile;
};

struct GaussFamily {
  CovarianceModel model;
  double gamma = 1e-3;
};

using BoundFamily = std::variant<AlloyUniformFamily, AlloyLaplaceFamily, GaussFamily>;

std::string family_name(const BoundFamily& family);

struct BoundPoint {
  double beta = 0.0;
  double ell = 0.0;
  double s = 0.0;
};

struct SearchDomain {
  double beta_min = 0.0;
  double beta_max = 0.0;
  double ell_min = 0.0;
  double ell_max = 0.0;
  double s_max = 0.0;
  int grid_points = 40;
};

/// Default domain: beta in [1e-3, 1e3] (scaled by C0^{-1/2} for the Gauss family,
/// capped by admissibility for Laplace), ell in (0, ell_max], s in [0, 3 tau].
SearchDomain default_domain(const BoundFamily& family);
bool feasible(const BoundFamily& family, const SearchDomain& domain, const BoundPoint& point);

/// log W at a parameter point; +inf when infeasible.
double log_bound(const BoundFamily& family, double energy, const BoundPoint& point);

struct BoundMinimum {
  double value = 0.0;  // W*
  double log_value = 0.0;
  BoundPoint argmin;
};

/// Coordinate descent on log-spaced grids with golden-section refinement.
BoundMinimum minimize_bound(const BoundFamily& family, double energy, const SearchDomain& domain);
BoundMinimum minimize_bound(const BoundFamily& family, double energy, const SearchDomain& domain,
                            const std::vector<BoundPoint>& seeds);

struct BoundCurve {
  std::string family;
  std::vector<double> energies;
  std::vector<double> values;
  std::vector<BoundPoint> argmin;
};

/// Minimises at every energy, then re-seeds each energy with the other argmins.
BoundCurve minimize_curve(const BoundFamily& family, const std::vector<double>& energies,
                          const SearchDomain& domain, int jobs = 1);
/// Evaluates at a fixed parameter point.
BoundCurve evaluate_curve(const BoundFamily& family, const std::vector<double>& energies,
                          const BoundPoint& point);

void write_bound_csv(std::ostream& out, const BoundCurve& curve);

// ---------------------------------------------------------------------------

/// l = |E|^{-1/4}, beta = (2 C_l)^{-1} (sqrt(E^2 + 2 d C_l) - E).
BoundPoint gauss_asymptotic_choice(const CovarianceModel& model, double s, double energy);

double gauss_low_energy_limit(double c0);
double gauss_high_energy_limit(int dim, double u0);

struct AsymptoticProbe {
  double energy;
  double ratio;  // ln W / E^2 (E < 0) or W / E^{d/2} (E > 0)
  double limit;
};

struct AsymptoticsReport {
  std::vector<AsymptoticProbe> low;
  std::vector<AsymptoticProbe> high;
  std::vector<std::string> warnings;
};

AsymptoticsReport gauss_asymptotics(const CovarianceModel& model, double s,
                                    const std::vector<double>& probes);

}  // namespace wl
