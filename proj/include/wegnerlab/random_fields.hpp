#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wegnerlab/grid.hpp"

namespace wl {

// ---------------------------------------------------------------------------
// Alloy-type fields  V(x) = sum_j lambda_j u0(x - j)

/// Single-site profile u0. The builtin profile is `height` times the indicator
/// of the open unit cube Λ(0); a tabulated profile is piecewise constant on a
/// sub-lattice of `nodes_per_unit` cells per unit length over the cube
/// [-radius - 1/2, radius + 1/2]^d (row-major, axis 0 fastest).
struct SingleSiteProfile {
  enum class Kind { indicator, tabulated };
  Kind kind = Kind::indicator;
  double height = 1.0;
  int nodes_per_unit = 1;
  int radius = 0;
  int dim = 1;
  std::vector<double> table;

  static SingleSiteProfile indicator(double height = 1.0);
  static SingleSiteProfile tabulated(int dim, int nodes_per_unit, int radius,
                                     std::vector<double> table);

  double operator()(const Eigen::VectorXd& x) const;
  double sup_abs() const;
  /// Number of unit cells beyond the home cell that the support reaches.
  int reach() const { return kind == Kind::indicator ? 0 : radius; }
  void validate() const;
};

struct UniformLaw {
  double gmax = 1.0;  // density value; must equal 1/(hi - lo)
  double lo = 0.0;
  double hi = 1.0;
};

struct LaplaceLaw {
  double alpha = 1.0;  // density e^{-|x|/alpha} / (2 alpha)
};

/// Degenerate law (no density): every coupling equals `value`.
struct FixedLaw {
  double value = 0.0;
};

using CouplingLaw = std::variant<UniformLaw, LaplaceLaw, FixedLaw>;

double draw_coupling(const CouplingLaw& law, std::mt19937_64& rng);
/// E[e^{-t lambda}]; +inf where it diverges.
double coupling_mgf(const CouplingLaw& law, double t);
/// ||g||_inf of the coupling density, or nullopt for the degenerate law.
std::optional<double> density_sup(const CouplingLaw& law);
std::string law_name(const CouplingLaw& law);

struct AlloyModel {
  SingleSiteProfile single_site;
  CouplingLaw law;
  double v1 = 1.0;  // v1 <= u0 on Λ(0)
  double v2 = 1.0;  // u0 <= v2 on Λ(0)

  void validate() const;
};

// ---------------------------------------------------------------------------
// Gaussian fields

/// Stationary covariance C. Builtin: C(0) exp(-|x|^2 / (2 tau^2)); tau = +inf is
/// the constant covariance. Tabulated: radial values C(r_k), linearly
/// interpolated, zero beyond the last radius.
struct CovarianceModel {
  int dim = 2;
  double c0 = 1.0;
  double tau = 1.0;
  std::vector<double> radii;
  std::vector<double> values;

  static CovarianceModel gaussian(int dim, double c0, double tau);
  static CovarianceModel tabulated(int dim, std::vector<double> radii, std::vector<double> values);

  bool is_tabulated() const { return !radii.empty(); }
  double at_radius(double r) const;
  double operator()(const Eigen::VectorXd& x) const { return at_radius(x.norm()); }
  /// Radius beyond which |C| stays below `relative * C(0)`.
  double decay_radius(double relative) const;
  void validate() const;
};

// ---------------------------------------------------------------------------

struct SiteCoupling {
  Eigen::VectorXi site;
  double lambda = 0.0;
};

struct FieldRealization {
  GridSpec grid;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  std::string model_tag;
  std::vector<SiteCoupling> couplings;  // alloy fields only
};

/// Seed for an independent per-key stream (SplitMix64 mixing).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key);
std::uint64_t site_key(const Eigen::VectorXi& site);

/// Lattice sites whose translated single-site support meets the grid box.
std::vector<Eigen::VectorXi> alloy_sites(const AlloyModel& model, const GridSpec& grid);
void check_alloy_grid(const GridSpec& grid);

/// Builds sum_j lambda_j u0(x - j) from explicit couplings.
FieldRealization alloy_field(const AlloyModel& model, const GridSpec& grid,
                             std::vector<SiteCoupling> couplings);
FieldRealization sample_alloy(const AlloyModel& model, const GridSpec& grid, std::uint64_t seed);

/// Reusable sampler: dense eigen-factorisation up to `dense_limit` nodes,
/// periodic circulant embedding (FFT) above.
class GaussianSampler {
 public:
  enum class Method { dense, spectral };
  static constexpr Index kDenseLimit = 4096;

  GaussianSampler(const CovarianceModel& model, const GridSpec& grid,
                  Index dense_limit = kDenseLimit);
  ~GaussianSampler();
  GaussianSampler(GaussianSampler&&) noexcept;
  GaussianSampler& operator=(GaussianSampler&&) noexcept;

  FieldRealization sample(std::uint64_t seed) const;
  Method method() const { return method_; }
  const GridSpec& grid() const { return grid_; }
  const CovarianceModel& model() const { return model_; }

 private:
  struct Embedding;
  CovarianceModel model_;
  GridSpec grid_;
  Method method_ = Method::dense;
  Eigen::MatrixXd factor_;  // dense: Q sqrt(Λ)
  std::unique_ptr<Embedding> embedding_;
};

FieldRealization sample_gaussian(const CovarianceModel& model, const GridSpec& grid,
                                 std::uint64_t seed);

/// Normalisation factor c of the mollifier mu_s = c * (normalised Gaussian of
/// width s), fixed by  ∫∫ mu_s mu_s C = C(0).
double mollifier_normalization(const CovarianceModel& model, double s);

/// u(x) = C(0)^{-1/2} ∫ mu_s(dy) C(x - y).
double gaussian_u_profile(const CovarianceModel& model, double s, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------

enum class DensityKind { uniform_bounded, laplace, standard_normal };

/// V = U + lambda u on the grid nodes.
struct OneParameterDecomposition {
  Eigen::VectorXd background;  // U
  double lambda = 0.0;
  Eigen::VectorXd profile;  // u
  DensityKind density = DensityKind::uniform_bounded;
};

OneParameterDecomposition decompose_alloy(const FieldRealization& realization,
                                          const AlloyModel& model, const Eigen::VectorXi& site);

/// Grid version of lambda = C(0)^{-1/2} ∫ mu_s V. The quadrature weights of the
/// mollifier centred at `center` must sum to 1 within 1e-10; the normalisation
/// and the profile u(x) = Cov(V(x), lambda) are evaluated with the same
/// weights, which makes lambda exactly standard normal and independent of U.
class GaussianDecomposer {
 public:
  GaussianDecomposer(const CovarianceModel& model, const GridSpec& grid, double s,
                     const Eigen::VectorXd& center);
  OneParameterDecomposition operator()(const FieldRealization& realization) const;
  const Eigen::VectorXd& profile() const { return profile_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  CovarianceModel model_;
  GridSpec grid_;
  Eigen::VectorXd weights_;  // includes normalisation and C(0)^{-1/2}
  Eigen::VectorXd profile_;
  Index atom_ = -1;  // node carrying the Dirac mollifier when s = 0
};

OneParameterDecomposition decompose_gaussian(const CovarianceModel& model,
                                             const FieldRealization& realization, double s);
OneParameterDecomposition decompose_gaussian(const CovarianceModel& model,
                                             const FieldRealization& realization, double s,
                                             const Eigen::VectorXd& center);

/// CSV rows x1,...,xd,value.
void write_field_csv(std::ostream& out, const FieldRealization& realization);

}  // namespace wl
