#include "wegnerlab/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"
#include "wegnerlab/quadrature.hpp"

namespace wl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform draw strictly inside (0, 1).
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// Single-site profile

SingleSiteProfile SingleSiteProfile::indicator(double height) {
  SingleSiteProfile p;
  p.kind = Kind::indicator;
  p.height = height;
  return p;
}

SingleSiteProfile SingleSiteProfile::tabulated(int dim, int nodes_per_unit, int radius,
                                               std::vector<double> table) {
  SingleSiteProfile p;
  p.kind = Kind::tabulated;
  p.dim = dim;
  p.nodes_per_unit = nodes_per_unit;
  p.radius = radius;
  p.table = std::move(table);
  p.validate();
  return p;
}

void SingleSiteProfile::validate() const {
  if (kind == Kind::indicator) {
    require(std::isfinite(height), "single-site height must be finite");
    return;
  }
  require(dim >= 1 && dim <= 3, "single-site profile dimension must be 1, 2 or 3");
  require(nodes_per_unit >= 1 && radius >= 0, "invalid single-site table geometry");
  const std::size_t side = static_cast<std::size_t>((2 * radius + 1) * nodes_per_unit);
  std::size_t expected = 1;
  for (int k = 0; k < dim; ++k) expected *= side;
  require(table.size() == expected, "single-site table has " + std::to_string(table.size()) +
                                        " entries, expected " + std::to_string(expected));
  for (double v : table) require(std::isfinite(v), "single-site table must be finite");
}

double SingleSiteProfile::operator()(const Eigen::VectorXd& x) const {
  if (kind == Kind::indicator) {
    for (Index k = 0; k < x.size(); ++k)
      if (!(std::abs(x[k]) < 0.5)) return 0.0;
    return height;
  }
  require(x.size() == dim, "point dimension does not match the single-site profile");
  const int side = (2 * radius + 1) * nodes_per_unit;
  std::size_t linear = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim; ++k) {
    const double pos = (x[k] + radius + 0.5) * nodes_per_unit;
    if (!(pos > 0.0 && pos < side)) return 0.0;
    linear += static_cast<std::size_t>(std::floor(pos)) * stride;
    stride *= static_cast<std::size_t>(side);
  }
  return table[linear];
}

double SingleSiteProfile::sup_abs() const {
  if (kind == Kind::indicator) return std::abs(height);
  double m = 0.0;
  for (double v : table) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// Coupling laws

double draw_coupling(const CouplingLaw& law, std::mt19937_64& rng) {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          return l.lo + (l.hi - l.lo) * open_unit(rng);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          const double u = open_unit(rng) - 0.5;
          return -l.alpha * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
        } else {
          return l.value;
        }
      },
      law);
}

double coupling_mgf(const CouplingLaw& law, double t) {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          const double width = l.hi - l.lo;
          if (t == 0.0) return 1.0;
          return std::exp(-t * l.lo) * (-std::expm1(-t * width)) / (t * width);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          const double at = l.alpha * t;
          if (std::abs(at) >= 1.0) return kInf;
          return 1.0 / (1.0 - at * at);
        } else {
          return std::exp(-t * l.value);
        }
      },
      law);
}

std::optional<double> density_sup(const CouplingLaw& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) return u->gmax;
  if (const auto* l = std::get_if<LaplaceLaw>(&law)) return 1.0 / (2.0 * l->alpha);
  return std::nullopt;
}

std::string law_name(const CouplingLaw& law) {
  if (std::holds_alternative<UniformLaw>(law)) return "uniform";
  if (std::holds_alternative<LaplaceLaw>(law)) return "laplace";
  return "fixed";
}

void AlloyModel::validate() const {
  single_site.validate();
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          require(l.hi > l.lo, "uniform coupling support must have positive length");
          require(l.lo >= 0.0, "uniform coupling support must lie in [0, inf)");
          require(std::abs(l.gmax * (l.hi - l.lo) - 1.0) <= 1e-12,
                  "uniform coupling density gmax must equal 1 / (hi - lo)");
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          require(l.alpha > 0.0 && std::isfinite(l.alpha), "Laplace scale alpha must be positive");
        } else {
          require(std::isfinite(l.value), "fixed coupling must be finite");
        }
      },
      law);
  require(v1 > 0.0 && v2 >= v1, "single-site bounds need 0 < v1 <= v2");
  if (single_site.kind == SingleSiteProfile::Kind::indicator) {
    require(single_site.height >= v1 && single_site.height <= v2,
            "single-site height violates v1 <= u0 <= v2 on the unit cell");
  } else {
    const int npu = single_site.nodes_per_unit;
    const int side = (2 * single_site.radius + 1) * npu;
    const int lo = single_site.radius * npu;
    for (std::size_t i = 0; i < single_site.table.size(); ++i) {
      std::size_t rest = i;
      bool home = true;
      for (int k = 0; k < single_site.dim; ++k) {
        const int c = static_cast<int>(rest % side);
        rest /= side;
        home = home && c >= lo && c < lo + npu;
      }
      if (home)
        require(single_site.table[i] >= v1 && single_site.table[i] <= v2,
                "single-site table violates v1 <= u0 <= v2 on the unit cell");
    }
  }
}

// ---------------------------------------------------------------------------
// Covariance

CovarianceModel CovarianceModel::gaussian(int dim, double c0, double tau) {
  CovarianceModel m;
  m.dim = dim;
  m.c0 = c0;
  m.tau = tau;
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::tabulated(int dim, std::vector<double> radii,
                                           std::vector<double> values) {
  CovarianceModel m;
  m.dim = dim;
  m.radii = std::move(radii);
  m.values = std::move(values);
  m.c0 = m.values.empty() ? 0.0 : m.values.front();
  m.tau = 0.0;
  m.validate();
  return m;
}

void CovarianceModel::validate() const {
  require(dim >= 1 && dim <= 3, "covariance dimension must be 1, 2 or 3");
  require(c0 > 0.0 && std::isfinite(c0), "covariance C(0) must be positive");
  if (is_tabulated()) {
    require(radii.size() == values.size() && radii.size() >= 2, "tabulated covariance needs >= 2 points");
    require(radii.front() == 0.0, "tabulated covariance must start at r = 0");
    require(values.front() == c0, "tabulated covariance must have C(0) as its first value");
    for (std::size_t i = 1; i < radii.size(); ++i)
      require(radii[i] > radii[i - 1], "tabulated radii must increase strictly");
    for (double v : values) require(std::isfinite(v), "tabulated covariance must be finite");
  } else {
    require(tau > 0.0, "correlation length tau must be positive");
  }
}

double CovarianceModel::at_radius(double r) const {
  if (!is_tabulated()) {
    if (std::isinf(tau)) return c0;
    return c0 * std::exp(-r * r / (2.0 * tau * tau));
  }
  if (r >= radii.back()) return 0.0;
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  const std::size_t hi = static_cast<std::size_t>(it - radii.begin());
  const std::size_t lo = hi - 1;
  const double w = (r - radii[lo]) / (radii[hi] - radii[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

double CovarianceModel::decay_radius(double relative) const {
  if (is_tabulated()) return radii.back();
  if (std::isinf(tau)) return kInf;
  return tau * std::sqrt(2.0 * std::log(1.0 / relative));
}

// ---------------------------------------------------------------------------
// Seeding

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (key + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t site_key(const Eigen::VectorXi& site) {
  std::uint64_t key = 0;
  for (Index k = 0; k < site.size(); ++k)
    key |= (static_cast<std::uint64_t>(site[k] + (1 << 20)) & 0x1fffffULL) << (21 * k);
  return key;
}

// ---------------------------------------------------------------------------
// Alloy sampling

void check_alloy_grid(const GridSpec& grid) {
  grid.validate();
  const double npu = 1.0 / grid.spacing;
  if (std::abs(npu - std::round(npu)) > 1e-9)
    fail("alloy grids need an integer number of nodes per unit length");
  for (int k = 0; k < grid.dim; ++k) {
    const double side = grid.extent(k);
    if (std::abs(side - std::round(side)) > 1e-9)
      fail("alloy grid side " + fmt_double(side) + " is not an integer number of unit cells");
    const double shifted = grid.origin[k] + 0.5;
    if (std::abs(shifted - std::round(shifted)) > 1e-9)
      fail("alloy grid must be a union of unit cells centred on integer sites");
  }
}

std::vector<Eigen::VectorXi> alloy_sites(const AlloyModel& model, const GridSpec& grid) {
  check_alloy_grid(grid);
  const int reach = model.single_site.reach();
  std::array<int, 3> first{0, 0, 0};
  std::array<int, 3> count{1, 1, 1};
  for (int k = 0; k < grid.dim; ++k) {
    first[k] = static_cast<int>(std::lround(grid.origin[k] + 0.5)) - reach;
    count[k] = static_cast<int>(std::lround(grid.extent(k))) + 2 * reach;
  }
  std::vector<Eigen::VectorXi> sites;
  for (int c = 0; c < count[2]; ++c)
    for (int b = 0; b < count[1]; ++b)
      for (int a = 0; a < count[0]; ++a) {
        const std::array<int, 3> m{a, b, c};
        Eigen::VectorXi s(grid.dim);
        for (int k = 0; k < grid.dim; ++k) s[k] = first[k] + m[k];
        sites.push_back(s);
      }
  return sites;
}

FieldRealization alloy_field(const AlloyModel& model, const GridSpec& grid,
                             std::vector<SiteCoupling> couplings) {
  check_alloy_grid(grid);
  const Eigen::MatrixXd nodes = grid.node_positions();
  const double reach = model.single_site.reach() + 0.5;
  FieldRealization f;
  f.grid = grid;
  f.values = Eigen::VectorXd::Zero(grid.node_count());
  f.model_tag = "alloy-" + law_name(model.law);
  for (const auto& c : couplings) {
    require(c.site.size() == grid.dim, "coupling site has wrong dimension");
    if (c.lambda == 0.0) continue;
    const Eigen::VectorXd j = c.site.cast<double>();
    for (Index i = 0; i < nodes.rows(); ++i) {
      const Eigen::VectorXd offset = nodes.row(i).transpose() - j;
      if (offset.cwiseAbs().maxCoeff() >= reach) continue;
      f.values[i] += c.lambda * model.single_site(offset);
    }
  }
  f.couplings = std::move(couplings);
  return f;
}

FieldRealization sample_alloy(const AlloyModel& model, const GridSpec& grid, std::uint64_t seed) {
  model.validate();
  std::vector<SiteCoupling> couplings;
  for (const auto& site : alloy_sites(model, grid)) {
    std::mt19937_64 rng(mix_seed(seed, site_key(site)));
    couplings.push_back({site, draw_coupling(model.law, rng)});
  }
  FieldRealization f = alloy_field(model, grid, std::move(couplings));
  f.seed = seed;
  return f;
}

// ---------------------------------------------------------------------------
// Gaussian sampling

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct GaussianSampler::Embedding {
  std::array<int, 3> torus{1, 1, 1};
  std::size_t total = 1;
  std::vector<double> scale;  // sqrt(lambda / total)
  fftw_plan plan = nullptr;

  ~Embedding() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

GaussianSampler::GaussianSampler(GaussianSampler&&) noexcept = default;
GaussianSampler& GaussianSampler::operator=(GaussianSampler&&) noexcept = default;
GaussianSampler::~GaussianSampler() = default;

GaussianSampler::GaussianSampler(const CovarianceModel& model, const GridSpec& grid,
                                 Index dense_limit)
    : model_(model), grid_(grid) {
  model_.validate();
  grid_.validate();
  require(model_.dim == grid_.dim, "covariance dimension does not match the grid");
  const Index n = grid_.node_count();

  if (n <= dense_limit) {
    method_ = Method::dense;
    const Eigen::MatrixXd nodes = grid_.node_positions();
    Eigen::MatrixXd cov(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j <= i; ++j) {
        const double c = model_.at_radius((nodes.row(i) - nodes.row(j)).norm());
        cov(i, j) = c;
        cov(j, i) = c;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::numerical, "covariance factorisation did not converge");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const double top = std::max(lambda.maxCoeff(), 0.0);
    if (lambda.minCoeff() < -1e-10 * std::max(top, model_.c0)) {
      std::ostringstream msg;
      msg << "covariance matrix is not positive semidefinite: most negative eigenvalue "
          << lambda.minCoeff();
      throw Error(ErrorKind::numerical, msg.str());
    }
    Eigen::VectorXd root(n);
    for (Index i = 0; i < n; ++i) root[i] = lambda[i] > 1e-12 * top ? std::sqrt(lambda[i]) : 0.0;
    factor_ = solver.eigenvectors() * root.asDiagonal();
    return;
  }

  method_ = Method::spectral;
  const double reach = model_.decay_radius(1e-9);
  if (!std::isfinite(reach))
    throw Error(ErrorKind::resource_limit, "spectral embedding needs a decaying covariance");
  auto emb = std::make_unique<Embedding>();
  const int pad = static_cast<int>(std::ceil(std::max(reach, 6.0 * model_.tau) / grid_.spacing));
  for (int k = 0; k < grid_.dim; ++k) {
    int m = std::max({2 * grid_.shape[k], grid_.shape[k] + pad, 2 * pad});
    m += m % 2;
    emb->torus[k] = m;
    emb->total *= static_cast<std::size_t>(m);
  }
  if (emb->total > (std::size_t{1} << 25))
    throw Error(ErrorKind::resource_limit, "periodic embedding of " + std::to_string(emb->total) +
                                               " points is too large");

  std::vector<int> dims;  // FFTW is row-major: last axis fastest
  for (int k = grid_.dim - 1; k >= 0; --k) dims.push_back(emb->torus[k]);

  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * emb->total));
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    emb->plan = fftw_plan_dft(grid_.dim, dims.data(), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  const auto& t = emb->torus;
  for (std::size_t idx = 0; idx < emb->total; ++idx) {
    std::size_t rest = idx;
    Eigen::VectorXd d(grid_.dim);
    for (int k = 0; k < grid_.dim; ++k) {
      const int m = static_cast<int>(rest % t[k]);
      rest /= t[k];
      d[k] = std::min(m, t[k] - m) * grid_.spacing;
    }
    buffer[idx][0] = model_.at_radius(d.norm());
    buffer[idx][1] = 0.0;
  }
  fftw_execute_dft(emb->plan, buffer, buffer);
  double top = 0.0;
  double bottom = 0.0;
  for (std::size_t idx = 0; idx < emb->total; ++idx) {
    top = std::max(top, buffer[idx][0]);
    bottom = std::min(bottom, buffer[idx][0]);
  }
  if (bottom < -1e-9 * top) {
    fftw_free(buffer);
    std::ostringstream msg;
    msg << "periodic embedding is not positive semidefinite: most negative eigenvalue " << bottom;
    throw Error(ErrorKind::numerical, msg.str());
  }
  emb->scale.resize(emb->total);
  for (std::size_t idx = 0; idx < emb->total; ++idx)
    emb->scale[idx] = std::sqrt(std::max(buffer[idx][0], 0.0) / static_cast<double>(emb->total));
  fftw_free(buffer);
  embedding_ = std::move(emb);
}

FieldRealization GaussianSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(mix_seed(seed, 0x6761757373ULL));
  std::normal_distribution<double> normal;
  FieldRealization f;
  f.grid = grid_;
  f.seed = seed;
  f.model_tag = "gaussian";
  const Index n = grid_.node_count();

  if (method_ == Method::dense) {
    Eigen::VectorXd z(n);
    for (Index i = 0; i < n; ++i) z[i] = normal(rng);
    f.values = factor_ * z;
    return f;
  }

  const Embedding& emb = *embedding_;
  auto* buffer = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * emb.total));
  for (std::size_t idx = 0; idx < emb.total; ++idx) {
    buffer[idx][0] = emb.scale[idx] * normal(rng);
    buffer[idx][1] = emb.scale[idx] * normal(rng);
  }
  fftw_execute_dft(emb.plan, buffer, buffer);
  f.values.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto m = grid_.multi_index(i);
    const std::size_t idx = m[0] + emb.torus[0] * (static_cast<std::size_t>(m[1]) +
                                                   emb.torus[1] * static_cast<std::size_t>(m[2]));
    f.values[i] = buffer[idx][0];
  }
  fftw_free(buffer);
  return f;
}

FieldRealization sample_gaussian(const CovarianceModel& model, const GridSpec& grid,
                                 std::uint64_t seed) {
  return GaussianSampler(model, grid).sample(seed);
}

// ---------------------------------------------------------------------------
// Mollified profile u

namespace {

constexpr int kHermitePoints = 40;

// ∫ N(0, width^2 I)(dy) f(y) by tensor Gauss–Hermite.
double gaussian_average(int dim, double width, const std::function<double(const Eigen::VectorXd&)>& f) {
  static const QuadratureRule rule = gauss_hermite_normal(kHermitePoints);
  double sum = 0.0;
  const int n = kHermitePoints;
  int total = 1;
  for (int k = 0; k < dim; ++k) total *= n;
  Eigen::VectorXd y(dim);
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      const int q = rest % n;
      rest /= n;
      y[k] = width * rule.nodes[q];
      w *= rule.weights[q];
    }
    sum += w * f(y);
  }
  return sum;
}

}  // namespace

double mollifier_normalization(const CovarianceModel& model, double s) {
  model.validate();
  require(s >= 0.0 && std::isfinite(s), "mollifier width must be finite and >= 0");
  if (s == 0.0) return 1.0;
  double c = 1.0;
  if (!model.is_tabulated()) {
    if (std::isinf(model.tau)) return 1.0;
    const double t2 = model.tau * model.tau;
    c = std::pow((t2 + 2.0 * s * s) / t2, model.dim / 4.0);
  } else {
    // difference of two independent width-s Gaussians has width sqrt(2) s
    const double q = gaussian_average(model.dim, std::sqrt(2.0) * s,
                                      [&](const Eigen::VectorXd& z) { return model(z); });
    if (!(q > 1e-300 * model.c0)) c = kInf;
    else c = std::sqrt(model.c0 / q);
  }
  if (!std::isfinite(c) || c > 1e150)
    throw Error(ErrorKind::numerical, "mollifier normalisation underflows for s = " + fmt_double(s));
  return c;
}

double gaussian_u_profile(const CovarianceModel& model, double s, const Eigen::VectorXd& x) {
  require(x.size() == model.dim, "point dimension does not match the covariance");
  const double root_c0 = std::sqrt(model.c0);
  if (s == 0.0) return model(x) / root_c0;
  const double c = mollifier_normalization(model, s);
  if (!model.is_tabulated()) {
    if (std::isinf(model.tau)) return root_c0;
    const double t2 = model.tau * model.tau;
    const double spread = t2 + s * s;
    return root_c0 * c * std::pow(t2 / spread, model.dim / 2.0) *
           std::exp(-x.squaredNorm() / (2.0 * spread));
  }
  const double conv = gaussian_average(model.dim, s, [&](const Eigen::VectorXd& y) {
    return model(Eigen::VectorXd(x - y));
  });
  return c * conv / root_c0;
}

// ---------------------------------------------------------------------------
// Decompositions

OneParameterDecomposition decompose_alloy(const FieldRealization& realization,
                                          const AlloyModel& model, const Eigen::VectorXi& site) {
  const auto it = std::find_if(realization.couplings.begin(), realization.couplings.end(),
                               [&](const SiteCoupling& c) { return c.site == site; });
  if (it == realization.couplings.end()) fail("site is not part of the alloy realization");
  OneParameterDecomposition d;
  d.lambda = it->lambda;
  const Index n = realization.grid.node_count();
  d.profile.resize(n);
  const Eigen::VectorXd j = site.cast<double>();
  for (Index i = 0; i < n; ++i) d.profile[i] = model.single_site(realization.grid.node(i) - j);
  d.background = realization.values - d.lambda * d.profile;
  d.density = std::holds_alternative<LaplaceLaw>(model.law) ? DensityKind::laplace
                                                            : DensityKind::uniform_bounded;
  return d;
}

GaussianDecomposer::GaussianDecomposer(const CovarianceModel& model, const GridSpec& grid, double s,
                                       const Eigen::VectorXd& center)
    : model_(model), grid_(grid) {
  model_.validate();
  grid_.validate();
  require(center.size() == grid_.dim, "mollifier centre has wrong dimension");
  require(s >= 0.0, "mollifier width must be >= 0");
  const Index n = grid_.node_count();
  const Eigen::MatrixXd nodes = grid_.node_positions();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (s == 0.0) {
    Index best = 0;
    double dist = kInf;
    for (Index i = 0; i < n; ++i) {
      const double d = (nodes.row(i).transpose() - center).norm();
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    if (dist > 1e-9 * grid_.spacing) fail("mollifier centre is not a grid node (needed for s = 0)");
    w[best] = 1.0;
    atom_ = best;
  } else {
    const double norm = std::pow(2.0 * std::numbers::pi * s * s, -grid_.dim / 2.0) *
                        std::pow(grid_.spacing, grid_.dim);
    for (Index i = 0; i < n; ++i)
      w[i] = norm * std::exp(-(nodes.row(i).transpose() - center).squaredNorm() / (2.0 * s * s));
    const double total = w.sum();
    if (std::abs(total - 1.0) > 1e-10) {
      std::ostringstream msg;
      msg << "mollifier quadrature weights sum to " << total
          << "; the grid does not resolve or contain the mollifier";
      throw Error(ErrorKind::numerical, msg.str());
    }
  }
  Eigen::VectorXd cw = Eigen::VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    if (w[j] < 1e-300) continue;
    for (Index i = 0; i < n; ++i) cw[i] += model_.at_radius((nodes.row(i) - nodes.row(j)).norm()) * w[j];
  }
  const double q = w.dot(cw);  // Var of sum_y w_y V(y)
  if (!(q > 0.0)) throw Error(ErrorKind::numerical, "mollified variance vanishes");
  weights_ = w / std::sqrt(q);
  profile_ = cw / std::sqrt(q);
}

OneParameterDecomposition GaussianDecomposer::operator()(const FieldRealization& realization) const {
  require(realization.grid.node_count() == grid_.node_count(), "realization grid does not match");
  OneParameterDecomposition d;
  d.lambda = weights_.dot(realization.values);
  d.profile = profile_;
  d.background = realization.values - d.lambda * profile_;
  if (atom_ >= 0) d.background[atom_] = 0.0;
  d.density = DensityKind::standard_normal;
  return d;
}

OneParameterDecomposition decompose_gaussian(const CovarianceModel& model,
                                             const FieldRealization& realization, double s) {
  return decompose_gaussian(model, realization, s, Eigen::VectorXd::Zero(realization.grid.dim));
}

OneParameterDecomposition decompose_gaussian(const CovarianceModel& model,
                                             const FieldRealization& realization, double s,
                                             const Eigen::VectorXd& center) {
  return GaussianDecomposer(model, realization.grid, s, center)(realization);
}

void write_field_csv(std::ostream& out, const FieldRealization& realization) {
  const int d = realization.grid.dim;
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "value\n";
  for (Index i = 0; i < realization.values.size(); ++i) {
    const Eigen::VectorXd x = realization.grid.node(i);
    for (int k = 0; k < d; ++k) out << fmt_double(x[k]) << ',';
    out << fmt_double(realization.values[i]) << '\n';
  }
}

}  // namespace wl
