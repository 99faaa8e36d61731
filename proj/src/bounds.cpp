#include "wegnerlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"

namespace wl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double kinetic_term(double edge_inverse, double beta) {
  return edge_inverse + 1.0 / std::sqrt(kTwoPi * beta);
}

}  // namespace

void WegnerConstants::validate() const {
  require(v1 > 0.0 && v2 >= v1, "Wegner constants need 0 < v1 <= v2");
  require(beta > 0.0, "Wegner constant beta must be positive");
  require(density_bound >= 0.0, "density bound R must be >= 0");
  require(trace_bound > 0.0, "trace bound Z must be positive");
  require(dim >= 1 && dim <= 3, "dimension must be 1, 2 or 3");
}

double wegner_rhs(const WegnerConstants& c, double volume, const EnergyInterval& interval) {
  c.validate();
  interval.validate();
  return volume * interval.length() * (c.density_bound * c.trace_bound / c.v1) *
         std::exp(c.beta * interval.sup());
}

double free_trace_factor(double cell_volume, int dim, double beta) {
  require(cell_volume > 0.0 && beta > 0.0 && dim >= 1, "free trace factor needs positive arguments");
  return std::pow(kinetic_term(std::pow(cell_volume, -1.0 / dim), beta), dim);
}

double z3(double beta, double cell_volume, int dim, double mgf_sup) {
  require(beta > 0.0 && cell_volume > 0.0 && mgf_sup > 0.0, "Z3 needs positive arguments");
  return free_trace_factor(cell_volume, dim, beta) * mgf_sup;
}

MCResult z1_estimate(const EnsembleSpec& cell_spec,
                     const std::function<Eigen::VectorXd(const FieldRealization&)>& background,
                     double beta, const RunOptions& options) {
  require(beta > 0.0, "beta must be positive");
  const double volume = cell_spec.grid.volume();
  const auto none = ConstantFieldGauge::none(cell_spec.grid.dim);
  SpectralOptions so;
  so.dense_limit = options.dense_limit;
  const auto rows = map_realizations(cell_spec, options, [&](const HermitianOperator&, const FieldRealization& f) {
    const HermitianOperator op = assemble(cell_spec.grid, Boundary::neumann, none, background(f));
    return std::vector<double>{heat_trace(eigenvalues(op, so), beta) / volume};
  });
  std::vector<double> col;
  for (const auto& r : rows) col.push_back(r[0]);
  return summarize(col, options.keep_values);
}

double z2_estimate(const HermitianOperator& free_neumann, double cell_volume, double beta,
                   double mgf_sup) {
  require(beta > 0.0 && cell_volume > 0.0 && mgf_sup > 0.0, "Z2 needs positive arguments");
  return heat_trace(eigenvalues(free_neumann), beta) / cell_volume * mgf_sup;
}

double alloy_mgf_sup(const AlloyModel& model, int dim, double beta) {
  model.validate();
  const SingleSiteProfile& u0 = model.single_site;
  if (u0.kind == SingleSiteProfile::Kind::indicator)
    return std::max(1.0, coupling_mgf(model.law, beta * u0.height));
  require(u0.dim == dim, "single-site profile dimension mismatch");
  // x runs over the sub-cells of Λ(0); sites k with x - k in the support
  const int npu = u0.nodes_per_unit;
  const int r = u0.radius;
  const int reach = 2 * r + 1;
  int cells = 1, sites = 1;
  for (int k = 0; k < dim; ++k) {
    cells *= npu;
    sites *= 2 * reach + 1;
  }
  double best = 0.0;
  Eigen::VectorXd x(dim), y(dim);
  for (int c = 0; c < cells; ++c) {
    int rest = c;
    for (int k = 0; k < dim; ++k) {
      x[k] = (rest % npu + 0.5) / npu - 0.5;
      rest /= npu;
    }
    double log_total = 0.0;
    double smallest = 1.0;
    for (int s = 0; s < sites; ++s) {
      int q = s;
      for (int k = 0; k < dim; ++k) {
        y[k] = x[k] - (q % (2 * reach + 1) - reach);
        q /= 2 * reach + 1;
      }
      const double m = coupling_mgf(model.law, beta * u0(y));
      if (!std::isfinite(m)) return kInf;
      log_total += std::log(m);
      smallest = std::min(smallest, m);
    }
    best = std::max(best, std::exp(log_total) / smallest);
  }
  return best;
}

double gaussian_mgf_sup(const CovarianceModel& model, const Eigen::VectorXd& profile, double beta) {
  double worst = 0.0;
  for (Index i = 0; i < profile.size(); ++i)
    worst = std::max(worst, model.c0 - profile[i] * profile[i]);
  return std::exp(0.5 * beta * beta * worst);
}

double w_alloy_uniform(double energy, int dim, double beta, double gmax, double v1) {
  require(beta > 0.0 && gmax > 0.0 && v1 > 0.0, "W_A needs positive beta, gmax, v1");
  return std::pow(kinetic_term(1.0, beta), dim) * gmax / v1 * std::exp(beta * energy);
}

double k_beta(const SingleSiteProfile& profile, int dim, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "K_beta needs positive alpha and beta");
  if (!(beta * alpha * profile.sup_abs() < 1.0))
    fail("beta = " + fmt_double(beta) + " is outside admissible beta range (beta alpha |u0| < 1)");
  if (profile.kind == SingleSiteProfile::Kind::indicator) {
    const double t = beta * alpha * profile.height;
    return -std::log1p(-t * t);
  }
  require(profile.dim == dim, "single-site profile dimension mismatch");
  const int npu = profile.nodes_per_unit;
  const int reach = 2 * profile.radius + 1;
  int cells = 1, sites = 1;
  for (int k = 0; k < dim; ++k) {
    cells *= npu;
    sites *= 2 * reach + 1;
  }
  double inf = kInf;
  Eigen::VectorXd x(dim), y(dim);
  for (int c = 0; c < cells; ++c) {
    int rest = c;
    for (int k = 0; k < dim; ++k) {
      x[k] = (rest % npu + 0.5) / npu - 0.5;
      rest /= npu;
    }
    double sum = 0.0;
    for (int s = 0; s < sites; ++s) {
      int q = s;
      for (int k = 0; k < dim; ++k) {
        y[k] = x[k] - (q % (2 * reach + 1) - reach);
        q /= 2 * reach + 1;
      }
      const double t = beta * alpha * profile(y);
      sum += std::log1p(-t * t);
    }
    inf = std::min(inf, sum);
  }
  return -inf;
}

double w_alloy_laplace(double energy, int dim, double beta, double alpha, double v1, double kb) {
  require(beta > 0.0 && alpha > 0.0 && v1 > 0.0, "W_A needs positive beta, alpha, v1");
  const double t = beta * alpha * v1;
  require(t < 1.0, "outside admissible beta range");
  return std::pow(kinetic_term(1.0, beta), dim) * (1.0 - t * t) / (2.0 * alpha * v1) *
         std::exp(beta * energy + kb);
}

// ---------------------------------------------------------------------------
// Gaussian constants

namespace {

// Radius of the smallest ball containing the origin-centred cube of edge ell.
double corner_radius(int dim, double ell) { return 0.5 * ell * std::sqrt(static_cast<double>(dim)); }

double radial_u(const CovarianceModel& model, double s, double r) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.dim);
  x[0] = r;
  return gaussian_u_profile(model, s, x);
}

double tabulated_scale(const CovarianceModel& model) {
  // radius where C first falls to C(0) e^{-1/2}; plays the role of tau
  const double target = model.c0 * std::exp(-0.5);
  for (std::size_t i = 1; i < model.radii.size(); ++i)
    if (model.values[i] <= target) {
      const double w = (model.values[i - 1] - target) / (model.values[i - 1] - model.values[i]);
      return model.radii[i - 1] + w * (model.radii[i] - model.radii[i - 1]);
    }
  return model.radii.back();
}

}  // namespace

double gauss_max_ell(const CovarianceModel& model, double s, double gamma) {
  model.validate();
  require(gamma > 0.0, "gamma must be positive");
  const int d = model.dim;
  if (!model.is_tabulated()) {
    if (std::isinf(model.tau)) return kInf;
    const double spread = model.tau * model.tau + s * s;
    const double peak = radial_u(model, s, 0.0) / std::sqrt(model.c0);
    if (peak <= gamma) return 0.0;
    return 2.0 * std::sqrt(2.0 * spread * std::log(peak / gamma)) / std::sqrt(static_cast<double>(d));
  }
  const double level = gamma * std::sqrt(model.c0);
  const double span = model.radii.back() + 10.0 * s;
  const int steps = 400;
  double lo = 0.0;
  if (radial_u(model, s, 0.0) < level) return 0.0;
  for (int i = 1; i <= steps; ++i) {
    const double r = span * i / steps;
    if (radial_u(model, s, r) < level) {
      double hi = r;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radial_u(model, s, mid) >= level ? lo : hi) = mid;
      }
      break;
    }
    lo = r;
  }
  return 2.0 * lo / std::sqrt(static_cast<double>(d));
}

GaussBoundParams gauss_constants(const CovarianceModel& model, double s, double ell, double gamma) {
  model.validate();
  require(ell > 0.0 && std::isfinite(ell), "cube edge ell must be positive");
  require(s >= 0.0, "decomposition parameter s must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  GaussBoundParams p;
  p.c0 = model.c0;
  p.ell = ell;
  p.s = s;
  p.gamma = gamma;
  const double root = std::sqrt(model.c0);
  const double rc = corner_radius(model.dim, ell);
  if (!model.is_tabulated()) {
    p.upper = radial_u(model, s, 0.0) / root;
    if (std::isinf(model.tau)) {
      p.lower = p.upper;
    } else {
      const double spread = model.tau * model.tau + s * s;
      p.lower = p.upper * std::exp(-rc * rc / (2.0 * spread));
    }
  } else {
    std::vector<double> radii;
    const int samples = 64;
    for (int i = 0; i <= samples; ++i) radii.push_back(rc * i / samples);
    for (double r : model.radii)
      if (r < rc) radii.push_back(r);
    p.upper = -kInf;
    p.lower = kInf;
    for (double r : radii) {
      const double u = radial_u(model, s, r) / root;
      p.upper = std::max(p.upper, u);
      p.lower = std::min(p.lower, u);
    }
  }
  if (p.lower < gamma) {
    throw Error(ErrorKind::invalid_argument,
                "cube of edge " + fmt_double(ell) + " leaves the region u >= gamma sqrt(C0); max admissible ell = " +
                    fmt_double(gauss_max_ell(model, s, gamma)));
  }
  p.c_ell = model.c0 * (1.0 + p.upper * p.upper - p.lower * p.lower);
  return p;
}

double log_w_gauss(double energy, int dim, double beta, const GaussBoundParams& p) {
  require(beta > 0.0 && p.ell > 0.0 && p.lower > 0.0 && p.c0 > 0.0, "invalid W_G parameters");
  return dim * std::log(kinetic_term(2.0 / p.ell, beta)) + beta * energy + 0.5 * beta * beta * p.c_ell -
         0.5 * std::log(kTwoPi * p.c0) - std::log(p.lower);
}

double w_gauss(double energy, int dim, double beta, const GaussBoundParams& p) {
  return std::exp(log_w_gauss(energy, dim, beta, p));
}

// ---------------------------------------------------------------------------
// Families and search

std::string family_name(const BoundFamily& family) {
  if (std::holds_alternative<AlloyUniformFamily>(family)) return "alloy-uniform";
  if (std::holds_alternative<AlloyLaplaceFamily>(family)) return "alloy-laplace";
  return "gauss";
}

SearchDomain default_domain(const BoundFamily& family) {
  SearchDomain d;
  d.beta_min = 1e-3;
  d.beta_max = 1e3;
  if (const auto* f = std::get_if<AlloyLaplaceFamily>(&family)) {
    const double cap = (1.0 - 1e-9) / (f->alpha * f->profile.sup_abs());
    d.beta_max = std::min(d.beta_max, cap);
    if (!(d.beta_max > d.beta_min)) fail("empty feasible set: no admissible beta above 1e-3");
  }
  if (const auto* g = std::get_if<GaussFamily>(&family)) {
    const double root = std::sqrt(g->model.c0);
    d.beta_min /= root;
    d.beta_max /= root;
    if (g->model.is_tabulated()) d.s_max = 3.0 * tabulated_scale(g->model);
    else d.s_max = std::isinf(g->model.tau) ? 0.0 : 3.0 * g->model.tau;
    d.ell_max = std::min(1e6, gauss_max_ell(g->model, d.s_max, g->gamma));
    d.ell_max = std::max(d.ell_max, gauss_max_ell(g->model, 0.0, g->gamma));
    if (!(d.ell_max > 0.0)) fail("empty feasible set: no admissible cube edge");
    d.ell_min = 1e-4 * d.ell_max;
  }
  return d;
}

bool feasible(const BoundFamily& family, const SearchDomain& domain, const BoundPoint& p) {
  if (!(p.beta >= domain.beta_min && p.beta <= domain.beta_max)) return false;
  if (const auto* f = std::get_if<AlloyLaplaceFamily>(&family))
    return p.beta * f->alpha * f->profile.sup_abs() < 1.0;
  if (const auto* g = std::get_if<GaussFamily>(&family)) {
    if (!(p.ell >= domain.ell_min && p.ell <= domain.ell_max)) return false;
    if (!(p.s >= 0.0 && p.s <= domain.s_max)) return false;
    return p.ell <= gauss_max_ell(g->model, p.s, g->gamma) * (1.0 + 1e-12);
  }
  return true;
}

double log_bound(const BoundFamily& family, double energy, const BoundPoint& p) {
  if (!(p.beta > 0.0)) return kInf;
  if (const auto* f = std::get_if<AlloyUniformFamily>(&family))
    return std::log(w_alloy_uniform(0.0, f->dim, p.beta, f->gmax, f->v1)) + p.beta * energy;
  if (const auto* f = std::get_if<AlloyLaplaceFamily>(&family)) {
    if (!(p.beta * f->alpha * f->profile.sup_abs() < 1.0)) return kInf;
    const double kb = k_beta(f->profile, f->dim, f->alpha, p.beta);
    return std::log(w_alloy_laplace(0.0, f->dim, p.beta, f->alpha, f->v1, kb)) + p.beta * energy;
  }
  const auto& g = std::get<GaussFamily>(family);
  if (!(p.ell > 0.0) || p.s < 0.0) return kInf;
  try {
    return log_w_gauss(energy, g.model.dim, p.beta, gauss_constants(g.model, p.s, p.ell, g.gamma));
  } catch (const Error&) {
    return kInf;
  }
}

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section search of a unimodal f on [a, b].
std::pair<double, double> golden(const std::function<double(double)>& f, double a, double b, double tol) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

// Profile over beta: grid scan then golden refinement in log beta.
std::pair<double, double> best_beta(const std::function<double(double)>& obj, const SearchDomain& dom) {
  const auto grid = log_grid(dom.beta_min, dom.beta_max, dom.grid_points);
  std::size_t best = 0;
  double fbest = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = obj(grid[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  if (!std::isfinite(fbest)) return {grid[best], kInf};
  const double lo = std::log(grid[best == 0 ? 0 : best - 1]);
  const double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const auto [x, fx] = golden([&](double t) { return obj(std::exp(t)); }, lo, hi, 1e-12);
  if (fx < fbest) return {std::exp(x), fx};
  return {grid[best], fbest};
}

struct Candidate {
  BoundPoint point;
  double value = kInf;
};

}  // namespace

BoundMinimum minimize_bound(const BoundFamily& family, double energy, const SearchDomain& domain) {
  return minimize_bound(family, energy, domain, {});
}

BoundMinimum minimize_bound(const BoundFamily& family, double energy, const SearchDomain& domain,
                            const std::vector<BoundPoint>& seeds) {
  require(domain.beta_max >= domain.beta_min && domain.beta_min > 0.0, "invalid beta search range");
  require(domain.grid_points >= 3, "search grid needs at least 3 points");

  const bool gauss = std::holds_alternative<GaussFamily>(family);
  const GaussFamily* g = std::get_if<GaussFamily>(&family);

  Candidate best;
  auto consider = [&](const BoundPoint& p, double v) {
    if (v < best.value) best = {p, v};
  };

  if (!gauss) {
    auto obj = [&](double beta) {
      const BoundPoint p{beta, 0.0, 0.0};
      return feasible(family, domain, p) ? log_bound(family, energy, p) : kInf;
    };
    for (const auto& s : seeds) consider({s.beta, 0.0, 0.0}, obj(s.beta));
    const auto [beta, v] = best_beta(obj, domain);
    consider({beta, 0.0, 0.0}, v);
  } else {
    const int d = g->model.dim;
    // profile over beta at fixed (ell, s)
    auto inner = [&](double ell, double s) -> Candidate {
      if (!(ell >= domain.ell_min && ell <= domain.ell_max && s >= 0.0 && s <= domain.s_max)) return {};
      GaussBoundParams params;
      try {
        params = gauss_constants(g->model, s, ell, g->gamma);
      } catch (const Error&) {
        return {};
      }
      const auto [beta, v] = best_beta([&](double b) { return log_w_gauss(energy, d, b, params); }, domain);
      return {{beta, ell, s}, v};
    };
    for (const auto& s : seeds)
      if (feasible(family, domain, s)) consider(s, log_bound(family, energy, s));

    std::vector<double> s_grid{0.0};
    if (domain.s_max > 0.0)
      for (double s : log_grid(1e-3 * domain.s_max / 3.0, domain.s_max, domain.grid_points)) s_grid.push_back(s);
    const auto ell_grid = log_grid(domain.ell_min, domain.ell_max, domain.grid_points);
    for (double s : s_grid)
      for (double ell : ell_grid) {
        const Candidate c = inner(ell, s);
        consider(c.point, c.value);
      }
    if (!std::isfinite(best.value)) fail("empty feasible set for the Gaussian bound");

    auto neighbours = [](const std::vector<double>& grid, double x) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - grid.begin());
      const double lo = grid[i == 0 ? 0 : i - 1];
      const double hi = grid[std::min(i + 1, grid.size() - 1)];
      return std::pair{lo, hi};
    };

    for (int pass = 0; pass < 2; ++pass) {
      const double before = best.value;
      {
        const double s = best.point.s;
        auto [lo, hi] = neighbours(ell_grid, best.point.ell);
        const auto [t, v] = golden([&](double t) { return inner(std::exp(t), s).value; }, std::log(lo),
                                   std::log(hi), 1e-10);
        consider(inner(std::exp(t), s).point, v);
      }
      if (domain.s_max > 0.0) {
        const double ell = best.point.ell;
        auto [lo, hi] = neighbours(s_grid, best.point.s);
        const auto [x, v] = golden([&](double x) { return inner(ell, x).value; }, lo, hi, 1e-10);
        consider(inner(ell, x).point, v);
      }
      if (best.value >= before - 1e-14 * std::abs(before)) break;
    }
  }

  if (!std::isfinite(best.value)) fail("empty feasible set for the bound minimisation");
  BoundMinimum m;
  m.log_value = best.value;
  m.value = std::exp(best.value);
  m.argmin = best.point;
  return m;
}

BoundCurve minimize_curve(const BoundFamily& family, const std::vector<double>& energies,
                          const SearchDomain& domain, int jobs) {
  BoundCurve curve;
  curve.family = family_name(family);
  curve.energies = energies;
  const int n = static_cast<int>(energies.size());
  std::vector<BoundMinimum> mins(static_cast<std::size_t>(n));
  parallel_for(n, jobs, [&](int i) { mins[i] = minimize_bound(family, energies[i], domain); });

  // any argmin is a feasible candidate at every other energy
  for (int round = 0; round < 10; ++round) {
    std::vector<BoundPoint> seeds;
    for (const auto& m : mins) seeds.push_back(m.argmin);
    std::vector<BoundMinimum> next(mins);
    parallel_for(n, jobs, [&](int i) {
      Candidate c{mins[i].argmin, mins[i].log_value};
      for (const auto& s : seeds) {
        const double v = log_bound(family, energies[i], s);
        if (v < c.value) c = {s, v};
      }
      next[i].argmin = c.point;
      next[i].log_value = c.value;
      next[i].value = std::exp(c.value);
    });
    bool changed = false;
    for (int i = 0; i < n; ++i) changed = changed || next[i].log_value < mins[i].log_value;
    mins = std::move(next);
    if (!changed) break;
  }
  for (const auto& m : mins) {
    curve.values.push_back(m.value);
    curve.argmin.push_back(m.argmin);
  }
  return curve;
}

BoundCurve evaluate_curve(const BoundFamily& family, const std::vector<double>& energies,
                          const BoundPoint& point) {
  BoundCurve curve;
  curve.family = family_name(family);
  curve.energies = energies;
  for (double e : energies) {
    curve.values.push_back(std::exp(log_bound(family, e, point)));
    curve.argmin.push_back(point);
  }
  return curve;
}

void write_bound_csv(std::ostream& out, const BoundCurve& curve) {
  out << "E,W,beta_star,ell_star,s_star,family\n";
  for (std::size_t i = 0; i < curve.energies.size(); ++i) {
    const auto& p = curve.argmin[i];
    out << csv_row({fmt_double(curve.energies[i]), fmt_double(curve.values[i]), fmt_double(p.beta),
                    fmt_double(p.ell), fmt_double(p.s), curve.family})
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Asymptotics

BoundPoint gauss_asymptotic_choice(const CovarianceModel& model, double s, double energy) {
  require(energy != 0.0, "asymptotic choice needs E != 0");
  const int d = model.dim;
  const double ell = std::pow(std::abs(energy), -0.25);
  const GaussBoundParams p = gauss_constants(model, s, ell);
  const double root = std::sqrt(energy * energy + 2.0 * d * p.c_ell);
  const double beta = energy > 0.0 ? d / (root + energy) : (root - energy) / (2.0 * p.c_ell);
  return {beta, ell, s};
}

double gauss_low_energy_limit(double c0) {
  require(c0 > 0.0, "C(0) must be positive");
  return -1.0 / (2.0 * c0);
}

double gauss_high_energy_limit(int dim, double u0) {
  require(dim >= 1 && u0 > 0.0, "high-energy limit needs d >= 1 and u(0) > 0");
  return std::pow(std::numbers::e / (std::numbers::pi * dim), 0.5 * dim) / (std::sqrt(kTwoPi) * u0);
}

AsymptoticsReport gauss_asymptotics(const CovarianceModel& model, double s,
                                    const std::vector<double>& probes) {
  model.validate();
  AsymptoticsReport rep;
  const int d = model.dim;
  const double root_c0 = std::sqrt(model.c0);
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
  const double u0 = gaussian_u_profile(model, s, origin);
  const double low = gauss_low_energy_limit(model.c0);
  const double high = gauss_high_energy_limit(d, u0);
  for (double e : probes) {
    if (std::abs(e) < 10.0 * root_c0)
      rep.warnings.push_back("probe E = " + fmt_double(e) + " is too small for the asymptotic regime");
    if (e == 0.0) continue;
    const BoundPoint p = gauss_asymptotic_choice(model, s, e);
    const double lw = log_w_gauss(e, d, p.beta, gauss_constants(model, s, p.ell));
    if (e < 0.0) rep.low.push_back({e, lw / (e * e), low});
    else rep.high.push_back({e, std::exp(lw - 0.5 * d * std::log(e)), high});
  }
  return rep;
}

}  // namespace wl
