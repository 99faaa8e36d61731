#include "wegnerlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "wegnerlab/bounds.hpp"
#include "wegnerlab/error.hpp"
#include "wegnerlab/quadrature.hpp"
#include "wegnerlab/random_fields.hpp"

namespace wl {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::array<Boundary, 2> kBoundaries{Boundary::dirichlet, Boundary::neumann};

json grid_json(const GridSpec& g) {
  json shape = json::array();
  json origin = json::array();
  for (int k = 0; k < g.dim; ++k) {
    shape.push_back(g.shape[k]);
    origin.push_back(g.origin[k]);
  }
  return json{{"dim", g.dim}, {"shape", shape}, {"spacing", g.spacing}, {"origin", origin}};
}

double field_strength(const ConstantFieldGauge& gauge) {
  return gauge.field.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v[i] = {normal(rng), normal(rng)};
  return v;
}

}  // namespace

std::string CheckReport::jsonl() const {
  json j;
  j["name"] = name;
  j["params"] = params;
  j["worst_violation"] = worst_violation;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["details"] = details;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Diamagnetic family

CheckReport check_diamagnetic_semigroup(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                        const Eigen::VectorXd& potential, double t, int trials,
                                        std::uint64_t seed, double tolerance) {
  require(t >= 0.0, "semigroup time must be >= 0");
  CheckReport rep;
  rep.name = "diamagnetic-semigroup";
  rep.params = {{"grid", grid_json(grid)}, {"field", field_strength(gauge)}, {"t", t},
                {"trials", trials}, {"seed", seed}};
  rep.tolerance = tolerance;
  rep.worst_violation = -kInf;
  double equality_gap = 0.0;
  const auto none = ConstantFieldGauge::none(grid.dim);
  for (Boundary bc : kBoundaries) {
    const SpectralCalculus magnetic(assemble(grid, bc, gauge, potential));
    const SpectralCalculus free(assemble(grid, bc, none, potential));
    const Eigen::MatrixXcd ea = magnetic.matrix([t](double x) { return std::exp(-t * x); });
    const Eigen::MatrixXcd e0 = free.matrix([t](double x) { return std::exp(-t * x); });
    const double norm0 = std::max(1.0, std::exp(-t * free.eigenvalues()[0]));
    for (int trial = 0; trial < trials; ++trial) {
      const Eigen::VectorXcd psi = random_vector(grid.node_count(), mix_seed(seed, trial));
      const Eigen::VectorXcd mod = psi.cwiseAbs().cast<std::complex<double>>();
      const double scale = psi.cwiseAbs().maxCoeff() * norm0;
      const Eigen::VectorXd lhs = (ea * psi).cwiseAbs();
      const Eigen::VectorXd rhs = (e0 * mod).real();
      rep.worst_violation = std::max(rep.worst_violation, (lhs - rhs).maxCoeff() / scale);
      const Eigen::VectorXd gap = (ea * mod).cwiseAbs() - rhs;
      equality_gap = std::max(equality_gap, gap.cwiseAbs().maxCoeff() / scale);
    }
  }
  rep.details["nonnegative_gap"] = equality_gap;
  rep.settle();
  return rep;
}

CheckReport check_diamagnetic_partition(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                        const Eigen::VectorXd& potential, double beta,
                                        double tolerance) {
  require(beta > 0.0, "inverse temperature must be positive");
  CheckReport rep;
  rep.name = "diamagnetic-partition";
  rep.params = {{"grid", grid_json(grid)}, {"field", field_strength(gauge)}, {"beta", beta}};
  rep.tolerance = tolerance;
  rep.worst_violation = -kInf;
  const auto none = ConstantFieldGauge::none(grid.dim);
  for (Boundary bc : kBoundaries) {
    const double ta = heat_trace(eigenvalues(assemble(grid, bc, gauge, potential)), beta);
    const double t0 = heat_trace(eigenvalues(assemble(grid, bc, none, potential)), beta);
    const double v = (ta - t0) / t0;
    rep.worst_violation = std::max(rep.worst_violation, v);
    rep.details[std::string(1, boundary_tag(bc))] = {{"magnetic", ta}, {"free", t0}, {"slack", t0 - ta}};
  }
  rep.settle();
  return rep;
}

CheckReport check_resolvent_power(const GridSpec& grid, const ConstantFieldGauge& gauge,
                                  const Eigen::VectorXd& potential, std::complex<double> z,
                                  double alpha, int trials, std::uint64_t seed, double tolerance) {
  require(alpha > 0.0, "resolvent power must be positive");
  CheckReport rep;
  rep.name = "resolvent-power";
  rep.params = {{"grid", grid_json(grid)}, {"field", field_strength(gauge)}, {"z_re", z.real()},
                {"z_im", z.imag()},         {"alpha", alpha},                 {"trials", trials},
                {"seed", seed}};
  rep.tolerance = tolerance;
  rep.worst_violation = -kInf;
  double equality_gap = 0.0;
  const auto none = ConstantFieldGauge::none(grid.dim);
  for (Boundary bc : kBoundaries) {
    const SpectralCalculus magnetic(assemble(grid, bc, gauge, potential));
    const SpectralCalculus free(assemble(grid, bc, none, potential));
    const double floor = free.eigenvalues()[0];
    if (!(z.real() < floor))
      fail("Re z = " + std::to_string(z.real()) + " is not below the zero-field spectrum (" +
           std::to_string(floor) + ")");
    const double x = z.real();
    const Eigen::MatrixXcd r0 = free.matrix([&](double e) { return std::pow(e - x, -alpha); });
    const double norm0 = std::pow(floor - x, -alpha);
    for (int trial = 0; trial < trials; ++trial) {
      const Eigen::VectorXcd psi = random_vector(grid.node_count(), mix_seed(seed, trial));
      const Eigen::VectorXcd mod = psi.cwiseAbs().cast<std::complex<double>>();
      const double scale = psi.cwiseAbs().maxCoeff() * norm0;
      const Eigen::VectorXd lhs = resolvent_power_apply(magnetic, z, alpha, psi).cwiseAbs();
      const Eigen::VectorXd rhs = (r0 * mod).real();
      rep.worst_violation = std::max(rep.worst_violation, (lhs - rhs).maxCoeff() / scale);
      const Eigen::VectorXd gap = resolvent_power_apply(magnetic, z, alpha, mod).cwiseAbs() - rhs;
      equality_gap = std::max(equality_gap, gap.cwiseAbs().maxCoeff() / scale);
    }
  }
  rep.details["nonnegative_gap"] = equality_gap;
  rep.settle();
  return rep;
}

// ---------------------------------------------------------------------------
// Bracketing and decoupling

CheckReport check_bracketing(const GridSpec& grid, int axis, int first_cells,
                             const ConstantFieldGauge& gauge, const Eigen::VectorXd& potential,
                             double tolerance) {
  CheckReport rep;
  rep.name = "bracketing";
  rep.params = {{"grid", grid_json(grid)}, {"axis", axis}, {"first_cells", first_cells},
                {"field", field_strength(gauge)}};
  rep.tolerance = tolerance;
  const auto [g1, g2] = grid.bisect(axis, first_cells);
  const Eigen::VectorXd v1 = restrict_to(grid, potential, g1);
  const Eigen::VectorXd v2 = restrict_to(grid, potential, g2);
  auto split = [&](Boundary bc) {
    return eigenvalues(decouple(assemble(g1, bc, gauge, v1), assemble(g2, bc, gauge, v2))).values;
  };
  const Eigen::VectorXd ns = split(Boundary::neumann);
  const Eigen::VectorXd n = eigenvalues(assemble(grid, Boundary::neumann, gauge, potential)).values;
  const Eigen::VectorXd d = eigenvalues(assemble(grid, Boundary::dirichlet, gauge, potential)).values;
  const Eigen::VectorXd ds = split(Boundary::dirichlet);
  const double scale = std::max({1.0, ds.cwiseAbs().maxCoeff(), ns.cwiseAbs().maxCoeff()});
  const double a = (ns - n).maxCoeff();
  const double b = (n - d).maxCoeff();
  const double c = (d - ds).maxCoeff();
  rep.worst_violation = std::max({a, b, c}) / scale;
  rep.details = {{"neumann_split_vs_neumann", a / scale},
                 {"neumann_vs_dirichlet", b / scale},
                 {"dirichlet_vs_dirichlet_split", c / scale},
                 {"levels", n.size()}};
  rep.settle();
  return rep;
}

CheckReport check_decoupling(const HermitianOperator& first, const HermitianOperator& second,
                             double tolerance) {
  CheckReport rep;
  rep.name = "decoupling";
  rep.params = {{"first_size", first.size()}, {"second_size", second.size()}};
  rep.tolerance = tolerance;
  const Eigen::VectorXd merged = eigenvalues(decouple(first, second)).values;
  const Eigen::VectorXd a = eigenvalues(first).values;
  const Eigen::VectorXd b = eigenvalues(second).values;
  std::vector<double> parts(a.data(), a.data() + a.size());
  parts.insert(parts.end(), b.data(), b.data() + b.size());
  std::sort(parts.begin(), parts.end());
  double worst = 0.0;
  double scale = 1.0;
  for (Index i = 0; i < merged.size(); ++i) {
    worst = std::max(worst, std::abs(merged[i] - parts[i]));
    scale = std::max(scale, std::abs(parts[i]));
  }
  rep.worst_violation = worst / scale;
  rep.settle();
  return rep;
}

// ---------------------------------------------------------------------------
// Spectral averaging

double spectral_averaging_kappa(const Eigen::MatrixXcd& k, const Eigen::MatrixXcd& m) {
  require(k.rows() == k.cols() && m.rows() == m.cols() && k.rows() == m.rows(),
          "K and M must be square of equal size");
  const Eigen::MatrixXcd k2 = k.adjoint() * k;
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  const double mscale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXcd lower = llt.matrixL();
    const Eigen::MatrixXcd x = lower.triangularView<Eigen::Lower>().solve(k2);
    const Eigen::MatrixXcd y = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd(x.adjoint()));
    const Eigen::MatrixXcd sym = 0.5 * (y + y.adjoint());
    const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .maxCoeff();
    return top > 0.0 ? 1.0 / top : kInf;
  }
  // M singular or indefinite: kappa = sup {c : M - c K^2 >= 0}
  auto psd = [&](double c) {
    const Eigen::MatrixXcd s = m - c * k2;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(s, Eigen::EigenvaluesOnly).eigenvalues()[0] >=
           -1e-12 * mscale;
  };
  if (!psd(0.0)) return -kInf;
  const double k2top =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(k2, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (k2top <= 0.0) return kInf;
  double lo = 0.0;
  double hi = m.operatorNorm() / k2top * 2.0 + 1.0;
  while (psd(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psd(mid) ? lo : hi) = mid;
  }
  return lo;
}

SpectralAveragingValue spectral_averaging_integral(const SpectralAveragingInstance& inst,
                                                   double tolerance) {
  const Index n = inst.l.rows();
  require(inst.l.cols() == n && inst.k.rows() == n && inst.m.rows() == n && inst.psi.size() == n,
          "spectral-averaging instance has inconsistent sizes");
  inst.interval.validate();
  SpectralAveragingValue out;
  out.kappa = spectral_averaging_kappa(inst.k, inst.m);
  if (!(out.kappa > 0.0)) fail("spectral-averaging instance rejected: kappa <= 0");

  Eigen::LLT<Eigen::MatrixXcd> llt(inst.m);
  if (llt.info() != Eigen::Success)
    fail("spectral-averaging quadrature needs a positive definite M");
  const Eigen::MatrixXcd lower = llt.matrixL();
  // xi where an eigenvalue of L + xi M equals e: generalized eigenvalues of (e - L, M)
  auto crossings = [&](double e) {
    const Eigen::MatrixXcd a = e * Eigen::MatrixXcd::Identity(n, n) - inst.l;
    const Eigen::MatrixXcd x = lower.triangularView<Eigen::Lower>().solve(a);
    const Eigen::MatrixXcd y = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd(x.adjoint()));
    const Eigen::MatrixXcd sym = 0.5 * (y + y.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  };
  std::vector<double> breaks;
  for (double e : {inst.interval.lower, inst.interval.upper}) {
    const Eigen::VectorXd c = crossings(e);
    breaks.insert(breaks.end(), c.data(), c.data() + c.size());
  }
  std::sort(breaks.begin(), breaks.end());
  // every eigenvalue lies in I only between its two crossings, so the integrand
  // vanishes outside [breaks.front(), breaks.back()]
  const Eigen::VectorXcd kpsi = inst.k * inst.psi;
  auto integrand = [&](double xi) {
    const Eigen::MatrixXcd h = inst.l + xi * inst.m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i)
      if (inst.interval.contains(es.eigenvalues()[i])) sum += std::norm(es.eigenvectors().col(i).dot(kpsi));
    return std::abs(inst.g(xi)) * sum;
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] - breaks[i] <= 0.0) continue;
    const IntegrationResult r = integrate(integrand, breaks[i], breaks[i + 1], tolerance);
    out.integral += r.value;
    out.error += r.error;
  }
  out.bound = inst.interval.length() * inst.g_sup / out.kappa * inst.psi.squaredNorm();
  return out;
}

CheckReport check_spectral_averaging(const SpectralAveragingInstance& inst, double tolerance) {
  CheckReport rep;
  rep.name = "spectral-averaging";
  rep.params = {{"size", inst.l.rows()},
                {"interval", {inst.interval.lower, inst.interval.upper}},
                {"g_sup", inst.g_sup}};
  rep.tolerance = tolerance;
  const SpectralAveragingValue v = spectral_averaging_integral(inst);
  rep.worst_violation = (v.integral - v.bound - v.error) / v.bound;
  rep.details = {{"integral", v.integral}, {"bound", v.bound}, {"kappa", v.kappa},
                 {"quadrature_error", v.error}, {"margin", v.bound - v.integral}};
  rep.settle();
  return rep;
}

// ---------------------------------------------------------------------------
// Averaged partition functions

CheckReport check_golden_thompson_avg(const EnsembleSpec& spec, double beta, const RunOptions& options) {
  require(beta > 0.0, "inverse temperature must be positive");
  CheckReport rep;
  rep.name = "golden-thompson";
  rep.params = {{"grid", grid_json(spec.grid)}, {"field", field_strength(spec.gauge)},
                {"model", field_tag(spec.field)}, {"boundary", std::string(1, boundary_tag(spec.bc))},
                {"beta", beta}, {"realizations", spec.realizations}, {"seed", spec.base_seed}};
  const Index n = spec.grid.node_count();
  const auto rows = map_realizations(spec, options, [&](const HermitianOperator& op, const FieldRealization& f) {
    std::vector<double> v{heat_trace(eigenvalues(op), beta)};
    for (Index i = 0; i < n; ++i) v.push_back(std::exp(-beta * f.values[i]));
    return v;
  });
  std::vector<double> col(rows.size());
  auto column = [&](std::size_t c) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
    return summarize(col);
  };
  const MCResult lhs = column(0);
  MCResult mgf;
  for (Index i = 0; i < n; ++i) {
    const MCResult m = column(static_cast<std::size_t>(i) + 1);
    if (i == 0 || m.mean > mgf.mean) mgf = m;
  }
  const double free = heat_trace(eigenvalues(assemble(spec.grid, spec.bc, spec.gauge)), beta);
  const double rhs = free * mgf.mean;
  const double band = 3.0 * std::hypot(lhs.std_error, free * mgf.std_error);
  rep.worst_violation = (lhs.mean - rhs - band) / rhs;
  rep.tolerance = 0.0;
  rep.details = {{"lhs", lhs.mean}, {"lhs_stderr", lhs.std_error}, {"rhs", rhs},
                 {"rhs_stderr", free * mgf.std_error}, {"free_trace", free}};
  rep.settle();
  return rep;
}

double neumann_free_trace(double side, double beta, int dim) {
  require(side > 0.0 && beta > 0.0 && dim >= 1, "free trace needs positive side, beta, dim");
  const double a = beta * std::numbers::pi * std::numbers::pi / (2.0 * side * side);
  double sum = 0.0;
  for (long n = 0;; ++n) {
    const double term = std::exp(-a * static_cast<double>(n) * static_cast<double>(n));
    sum += term;
    // the remaining terms are bounded by a geometric tail of ratio e^{-a(2n+1)}
    const double ratio = std::exp(-a * (2.0 * n + 1.0));
    if (term * ratio / (1.0 - ratio) < 1e-17 * sum) break;
  }
  return std::pow(sum, dim);
}

CheckReport check_neumann_partition_bound(double side, double beta, int dim) {
  CheckReport rep;
  rep.name = "neumann-trace";
  rep.params = {{"side", side}, {"beta", beta}, {"dim", dim}};
  const double volume = std::pow(side, dim);
  const double trace = neumann_free_trace(side, beta, dim);
  const double bound = volume * free_trace_factor(volume, dim, beta);
  rep.worst_violation = (trace - bound) / bound;
  rep.tolerance = 0.0;
  rep.details = {{"trace", trace}, {"bound", bound}};
  rep.settle();
  return rep;
}

// ---------------------------------------------------------------------------
// Wegner estimate versus Monte Carlo

namespace {

// argmin over beta of  log Z3(beta) + beta * sup I  on the admissible range
std::pair<double, double> best_wegner_beta(const AlloyModel& model, int dim, double sup) {
  double beta_max = 1e3;
  if (std::holds_alternative<LaplaceLaw>(model.law))
    beta_max = std::min(beta_max, (1.0 - 1e-9) / (std::get<LaplaceLaw>(model.law).alpha *
                                                   model.single_site.sup_abs()));
  auto obj = [&](double lb) {
    const double b = std::exp(lb);
    const double mgf = alloy_mgf_sup(model, dim, b);
    if (!std::isfinite(mgf)) return kInf;
    return std::log(z3(b, 1.0, dim, mgf)) + b * sup;
  };
  const double lo = std::log(1e-3), hi = std::log(beta_max);
  const int points = 40;
  int best = 0;
  double fbest = kInf;
  for (int i = 0; i < points; ++i) {
    const double v = obj(lo + (hi - lo) * i / (points - 1));
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / (points - 1);
  double b = lo + (hi - lo) * std::min(best + 1, points - 1) / (points - 1);
  const double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int it = 0; it < 80; ++it) {
    if (fc <= fd) {
      b = d, d = c, fd = fc, c = b - g * (b - a), fc = obj(c);
    } else {
      a = c, c = d, fc = fd, d = a + g * (b - a), fd = obj(d);
    }
  }
  const double x = fc <= fd ? c : d;
  const double fx = std::min(fc, fd);
  if (fx < fbest) return {std::exp(x), fx};
  return {std::exp(lo + (hi - lo) * best / (points - 1)), fbest};
}

}  // namespace

CheckReport check_wegner_mc(const EnsembleSpec& spec, const std::vector<EnergyInterval>& intervals,
                            const RunOptions& options) {
  const auto* model = std::get_if<AlloyModel>(&spec.field);
  if (!model) fail("Wegner check needs an alloy model with a one-parameter decomposition");
  const auto density = density_sup(model->law);
  if (!density) fail("Wegner check needs a coupling law with a bounded density");
  const int d = spec.grid.dim;

  CheckReport rep;
  rep.name = "wegner-mc";
  rep.params = {{"grid", grid_json(spec.grid)}, {"field", field_strength(spec.gauge)},
                {"boundary", std::string(1, boundary_tag(spec.bc))}, {"law", law_name(model->law)},
                {"realizations", spec.realizations}, {"seed", spec.base_seed}};
  rep.tolerance = 0.0;
  rep.worst_violation = -kInf;

  const auto counts = expected_counting(spec, intervals, options);
  json rows = json::array();
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [beta, log_z] = best_wegner_beta(*model, d, intervals[i].sup());
    WegnerConstants c;
    c.v1 = model->v1;
    c.v2 = model->v2;
    c.beta = beta;
    c.density_bound = *density;
    c.trace_bound = z3(beta, 1.0, d, alloy_mgf_sup(*model, d, beta));
    c.dim = d;
    const double rhs = wegner_rhs(c, spec.grid.volume(), intervals[i]);
    const double lhs = counts[i].mean - 3.0 * counts[i].std_error;
    const double v = rhs > 0.0 ? (lhs - rhs) / rhs : (lhs > 0.0 ? kInf : 0.0);
    rep.worst_violation = std::max(rep.worst_violation, v);
    rows.push_back({{"lower", intervals[i].lower}, {"upper", intervals[i].upper},
                    {"mean", counts[i].mean}, {"stderr", counts[i].std_error}, {"bound", rhs},
                    {"beta", beta}, {"z3", c.trace_bound}});
  }
  rep.details["intervals"] = rows;
  rep.settle();
  return rep;
}

// ---------------------------------------------------------------------------
// Randomised suites

namespace {

struct RandomInstance {
  GridSpec grid;
  ConstantFieldGauge gauge;
  Eigen::VectorXd potential;
};

GridSpec random_grid(std::mt19937_64& rng, int dim) {
  std::uniform_int_distribution<int> n1(2, 12), n2(2, 5), n3(2, 3);
  std::uniform_real_distribution<double> h(0.3, 1.2), o(-2.0, 2.0);
  GridSpec g;
  g.dim = dim;
  g.spacing = h(rng);
  g.origin = Eigen::VectorXd(dim);
  g.shape = {1, 1, 1};
  for (int k = 0; k < dim; ++k) {
    g.shape[k] = dim == 1 ? n1(rng) : dim == 2 ? n2(rng) : n3(rng);
    g.origin[k] = o(rng);
  }
  return g;
}

ConstantFieldGauge random_gauge(std::mt19937_64& rng, int dim, bool zero) {
  ConstantFieldGauge g = ConstantFieldGauge::none(dim);
  if (zero || dim == 1) return g;
  std::uniform_real_distribution<double> b(-2.0, 2.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      g.field(i, j) = b(rng);
      g.field(j, i) = -g.field(i, j);
    }
  return g;
}

RandomInstance random_instance(std::uint64_t seed, int dim = 0) {
  std::mt19937_64 rng(seed);
  if (dim == 0) dim = std::uniform_int_distribution<int>(1, 3)(rng);
  RandomInstance inst;
  inst.grid = random_grid(rng, dim);
  const bool zero = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.2;
  inst.gauge = random_gauge(rng, dim, zero);
  std::normal_distribution<double> normal;
  const double amp = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  inst.potential.resize(inst.grid.node_count());
  for (Index i = 0; i < inst.potential.size(); ++i) inst.potential[i] = amp * normal(rng);
  return inst;
}

CheckReport aggregate(const std::string& name, const SuiteOptions& o, int instances,
                      const std::vector<CheckReport>& reports, double tolerance) {
  CheckReport agg;
  agg.name = name;
  agg.params = {{"instances", instances}, {"seed", o.seed}, {"quick", o.quick}};
  agg.tolerance = tolerance;
  agg.worst_violation = -kInf;
  int failures = 0;
  for (const auto& r : reports) {
    agg.worst_violation = std::max(agg.worst_violation, r.worst_violation);
    failures += r.pass ? 0 : 1;
  }
  agg.details["failures"] = failures;
  agg.settle();
  agg.pass = agg.pass && failures == 0;
  return agg;
}

std::vector<CheckReport> finish(CheckReport agg, const std::vector<CheckReport>& reports) {
  std::vector<CheckReport> out;
  const bool all = reports.size() <= 50;
  for (const auto& r : reports)
    if (all || !r.pass) out.push_back(r);
  out.push_back(std::move(agg));
  return out;
}

int instance_count(const SuiteOptions& o, int full, int quick) {
  if (o.instances > 0) return o.instances;
  return o.quick ? quick : full;
}

// Largest nonnegative-input gap seen on zero-field instances.
double zero_field_gap(const std::vector<CheckReport>& reports, const std::vector<bool>& zero) {
  double g = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (zero[i]) g = std::max(g, reports[i].details.value("nonnegative_gap", 0.0));
  return g;
}

std::vector<CheckReport> suite_semigroup(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-9);
  const int n = instance_count(o, 1000, 100);
  std::vector<CheckReport> reports(n);
  std::vector<bool> zero(n);
  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 1000000 + i);
    const RandomInstance inst = random_instance(seed);
    std::mt19937_64 rng(seed + 1);
    const double t = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    zero[i] = inst.gauge.is_zero();
    reports[i] = check_diamagnetic_semigroup(inst.grid, inst.gauge, inst.potential, t, 4, seed, tol);
  });
  CheckReport agg = aggregate("diamagnetic-semigroup", o, n, reports, tol);
  agg.details["zero_field_gap"] = zero_field_gap(reports, zero);
  agg.pass = agg.pass && zero_field_gap(reports, zero) <= 1e-12;
  return finish(std::move(agg), reports);
}

std::vector<CheckReport> suite_partition(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-9);
  const int n = instance_count(o, 1000, 100);
  std::vector<CheckReport> reports(n);
  std::vector<double> gaps(n, 0.0);
  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 2000000 + i);
    const RandomInstance inst = random_instance(seed);
    std::mt19937_64 rng(seed + 1);
    const double beta = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    reports[i] = check_diamagnetic_partition(inst.grid, inst.gauge, inst.potential, beta, tol);
    if (inst.gauge.is_zero()) gaps[i] = std::abs(reports[i].worst_violation);
  });
  CheckReport agg = aggregate("diamagnetic-partition", o, n, reports, tol);
  const double gap = *std::max_element(gaps.begin(), gaps.end());
  agg.details["zero_field_gap"] = gap;
  agg.pass = agg.pass && gap <= 1e-12;
  return finish(std::move(agg), reports);
}

std::vector<CheckReport> suite_resolvent(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-9);
  const int n = instance_count(o, 1000, 100);
  std::vector<CheckReport> reports(n);
  std::vector<bool> zero(n);
  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 3000000 + i);
    const RandomInstance inst = random_instance(seed);
    std::mt19937_64 rng(seed + 1);
    const double alphas[] = {0.5, 1.0, 2.0};
    const double alpha = alphas[std::uniform_int_distribution<int>(0, 2)(rng)];
    double floor = kInf;
    for (Boundary bc : kBoundaries)
      floor = std::min(floor, eigenvalues(assemble(inst.grid, bc, ConstantFieldGauge::none(inst.grid.dim),
                                                   inst.potential))
                                  .values[0]);
    const double shift = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    zero[i] = inst.gauge.is_zero();
    const double im = zero[i] ? 0.0 : std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    reports[i] = check_resolvent_power(inst.grid, inst.gauge, inst.potential, {floor - shift, im}, alpha, 3,
                                       seed, tol);
  });
  CheckReport agg = aggregate("resolvent-power", o, n, reports, tol);
  agg.details["zero_field_gap"] = zero_field_gap(reports, zero);
  agg.pass = agg.pass && zero_field_gap(reports, zero) <= 1e-12;
  return finish(std::move(agg), reports);
}

std::vector<CheckReport> suite_bracketing(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-10);
  const int n = instance_count(o, 100, 20);
  std::vector<CheckReport> reports(n);
  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 4000000 + i);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> side(2, 7);
    GridSpec g;
    g.dim = 2;
    g.shape = {side(rng), side(rng), 1};
    g.spacing = std::uniform_real_distribution<double>(0.3, 1.2)(rng);
    g.origin = Eigen::VectorXd::Zero(2);
    g.origin[0] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    g.origin[1] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const int axis = std::uniform_int_distribution<int>(0, 1)(rng);
    const int first = std::uniform_int_distribution<int>(1, g.shape[axis] - 1)(rng);
    const auto gauge = random_gauge(rng, 2, i % 2 == 0);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(g.node_count());
    for (Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
    reports[i] = check_bracketing(g, axis, first, gauge, v, tol);
  });
  return finish(aggregate("bracketing", o, n, reports, tol), reports);
}

std::vector<CheckReport> suite_decoupling(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-10);
  const int n = instance_count(o, 50, 10);
  std::vector<CheckReport> reports(n);
  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 5000000 + i);
    RandomInstance a = random_instance(seed, 2);
    RandomInstance b = random_instance(seed + 1, 2);
    b.grid.origin[0] = a.grid.origin[0] + a.grid.extent(0) + 1.0;
    b.gauge = a.gauge;
    const auto x = Boundary::neumann;
    reports[i] = check_decoupling(assemble(a.grid, x, a.gauge, a.potential),
                                  assemble(b.grid, x, b.gauge, b.potential), tol);
  });
  return finish(aggregate("decoupling", o, n, reports, tol), reports);
}

std::vector<CheckReport> suite_spectral_averaging(const SuiteOptions& o) {
  const double tol = o.tolerance.value_or(1e-10);
  const int n = instance_count(o, 20, 20);
  std::vector<CheckReport> reports(n + 1);

  SpectralAveragingInstance scalar;
  scalar.l = Eigen::MatrixXcd::Zero(1, 1);
  scalar.k = Eigen::MatrixXcd::Identity(1, 1);
  scalar.m = Eigen::MatrixXcd::Identity(1, 1);
  scalar.g = [](double) { return 1.0; };
  scalar.g_sup = 1.0;
  scalar.interval = EnergyInterval::closed(0.0, 1.0);
  scalar.psi = Eigen::VectorXcd::Ones(1);
  reports[0] = check_spectral_averaging(scalar, tol);
  const double equality = std::abs(reports[0].details["integral"].get<double>() - 1.0);
  reports[0].details["equality_gap"] = equality;

  parallel_for(n, o.jobs, [&](int i) {
    const std::uint64_t seed = mix_seed(o.seed, 6000000 + i);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const int size = 6;
    Eigen::MatrixXcd a(size, size);
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) a(r, c) = {normal(rng), normal(rng)};
    SpectralAveragingInstance inst;
    inst.l = 0.5 * (a + a.adjoint()) / std::sqrt(2.0 * size);
    inst.k = Eigen::MatrixXcd::Identity(size, size);
    inst.k(size - 1, size - 1) = 0.0;
    inst.m = inst.k * inst.k + 0.1 * Eigen::MatrixXcd::Identity(size, size);
    const double center = normal(rng);
    const double width = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    inst.g = [=](double x) { return std::exp(-0.5 * (x - center) * (x - center) / (width * width)); };
    inst.g_sup = 1.0;
    inst.interval = EnergyInterval::closed(-1.0, 1.0);
    inst.psi = random_vector(size, seed + 1);
    reports[i + 1] = check_spectral_averaging(inst, tol);
    reports[i + 1].params["seed"] = seed;
  });
  CheckReport agg = aggregate("spectral-averaging", o, n + 1, reports, tol);
  agg.details["scalar_equality_gap"] = equality;
  agg.pass = agg.pass && equality <= 1e-8;
  return finish(std::move(agg), reports);
}

std::vector<CheckReport> suite_golden_thompson(const SuiteOptions& o) {
  std::vector<CheckReport> reports;
  RunOptions ro;
  ro.jobs = o.jobs;
  const int r = o.instances > 0 ? o.instances : (o.quick ? 100 : 500);

  EnsembleSpec gauss;
  gauss.field = CovarianceModel::gaussian(2, 0.25, 1.0);
  gauss.grid = GridSpec::centered(2, 5, 1.0);
  gauss.gauge = ConstantFieldGauge::planar(2, 1.0);
  gauss.bc = Boundary::neumann;
  gauss.realizations = r;
  gauss.base_seed = o.seed;
  reports.push_back(check_golden_thompson_avg(gauss, 1.0, ro));

  AlloyModel alloy;
  alloy.law = UniformLaw{1.0, 0.0, 1.0};
  EnsembleSpec a;
  a.field = alloy;
  a.grid = GridSpec::unit_cells(2, 4, 1);
  a.gauge = ConstantFieldGauge::planar(2, 1.0);
  a.bc = Boundary::dirichlet;
  a.realizations = r;
  a.base_seed = o.seed + 1;
  reports.push_back(check_golden_thompson_avg(a, 1.0, ro));

  EnsembleSpec single = a;
  single.grid = GridSpec::unit_cells(1, 1, 1);
  single.gauge = ConstantFieldGauge::none(1);
  reports.push_back(check_golden_thompson_avg(single, 1.0, ro));

  const double tol = o.tolerance.value_or(0.0);
  for (auto& rep : reports) {
    rep.tolerance = tol;
    rep.settle();
  }
  return finish(aggregate("golden-thompson", o, static_cast<int>(reports.size()), reports, tol), reports);
}

std::vector<CheckReport> suite_neumann(const SuiteOptions& o) {
  std::vector<CheckReport> reports;
  for (int d : {1, 2, 3})
    for (double beta : {0.1, 1.0, 10.0})
      for (double side : {1.0, 2.0}) reports.push_back(check_neumann_partition_bound(side, beta, d));
  reports.push_back(check_neumann_partition_bound(1.0, 2.0 * std::numbers::pi, 1));
  const double tol = o.tolerance.value_or(0.0);
  for (auto& rep : reports) {
    rep.tolerance = tol;
    rep.settle();
  }
  return finish(aggregate("neumann-trace", o, static_cast<int>(reports.size()), reports, tol), reports);
}

}  // namespace

std::vector<EnergyInterval> wegner_ladder() {
  std::vector<EnergyInterval> ladder;
  for (int k = 0; k < 10; ++k) ladder.push_back(EnergyInterval::closed(0.3 * k, 0.3 * (k + 1)));
  return ladder;
}

namespace {

std::vector<CheckReport> suite_wegner(const SuiteOptions& o) {
  AlloyModel model;
  model.law = UniformLaw{1.0, 0.0, 1.0};
  RunOptions ro;
  ro.jobs = o.jobs;
  std::vector<CheckReport> reports;
  std::uint64_t offset = 0;
  for (double b : {0.0, 1.0})
    for (Boundary bc : kBoundaries) {
      EnsembleSpec spec;
      spec.field = model;
      spec.grid = GridSpec::unit_cells(2, 6, o.quick ? 1 : 2);
      spec.gauge = b == 0.0 ? ConstantFieldGauge::none(2) : ConstantFieldGauge::planar(2, b);
      spec.bc = bc;
      spec.realizations = o.instances > 0 ? o.instances : (o.quick ? 200 : 2000);
      spec.base_seed = o.seed + (offset++ << 32);
      reports.push_back(check_wegner_mc(spec, wegner_ladder(), ro));
    }
  const double tol = o.tolerance.value_or(0.0);
  for (auto& rep : reports) {
    rep.tolerance = tol;
    rep.settle();
  }
  return finish(aggregate("wegner-mc", o, static_cast<int>(reports.size()), reports, tol), reports);
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"diamagnetic-semigroup", "diamagnetic-partition", "resolvent-power", "bracketing",
          "decoupling",            "spectral-averaging",    "golden-thompson", "neumann-trace",
          "wegner-mc"};
}

std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& options) {
  if (name == "diamagnetic-semigroup") return suite_semigroup(options);
  if (name == "diamagnetic-partition") return suite_partition(options);
  if (name == "resolvent-power") return suite_resolvent(options);
  if (name == "bracketing") return suite_bracketing(options);
  if (name == "decoupling") return suite_decoupling(options);
  if (name == "spectral-averaging") return suite_spectral_averaging(options);
  if (name == "golden-thompson") return suite_golden_thompson(options);
  if (name == "neumann-trace") return suite_neumann(options);
  if (name == "wegner-mc") return suite_wegner(options);
  throw Error(ErrorKind::config, "unknown check '" + name + "'");
}

}  // namespace wl
