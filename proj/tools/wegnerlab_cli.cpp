// wegnerlab command-line driver: field sampling, IDS runs, bound curves, checks.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wegnerlab/bounds.hpp"
#include "wegnerlab/checks.hpp"
#include "wegnerlab/config.hpp"
#include "wegnerlab/error.hpp"
#include "wegnerlab/estimators.hpp"
#include "wegnerlab/io.hpp"
#include "wegnerlab/landau.hpp"
#include "wegnerlab/random_fields.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace wl;

namespace {

enum Exit { kOk = 0, kConfig = 2, kResource = 3, kCheck = 4 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out = ".";
  std::optional<double> tol;
  bool quick = false;
};

int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("WEGNERLAB_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// Collects outputs of one invocation and writes the manifest last.
class Run {
 public:
  Run(std::string out, json command, json config, json seeds)
      : out_(std::move(out)), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_);
    manifest_["tool"] = "wegnerlab";
    manifest_["version"] = WEGNERLAB_VERSION;
    manifest_["command"] = std::move(command);
    manifest_["config"] = std::move(config);
    manifest_["seeds"] = std::move(seeds);
    digest_ = sha256_hex(manifest_.dump());
    manifest_["digest"] = digest_;
  }

  std::string header() const {
    return "# wegnerlab " + std::string(WEGNERLAB_VERSION) + " manifest " + digest_ + "\n";
  }

  void write_csv(const std::string& name, const std::string& body) { emit(name, header() + body); }

  void write_jsonl(const std::string& name, const std::vector<std::string>& lines) {
    std::string text = json{{"manifest", digest_}, {"version", WEGNERLAB_VERSION}}.dump() + "\n";
    for (const auto& l : lines) text += l + "\n";
    emit(name, text);
  }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_["outputs"] = outputs_;
    manifest_["wall_time_s"] = wall;
    write_file((fs::path(out_) / "manifest.json").string(), manifest_.dump(2) + "\n");
  }

 private:
  void emit(const std::string& name, const std::string& text) {
    const std::string path = (fs::path(out_) / name).string();
    write_file(path, text);
    outputs_[name] = sha256_hex(text);
    std::cout << path << '\n';
  }

  std::string out_;
  std::chrono::steady_clock::time_point start_;
  json manifest_;
  json outputs_ = json::object();
  std::string digest_;
};

// ---------------------------------------------------------------------------

int field_sample(const Common& c) {
  if (c.config.empty()) throw Error(ErrorKind::config, "field sample needs --config");
  const RunConfig cfg = load_run_config(c.config);
  const std::uint64_t seed = c.seed.value_or(cfg.seed);
  const FieldSource source(cfg.field, cfg.grid);
  const FieldRealization f = source.draw(seed);
  Run run(c.out, {"field", "sample"}, cfg.raw, {{"seed", seed}});
  std::ostringstream body;
  write_field_csv(body, f);
  run.write_csv("field.csv", body.str());
  run.finish();
  return kOk;
}

int ids_run(const Common& c) {
  if (c.config.empty()) throw Error(ErrorKind::config, "ids run needs --config");
  const RunConfig cfg = load_run_config(c.config);
  const std::uint64_t seed = c.seed.value_or(cfg.seed);
  RunOptions opts;
  opts.jobs = resolve_jobs(c.jobs);
  double b = 0.0;
  if (cfg.staircase) {
    b = std::abs(cfg.gauge.field(0, 1));
    if (b == 0.0) throw Error(ErrorKind::config, "staircase overlay needs a nonzero field b");
  }
  const std::vector<double> energies = cfg.energies.values();

  std::ostringstream curve;
  curve << "size,X,E,mean,stderr,R" << (cfg.staircase ? ",staircase" : "") << '\n';
  std::ostringstream cauchy;
  cauchy << "X,size_a,size_b,max_abs_diff\n";
  for (Boundary bc : cfg.boundaries) {
    std::vector<MCResult> previous;
    int previous_size = 0;
    for (int size : cfg.sizes) {
      EnsembleSpec spec;
      spec.field = cfg.field;
      spec.grid = cfg.grid_of_size(size);
      spec.gauge = cfg.gauge;
      spec.bc = bc;
      spec.realizations = cfg.realizations;
      spec.base_seed = seed;
      if (spec.grid.node_count() > opts.dense_limit)
        throw Error(ErrorKind::resource_limit,
                    "size " + std::to_string(size) + " needs " + std::to_string(spec.grid.node_count()) +
                        " nodes, above the dense eigensolver limit " + std::to_string(opts.dense_limit) +
                        "; reduce sizes or nodes_per_unit");
      const auto ids = ids_curve(spec, energies, opts);
      for (std::size_t i = 0; i < energies.size(); ++i) {
        std::vector<std::string> row{std::to_string(size), std::string(1, boundary_tag(bc)),
                                     fmt_double(energies[i]), fmt_double(ids[i].mean),
                                     fmt_double(ids[i].std_error), std::to_string(ids[i].samples)};
        if (cfg.staircase) row.push_back(fmt_double(landau_staircase(b, energies[i])));
        curve << csv_row(row) << '\n';
      }
      if (!previous.empty()) {
        double diff = 0.0;
        for (std::size_t i = 0; i < ids.size(); ++i) diff = std::max(diff, std::abs(ids[i].mean - previous[i].mean));
        cauchy << csv_row({std::string(1, boundary_tag(bc)), std::to_string(previous_size), std::to_string(size),
                           fmt_double(diff)})
               << '\n';
      }
      previous = ids;
      previous_size = size;
    }
  }
  Run run(c.out, {"ids", "run"}, cfg.raw, {{"base_seed", seed}, {"schedule", "base_seed xor r"}});
  run.write_csv("ids.csv", curve.str());
  run.write_csv("cauchy.csv", cauchy.str());
  run.finish();
  return kOk;
}

struct BoundArgs {
  std::string family = "alloy-uniform";
  int dim = 2;
  double gmax = 1.0, v1 = 1.0, alpha = 1.0, height = 1.0;
  double c0 = 1.0, tau = 1.0, gamma = 1e-3;
  double beta = 1.0, ell = 1.0, s = 0.0;
  std::vector<double> energy;
  double emin = -1.0, emax = 1.0;
  int count = 21;
  std::vector<double> probes{-50.0, -100.0, -200.0, 1e3, 1e4, 1e5};
};

BoundFamily make_family(const BoundArgs& a) {
  if (a.family == "alloy-uniform") return AlloyUniformFamily{a.dim, a.gmax, a.v1};
  if (a.family == "alloy-laplace")
    return AlloyLaplaceFamily{a.dim, a.alpha, a.v1, SingleSiteProfile::indicator(a.height)};
  if (a.family == "gauss") return GaussFamily{CovarianceModel::gaussian(a.dim, a.c0, a.tau), a.gamma};
  throw Error(ErrorKind::config, "unknown family '" + a.family + "'");
}

json family_json(const BoundArgs& a) {
  json j{{"family", a.family}, {"dim", a.dim}};
  if (a.family == "alloy-uniform") j.update({{"gmax", a.gmax}, {"v1", a.v1}});
  if (a.family == "alloy-laplace") j.update({{"alpha", a.alpha}, {"v1", a.v1}, {"height", a.height}});
  if (a.family == "gauss") j.update({{"c0", a.c0}, {"tau", a.tau}, {"gamma", a.gamma}});
  return j;
}

std::vector<double> energy_list(const BoundArgs& a) {
  if (!a.energy.empty()) return a.energy;
  if (a.count < 1 || !(a.emax >= a.emin)) throw Error(ErrorKind::config, "need emin <= emax and count >= 1");
  return EnergyGrid{a.emin, a.emax, a.count}.values();
}

int wegner_curve(const Common& c, const BoundArgs& a, bool minimise, const std::string& name) {
  const BoundFamily family = make_family(a);
  const auto energies = energy_list(a);
  json config = family_json(a);
  config["energies"] = energies;
  BoundCurve curve;
  if (minimise) {
    curve = minimize_curve(family, energies, default_domain(family), resolve_jobs(c.jobs));
  } else {
    config.update({{"beta", a.beta}, {"ell", a.ell}, {"s", a.s}});
    curve = evaluate_curve(family, energies, {a.beta, a.ell, a.s});
  }
  Run run(c.out, {"wegner", minimise ? "minimize" : "eval"}, config, json::object());
  std::ostringstream body;
  write_bound_csv(body, curve);
  run.write_csv(name, body.str());
  run.finish();
  for (double w : curve.values)
    if (!std::isfinite(w)) {
      std::cerr << "bound is not finite on the requested grid\n";
      return kCheck;
    }
  return kOk;
}

int wegner_fig1(const Common& c) {
  // B = 1: C(0) = (B/5)^2, tau = 100 B^{-1/2}
  BoundArgs a;
  a.family = "gauss";
  a.dim = 2;
  a.c0 = 0.04;
  a.tau = 100.0;
  a.emin = -0.5;
  a.emax = 2.5;
  a.count = 61;
  const BoundFamily family = make_family(a);
  const auto energies = energy_list(a);
  const BoundCurve curve = minimize_curve(family, energies, default_domain(family), resolve_jobs(c.jobs));
  json config = family_json(a);
  config["b"] = 1.0;
  config["energies"] = energies;
  Run run(c.out, {"wegner", "fig1"}, config, json::object());
  std::ostringstream body;
  body << "# reference level 1/(2 pi) = " << fmt_double(1.0 / (2.0 * std::numbers::pi)) << '\n';
  write_bound_csv(body, curve);
  run.write_csv("fig1.csv", body.str());
  run.finish();
  bool ok = true;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    ok = ok && std::isfinite(curve.values[i]) && curve.values[i] > 0.0;
    if (i > 0) ok = ok && curve.values[i] >= curve.values[i - 1];
  }
  if (!ok) std::cerr << "minimised curve is not finite and nondecreasing\n";
  return ok ? kOk : kCheck;
}

int wegner_asymptotics(const Common& c, const BoundArgs& a) {
  const CovarianceModel model = CovarianceModel::gaussian(a.dim, a.c0, a.tau);
  const AsymptoticsReport rep = gauss_asymptotics(model, a.s, a.probes);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  json config = family_json(a);
  config.update({{"s", a.s}, {"probes", a.probes}});
  Run run(c.out, {"wegner", "asymptotics"}, config, json::object());
  std::ostringstream body;
  body << "regime,E,ratio,limit\n";
  for (const auto& p : rep.low)
    body << csv_row({"low", fmt_double(p.energy), fmt_double(p.ratio), fmt_double(p.limit)}) << '\n';
  for (const auto& p : rep.high)
    body << csv_row({"high", fmt_double(p.energy), fmt_double(p.ratio), fmt_double(p.limit)}) << '\n';
  run.write_csv("asymptotics.csv", body.str());
  run.finish();
  return kOk;
}

int verify(const Common& c, const std::string& target) {
  std::vector<std::string> names;
  if (target == "all") names = suite_names();
  else names.push_back(target);
  const auto known = suite_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw Error(ErrorKind::config, "unknown check '" + n + "'");

  SuiteOptions o;
  o.quick = c.quick;
  o.jobs = resolve_jobs(c.jobs);
  if (c.seed) o.seed = *c.seed;
  o.tolerance = c.tol;

  std::vector<std::string> lines;
  std::ostringstream summary;
  summary << "name,worst_violation,tolerance,pass\n";
  bool all_pass = true;
  for (const auto& n : names) {
    const auto reports = run_suite(n, o);
    for (const auto& r : reports) lines.push_back(r.jsonl());
    const CheckReport& agg = reports.back();
    all_pass = all_pass && agg.pass;
    summary << csv_row({agg.name, fmt_double(agg.worst_violation), fmt_double(agg.tolerance),
                        agg.pass ? "true" : "false"})
            << '\n';
    std::cerr << (agg.pass ? "PASS " : "FAIL ") << agg.name << " worst=" << agg.worst_violation << '\n';
  }
  json config{{"checks", names}, {"quick", o.quick}};
  if (o.tolerance) config["tolerance"] = *o.tolerance;
  Run run(c.out, {"verify", target}, config, {{"seed", o.seed}});
  run.write_jsonl("verify.jsonl", lines);
  run.write_csv("verify_summary.csv", summary.str());
  run.finish();
  return all_pass ? kOk : kCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wegnerlab: random magnetic Schroedinger operators, Wegner bounds and checks"};
  app.set_version_flag("--version", std::string(WEGNERLAB_VERSION));
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration");
    sub->add_option("--seed", common.seed, "base seed (overrides the config)");
    sub->add_option("--jobs", common.jobs, "worker threads (env WEGNERLAB_JOBS)");
    sub->add_option("--out", common.out, "output directory");
  };

  auto* field = app.add_subcommand("field", "random potentials");
  field->require_subcommand(1);
  auto* sample = field->add_subcommand("sample", "write one realization as CSV");
  add_common(sample);

  auto* ids = app.add_subcommand("ids", "integrated density of states");
  ids->require_subcommand(1);
  auto* ids_run_cmd = ids->add_subcommand("run", "Monte Carlo IDS curves for X in {D, N}");
  add_common(ids_run_cmd);

  BoundArgs bargs;
  bool fig1 = false;
  auto* wegner = app.add_subcommand("wegner", "density-of-states bounds");
  wegner->require_subcommand(0, 1);
  add_common(wegner);
  wegner->add_flag("--fig1", fig1, "minimised Gaussian bound for B = 1, C(0) = 0.04, tau = 100");
  auto add_bound = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--family", bargs.family, "alloy-uniform | alloy-laplace | gauss");
    sub->add_option("--dim", bargs.dim);
    sub->add_option("--gmax", bargs.gmax);
    sub->add_option("--v1", bargs.v1);
    sub->add_option("--alpha", bargs.alpha);
    sub->add_option("--height", bargs.height, "single-site height (alloy-laplace)");
    sub->add_option("--c0", bargs.c0);
    sub->add_option("--tau", bargs.tau);
    sub->add_option("--gamma", bargs.gamma);
    sub->add_option("--beta", bargs.beta);
    sub->add_option("--ell", bargs.ell);
    sub->add_option("--s", bargs.s);
    sub->add_option("--energy", bargs.energy, "explicit energies");
    sub->add_option("--emin", bargs.emin);
    sub->add_option("--emax", bargs.emax);
    sub->add_option("--count", bargs.count);
  };
  auto* eval = wegner->add_subcommand("eval", "bound at a fixed parameter point");
  add_bound(eval);
  auto* minimize = wegner->add_subcommand("minimize", "bound minimised per energy");
  add_bound(minimize);
  auto* asym = wegner->add_subcommand("asymptotics", "low/high-energy ratios of the Gaussian bound");
  add_bound(asym);
  asym->add_option("--probe", bargs.probes, "probe energies");

  std::string target;
  auto* verify_cmd = app.add_subcommand("verify", "run inequality checks (name or 'all')");
  add_common(verify_cmd);
  verify_cmd->add_option("check", target)->required();
  verify_cmd->add_option("--tol", common.tol, "override every tolerance");
  verify_cmd->add_flag("--quick", common.quick, "reduced instance counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*sample) return field_sample(common);
    if (*ids_run_cmd) return ids_run(common);
    if (*wegner) {
      if (*eval) return wegner_curve(common, bargs, false, "bounds.csv");
      if (*minimize) return wegner_curve(common, bargs, true, "bounds.csv");
      if (*asym) return wegner_asymptotics(common, bargs);
      if (fig1) return wegner_fig1(common);
      std::cerr << "wegner: choose eval, minimize, asymptotics or --fig1\n";
      return kConfig;
    }
    if (*verify_cmd) return verify(common, target);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::resource_limit:
      case ErrorKind::numerical:
        return kResource;
      default:
        return kConfig;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kResource;
  }
  return kConfig;
}
