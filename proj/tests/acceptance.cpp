#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wegnerlab/bounds.hpp"
#include "wegnerlab/checks.hpp"
#include "wegnerlab/io.hpp"
#include "wegnerlab/landau.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!note.empty()) note += "; ";
      note += what;
    }
  }
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "wegnerlab_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(WEGNERLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome landau_degeneracy() {
  Outcome o;
  double worst = 0.0;
  for (double b : {0.5, 1.0, 2.0 * kPi})
    for (int level : {0, 1, 2, 5}) {
      const double exact = b / (2.0 * kPi);
      const double rel = std::abs(landau_cell_trace({b, level}) - exact) / exact;
      worst = std::max(worst, rel);
      o.require(rel <= 1e-6, "B=" + sci(b) + " l=" + std::to_string(level) + " rel=" + sci(rel));
    }
  if (o.pass) o.note = "worst rel " + sci(worst);
  return o;
}

Outcome staircase() {
  Outcome o;
  for (double b : {0.5, 1.0, 2.0 * kPi})
    for (int level = 0; level <= 10; ++level) {
      const double e = (level + 0.5) * b;
      const double jump = landau_staircase(b, std::nextafter(e, INFINITY)) - landau_staircase(b, e);
      o.require(std::abs(jump - b / (2.0 * kPi)) <= 1e-14, "jump at l=" + std::to_string(level));
      o.require(landau_staircase(b, e) == level * b / (2.0 * kPi), "left continuity at l=" + std::to_string(level));
    }
  const double rel = std::abs(landau_staircase(1e-3, 1.0) - 1.0 / (2.0 * kPi)) / (1.0 / (2.0 * kPi));
  o.require(rel <= 0.02, "B->0 rel " + sci(rel));
  if (o.pass) o.note = "B->0 rel " + sci(rel);
  return o;
}

Outcome suite(const std::string& name, int instances, const std::function<void(const CheckReport&, Outcome&)>& extra = {}) {
  Outcome o;
  SuiteOptions opts;
  opts.instances = instances;
  opts.jobs = 4;
  const auto reports = run_suite(name, opts);
  const CheckReport& agg = reports.back();
  o.require(agg.pass, name + " worst " + sci(agg.worst_violation) + " tol " + sci(agg.tolerance) + " failures " +
                          std::to_string(agg.details.value("failures", 0)));
  if (extra) extra(agg, o);
  return o;
}

Outcome wegner_dominance() {
  Outcome o = suite("wegner-mc", 0);
  if (o.pass) o.note = "4 ensembles x 10 intervals, R=2000";
  return o;
}

Outcome diamagnetic() {
  Outcome o;
  std::string notes;
  for (const std::string name : {"diamagnetic-semigroup", "diamagnetic-partition", "resolvent-power"}) {
    const Outcome s = suite(name, 1000, [&](const CheckReport& agg, Outcome& out) {
      const double gap = agg.details.value("zero_field_gap", 0.0);
      out.require(gap <= 1e-12, name + " zero-field gap " + sci(gap));
      notes += name + " worst " + sci(agg.worst_violation) + " ";
    });
    o.require(s.pass, s.note);
  }
  if (o.pass) o.note = notes;
  return o;
}

Outcome bracketing() {
  Outcome o = suite("bracketing", 100, [](const CheckReport& agg, Outcome& out) {
    out.require(agg.tolerance == 1e-10, "tolerance");
  });
  if (o.pass) o.note = "100 instances";
  return o;
}

Outcome spectral_averaging() {
  double gap = 0.0;
  Outcome o = suite("spectral-averaging", 20, [&](const CheckReport& agg, Outcome& out) {
    gap = agg.details.value("scalar_equality_gap", INFINITY);
    out.require(gap <= 1e-8, "scalar gap " + sci(gap));
  });
  if (o.pass) o.note = "scalar gap " + sci(gap);
  return o;
}

Outcome neumann_trace() {
  Outcome o = suite("neumann-trace", 0);
  const CheckReport r = check_neumann_partition_bound(1.0, 2.0 * kPi, 1);
  const double trace = r.details["trace"].get<double>();
  const double bound = r.details["bound"].get<double>();
  o.require(std::round(trace * 1e4) == 1e4, "trace " + sci(trace));
  o.require(std::round(bound * 1e4) == 11592.0, "bound " + sci(bound));
  o.require(r.pass, "d=1 L=1 beta=2pi");
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "trace %.4f bound %.4f", trace, bound);
    o.note = buf;
  }
  return o;
}

Outcome gauss_asymptotics_criterion() {
  Outcome o;
  std::string notes;
  for (double c0 : {0.25, 1.0, 4.0}) {
    const double e = -50.0 * std::sqrt(c0);
    const auto rep = gauss_asymptotics(CovarianceModel::gaussian(2, c0, 1.0), 0.0, {e});
    const double limit = -1.0 / (2.0 * c0);
    const double rel = std::abs(rep.low.at(0).ratio - limit) / std::abs(limit);
    o.require(rel <= 0.1, "C0=" + sci(c0) + " rel " + sci(rel));
    notes += "C0=" + sci(c0) + " rel " + sci(rel) + " ";
  }
  const double k = gauss_high_energy_limit(2, 1.0);
  o.require(std::abs(k - 0.17259) <= 1e-4, "high-energy constant " + sci(k));
  char buf[48];
  std::snprintf(buf, sizeof buf, "high-energy constant %.5f", k);
  if (o.pass) o.note = notes + buf;
  return o;
}

Outcome fig1() {
  Outcome o;
  const std::string out = (scratch() / "fig1").string();
  const int code = cli("wegner --fig1 --out " + out);
  o.require(code == 0, "exit " + std::to_string(code));
  if (code != 0) return o;
  const auto rows = csv_rows(out + "/fig1.csv");
  o.require(rows.size() == 62, "row count");
  double prev = -INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double e = std::stod(rows[i][0]);
    const double w = std::stod(rows[i][1]);
    o.require(std::isfinite(w) && w > 0.0, "W not finite at E=" + rows[i][0]);
    o.require(w >= prev, "decrease at E=" + rows[i][0]);
    o.require(e >= -0.5 - 1e-12 && e <= 2.5 + 1e-12, "energy range");
    prev = w;
  }
  if (o.pass) o.note = "61 energies on [-0.5, 2.5]";
  return o;
}

Outcome determinism() {
  Outcome o;
  const json field = json::parse(R"({"schema_version": 1, "grid": {"dim": 2, "unit_cells": 8, "nodes_per_unit": 2},
                                     "field": {"kind": "gaussian", "c0": 0.04, "tau": 2.0}, "seed": 17})");
  const json ids = json::parse(R"({"schema_version": 1, "grid": {"dim": 2, "unit_cells": 4},
                                   "field": {"kind": "alloy-uniform"}, "gauge": {"b": 1.0}, "realizations": 200,
                                   "sizes": [2, 3, 4], "energies": {"min": -0.5, "max": 4.0, "count": 19},
                                   "staircase": true, "seed": 3})");
  write_file((scratch() / "field.json").string(), field.dump());
  write_file((scratch() / "ids.json").string(), ids.dump());
  const std::vector<std::pair<std::string, std::string>> commands{
      {"field", "field sample --config " + (scratch() / "field.json").string()},
      {"ids", "ids run --config " + (scratch() / "ids.json").string()},
      {"minimize", "wegner minimize --family gauss --c0 0.04 --tau 2 --emin -1 --emax 3 --count 21"},
      {"fig1", "wegner --fig1"},
      {"asym", "wegner asymptotics --family gauss"},
      {"verify", "verify all"}};
  int files = 0;
  for (const auto& [name, args] : commands) {
    std::vector<fs::path> dirs;
    for (const std::string run : {"a1", "b1", "c4"}) {
      const fs::path dir = scratch() / "det" / name / run;
      const int code = cli(args + " --jobs " + run.substr(1) + " --out " + dir.string());
      o.require(code == 0, name + " exit " + std::to_string(code));
      dirs.push_back(dir);
    }
    if (!o.pass) return o;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string file = entry.path().filename().string();
      const std::string ref = read_file(entry.path().string());
      if (file == "manifest.json") {
        json m = json::parse(ref);
        m.erase("wall_time_s");
        for (std::size_t k = 1; k < dirs.size(); ++k) {
          json other = json::parse(read_file((dirs[k] / file).string()));
          other.erase("wall_time_s");
          o.require(m == other, name + "/manifest.json differs");
        }
        continue;
      }
      ++files;
      for (std::size_t k = 1; k < dirs.size(); ++k)
        o.require(read_file((dirs[k] / file).string()) == ref, name + "/" + file + " differs");
    }
  }
  if (o.pass) o.note = std::to_string(files) + " CSV/JSONL outputs identical over 2 runs and jobs 1 vs 4";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"landau-degeneracy", landau_degeneracy},
      {"landau-staircase", staircase},
      {"wegner-dominance", wegner_dominance},
      {"diamagnetic-suite", diamagnetic},
      {"bracketing-chain", bracketing},
      {"spectral-averaging", spectral_averaging},
      {"neumann-trace-bound", neumann_trace},
      {"gaussian-asymptotics", gauss_asymptotics_criterion},
      {"fig1-qualitative", fig1},
      {"determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.note.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch());
  return failures == 0 ? 0 : 1;
}
