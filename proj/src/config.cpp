#include "wegnerlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"

namespace wl {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where + " needs '" + key + "'");
  const json& v = j.at(key);
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

int integer(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where + " needs '" + key + "'");
  if (!j.at(key).is_number_integer()) config_error(where + "." + key + " must be an integer");
  return j.at(key).get<int>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) config_error(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) config_error(where + "." + key + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SingleSiteProfile parse_single_site(const json& j, int dim) {
  const std::string where = "field.single_site";
  allow_keys(j, where, {"height", "table", "nodes_per_unit", "radius"});
  if (!j.contains("table")) return SingleSiteProfile::indicator(number_or(j, "height", 1.0, where));
  return SingleSiteProfile::tabulated(dim, integer(j, "nodes_per_unit", where), integer(j, "radius", where),
                                      numbers(j, "table", where));
}

template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    config_error(e.what());
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
}

}  // namespace

FieldModel parse_field(const json& j, int dim) {
  return as_config([&]() -> FieldModel {
    const std::string where = "field";
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
      config_error("field needs a string 'kind'");
    const std::string kind = j.at("kind");
    if (kind == "zero") {
      allow_keys(j, where, {"kind"});
      return ZeroField{};
    }
    if (kind == "gaussian") {
      allow_keys(j, where, {"kind", "c0", "tau", "radii", "values"});
      if (j.contains("radii")) {
        if (j.contains("c0") || j.contains("tau")) config_error("tabulated covariance takes only radii and values");
        return CovarianceModel::tabulated(dim, numbers(j, "radii", where), numbers(j, "values", where));
      }
      return CovarianceModel::gaussian(dim, number(j, "c0", where), number(j, "tau", where));
    }
    if (kind.rfind("alloy-", 0) == 0) {
      AlloyModel m;
      if (kind == "alloy-uniform") {
        allow_keys(j, where, {"kind", "support", "gmax", "single_site", "v1", "v2"});
        const auto support = j.contains("support") ? numbers(j, "support", where) : std::vector<double>{0.0, 1.0};
        if (support.size() != 2) config_error("field.support must be [lo, hi]");
        UniformLaw law{0.0, support[0], support[1]};
        law.gmax = number_or(j, "gmax", 1.0 / (support[1] - support[0]), where);
        m.law = law;
      } else if (kind == "alloy-laplace") {
        allow_keys(j, where, {"kind", "alpha", "single_site", "v1", "v2"});
        m.law = LaplaceLaw{number(j, "alpha", where)};
      } else if (kind == "alloy-fixed") {
        allow_keys(j, where, {"kind", "value", "single_site", "v1", "v2"});
        m.law = FixedLaw{number_or(j, "value", 0.0, where)};
      } else {
        config_error("unknown field kind '" + kind + "'");
      }
      if (j.contains("single_site")) m.single_site = parse_single_site(j.at("single_site"), dim);
      const double h = m.single_site.kind == SingleSiteProfile::Kind::indicator ? m.single_site.height : 1.0;
      m.v1 = number_or(j, "v1", h, where);
      m.v2 = number_or(j, "v2", h, where);
      m.validate();
      return m;
    }
    config_error("unknown field kind '" + kind + "'");
  });
}

GridSpec parse_grid(const json& j) {
  return as_config([&] {
    const std::string where = "grid";
    allow_keys(j, where, {"dim", "unit_cells", "nodes_per_unit", "cells", "spacing", "origin", "centered"});
    const int dim = integer(j, "dim", where);
    if (dim < 1 || dim > 3) config_error("grid.dim must be 1, 2 or 3");
    if (j.contains("unit_cells")) {
      if (j.contains("cells") || j.contains("spacing") || j.contains("origin") || j.contains("centered"))
        config_error("grid.unit_cells excludes cells/spacing/origin/centered");
      const int npu = j.contains("nodes_per_unit") ? integer(j, "nodes_per_unit", where) : 1;
      const int side = integer(j, "unit_cells", where);
      if (side < 1 || npu < 1) config_error("grid.unit_cells and nodes_per_unit must be >= 1");
      return GridSpec::unit_cells(dim, side, npu);
    }
    if (j.contains("nodes_per_unit")) config_error("grid.nodes_per_unit needs unit_cells");
    const int cells = integer(j, "cells", where);
    const double h = number(j, "spacing", where);
    if (cells < 1 || !(h > 0.0)) config_error("grid.cells must be >= 1 and spacing > 0");
    if (j.value("centered", false)) {
      if (j.contains("origin")) config_error("grid.centered excludes origin");
      return GridSpec::centered(dim, cells, h);
    }
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
    if (j.contains("origin")) {
      const auto o = numbers(j, "origin", where);
      if (static_cast<int>(o.size()) != dim) config_error("grid.origin needs dim entries");
      for (int k = 0; k < dim; ++k) origin[k] = o[k];
    }
    return GridSpec::cube(dim, cells, h, origin);
  });
}

ConstantFieldGauge parse_gauge(const json& j, int dim) {
  return as_config([&] {
    if (j.is_null()) return ConstantFieldGauge::none(dim);
    allow_keys(j, "gauge", {"b", "field"});
    if (j.contains("field")) {
      if (j.contains("b")) config_error("gauge takes either b or field");
      const json& f = j.at("field");
      if (!f.is_array() || static_cast<int>(f.size()) != dim) config_error("gauge.field must be a dim x dim array");
      ConstantFieldGauge g = ConstantFieldGauge::none(dim);
      for (int r = 0; r < dim; ++r) {
        if (!f[r].is_array() || static_cast<int>(f[r].size()) != dim)
          config_error("gauge.field must be a dim x dim array");
        for (int c = 0; c < dim; ++c) g.field(r, c) = f[r][c].get<double>();
      }
      g.validate();
      return g;
    }
    const double b = number_or(j, "b", 0.0, "gauge");
    if (b == 0.0) return ConstantFieldGauge::none(dim);
    if (dim < 2) config_error("a magnetic field needs dim >= 2");
    return ConstantFieldGauge::planar(dim, b);
  });
}

std::vector<double> EnergyGrid::values() const {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
  return v;
}

EnergyGrid parse_energies(const json& j) {
  return as_config([&] {
    allow_keys(j, "energies", {"min", "max", "count"});
    EnergyGrid e;
    e.min = number(j, "min", "energies");
    e.max = number(j, "max", "energies");
    e.count = integer(j, "count", "energies");
    if (e.count < 1 || !(e.max >= e.min) || !std::isfinite(e.min) || !std::isfinite(e.max))
      config_error("energies need min <= max (finite) and count >= 1");
    return e;
  });
}

RunConfig parse_run_config(const json& j) {
  return as_config([&] {
    allow_keys(j, "config", {"schema_version", "grid", "field", "gauge", "boundary", "realizations", "seed",
                             "sizes", "energies", "staircase"});
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != kSchemaVersion)
      config_error("config needs schema_version = " + std::to_string(kSchemaVersion));
    RunConfig c;
    c.raw = j;
    if (!j.contains("grid")) config_error("config needs 'grid'");
    c.grid = parse_grid(j.at("grid"));
    c.field = j.contains("field") ? parse_field(j.at("field"), c.grid.dim) : FieldModel{ZeroField{}};
    c.gauge = parse_gauge(j.value("gauge", json()), c.grid.dim);
    const json bc = j.value("boundary", json::array({"D", "N"}));
    for (const auto& b : bc.is_array() ? bc : json::array({bc})) {
      if (!b.is_string() || (b != "D" && b != "N")) config_error("boundary entries must be \"D\" or \"N\"");
      c.boundaries.push_back(parse_boundary(b.get<std::string>()[0]));
    }
    if (c.boundaries.empty()) config_error("boundary list is empty");
    c.realizations = j.contains("realizations") ? integer(j, "realizations", "config") : 1;
    if (c.realizations < 1) config_error("realizations must be >= 1");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
        config_error("seed must be a nonnegative integer");
      if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0)
        config_error("seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("sizes")) {
      if (!j.at("sizes").is_array()) config_error("sizes must be an array of integers");
      for (const auto& s : j.at("sizes")) {
        if (!s.is_number_integer() || s.get<int>() < 1) config_error("sizes must be positive integers");
        c.sizes.push_back(s.get<int>());
      }
    }
    if (c.sizes.empty()) c.sizes.push_back(j.at("grid").contains("unit_cells") ? j.at("grid").at("unit_cells").get<int>()
                                                                             : j.at("grid").at("cells").get<int>());
    if (j.contains("energies")) c.energies = parse_energies(j.at("energies"));
    if (j.contains("staircase")) {
      if (!j.at("staircase").is_boolean()) config_error("staircase must be a boolean");
      c.staircase = j.at("staircase").get<bool>();
    }
    if (c.staircase && c.grid.dim != 2) config_error("staircase overlay needs dim = 2");
    for (int s : c.sizes) {
      EnsembleSpec probe;
      probe.field = c.field;
      probe.grid = c.grid_of_size(s);
      probe.gauge = c.gauge;
      probe.validate();
    }
    return c;
  });
}

GridSpec RunConfig::grid_of_size(int size) const {
  json g = raw.at("grid");
  g[g.contains("unit_cells") ? "unit_cells" : "cells"] = size;
  return parse_grid(g);
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace wl
