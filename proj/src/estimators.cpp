#include "wegnerlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "wegnerlab/error.hpp"

namespace wl {

std::string field_tag(const FieldModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ZeroField>) return "zero";
        else if constexpr (std::is_same_v<T, ConstantField>) return "constant";
        else if constexpr (std::is_same_v<T, AlloyModel>) return "alloy-" + law_name(m.law);
        else return "gaussian";
      },
      model);
}

void EnsembleSpec::validate() const {
  require(realizations >= 1, "ensemble needs at least one realization");
  grid.validate();
  gauge.validate();
  require(gauge.dim() == grid.dim, "gauge dimension does not match the grid");
  if (const auto* a = std::get_if<AlloyModel>(&field)) {
    a->validate();
    check_alloy_grid(grid);
  }
  if (const auto* c = std::get_if<CovarianceModel>(&field)) {
    c->validate();
    require(c->dim == grid.dim, "covariance dimension does not match the grid");
  }
}

MCResult summarize(const std::vector<double>& values, bool keep_values) {
  MCResult r;
  r.samples = static_cast<int>(values.size());
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / r.samples;
  if (r.samples > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std_error = std::sqrt(ss / (r.samples - 1)) / std::sqrt(static_cast<double>(r.samples));
  }
  if (keep_values) r.values = values;
  return r;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(jobs, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  auto run = [&](int worker) {
    for (int i = worker; i < count; i += jobs) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);  // lowest index first, independent of schedule
}

FieldSource::FieldSource(const FieldModel& model, const GridSpec& grid) : model_(model), grid_(grid) {
  if (const auto* c = std::get_if<CovarianceModel>(&model_))
    gaussian_ = std::make_shared<const GaussianSampler>(*c, grid_);
  if (const auto* a = std::get_if<AlloyModel>(&model_)) {
    a->validate();
    check_alloy_grid(grid_);
  }
}

FieldRealization FieldSource::draw(std::uint64_t seed) const {
  if (gaussian_) return gaussian_->sample(seed);
  if (const auto* a = std::get_if<AlloyModel>(&model_)) return sample_alloy(*a, grid_, seed);
  FieldRealization f;
  f.grid = grid_;
  f.seed = seed;
  f.model_tag = field_tag(model_);
  const double c = std::holds_alternative<ConstantField>(model_) ? std::get<ConstantField>(model_).value : 0.0;
  f.values = Eigen::VectorXd::Constant(grid_.node_count(), c);
  return f;
}

std::vector<std::vector<double>> map_realizations(
    const EnsembleSpec& spec, const RunOptions& options,
    const std::function<std::vector<double>(const HermitianOperator&, const FieldRealization&)>&
        observable) {
  spec.validate();
  if (spec.grid.node_count() > options.dense_limit)
    throw Error(ErrorKind::resource_limit,
                "grid of " + std::to_string(spec.grid.node_count()) +
                    " nodes exceeds the dense eigensolver limit of " + std::to_string(options.dense_limit));
  const HermitianOperator kinetic = assemble(spec.grid, spec.bc, spec.gauge);
  const FieldSource source(spec.field, spec.grid);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(spec.realizations));
  parallel_for(spec.realizations, options.jobs, [&](int r) {
    const std::uint64_t seed = spec.seed_of(r);
    try {
      const FieldRealization field = source.draw(seed);
      out[r] = observable(with_potential(kinetic, field.values), field);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (realization " + std::to_string(r) +
                                ", seed " + std::to_string(seed) + ")");
    }
  });
  return out;
}

namespace {

std::vector<MCResult> column_summaries(const std::vector<std::vector<double>>& rows, std::size_t columns,
                                       bool keep) {
  std::vector<MCResult> out;
  std::vector<double> col(rows.size());
  for (std::size_t c = 0; c < columns; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
    out.push_back(summarize(col, keep));
  }
  return out;
}

}  // namespace

std::vector<MCResult> expected_counting(const EnsembleSpec& spec,
                                        const std::vector<EnergyInterval>& intervals,
                                        const RunOptions& options) {
  for (const auto& i : intervals) i.validate();
  SpectralOptions so;
  so.dense_limit = options.dense_limit;
  const auto rows = map_realizations(spec, options, [&](const HermitianOperator& op, const FieldRealization&) {
    const Spectrum s = eigenvalues(op, so);
    std::vector<double> v;
    for (const auto& i : intervals) v.push_back(static_cast<double>(count_in_interval(s, i).count));
    return v;
  });
  return column_summaries(rows, intervals.size(), options.keep_values);
}

MCResult expected_counting(const EnsembleSpec& spec, const EnergyInterval& interval,
                           const RunOptions& options) {
  return expected_counting(spec, std::vector<EnergyInterval>{interval}, options).front();
}

std::vector<MCResult> ids_curve(const EnsembleSpec& spec, const std::vector<double>& energies,
                                const RunOptions& options) {
  require(std::is_sorted(energies.begin(), energies.end()), "IDS energies must be ascending");
  SpectralOptions so;
  so.dense_limit = options.dense_limit;
  const double volume = spec.grid.volume();
  const auto rows = map_realizations(spec, options, [&](const HermitianOperator& op, const FieldRealization&) {
    const Spectrum s = eigenvalues(op, so);
    std::vector<double> v;
    for (double e : energies) v.push_back(finite_volume_ids(s, e, volume));
    return v;
  });
  return column_summaries(rows, energies.size(), options.keep_values);
}

ChebyshevReport chebyshev_check(const EnsembleSpec& spec, const EnergyInterval& interval,
                                const RunOptions& options) {
  interval.validate();
  SpectralOptions so;
  so.dense_limit = options.dense_limit;
  const auto rows = map_realizations(spec, options, [&](const HermitianOperator& op, const FieldRealization&) {
    const double nu = static_cast<double>(count_in_interval(eigenvalues(op, so), interval).count);
    return std::vector<double>{nu, nu >= 1.0 ? 1.0 : 0.0};
  });
  const auto cols = column_summaries(rows, 2, options.keep_values);
  ChebyshevReport rep;
  rep.counting = cols[0];
  rep.frequency = cols[1].mean;
  rep.frequency_stderr = cols[1].std_error;
  const double sigma = std::hypot(cols[0].std_error, cols[1].std_error);
  rep.margin = rep.counting.mean + 3.0 * sigma - rep.frequency;
  rep.holds = rep.margin >= 0.0;
  return rep;
}

MCResult expected_heat_trace(const EnsembleSpec& spec, double beta, const RunOptions& options) {
  require(beta > 0.0, "inverse temperature must be positive");
  SpectralOptions so;
  so.dense_limit = options.dense_limit;
  const auto rows = map_realizations(spec, options, [&](const HermitianOperator& op, const FieldRealization&) {
    return std::vector<double>{heat_trace(eigenvalues(op, so), beta)};
  });
  return column_summaries(rows, 1, options.keep_values).front();
}

}  // namespace wl
