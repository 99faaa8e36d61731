#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "wegnerlab/gauge.hpp"
#include "wegnerlab/grid.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/random_fields.hpp"
#include "wegnerlab/spectral.hpp"

namespace wl {

struct ZeroField {};

/// Deterministic constant potential (used by degenerate ensembles).
struct ConstantField {
  double value = 0.0;
};

using FieldModel = std::variant<ZeroField, ConstantField, AlloyModel, CovarianceModel>;

std::string field_tag(const FieldModel& model);

struct EnsembleSpec {
  FieldModel field = ZeroField{};
  GridSpec grid;
  ConstantFieldGauge gauge = ConstantFieldGauge::none(1);
  Boundary bc = Boundary::neumann;
  int realizations = 1;
  std::uint64_t base_seed = 0;

  /// Realization r uses seed base_seed XOR r.
  std::uint64_t seed_of(int r) const { return base_seed ^ static_cast<std::uint64_t>(r); }
  void validate() const;
};

struct RunOptions {
  int jobs = 1;
  bool keep_values = false;
  Index dense_limit = 8192;
};

struct MCResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample stdev / sqrt(R)
  int samples = 0;
  std::vector<double> values;

};

MCResult summarize(const std::vector<double>& values, bool keep_values = false);

/// Runs `task(r)` for r in [0, count) on `jobs` worker threads. Every slot is
/// written by exactly one task, so results do not depend on the schedule.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

/// Draws realizations of an ensemble's field; shareable across threads.
class FieldSource {
 public:
  FieldSource(const FieldModel& model, const GridSpec& grid);
  FieldRealization draw(std::uint64_t seed) const;
  const FieldModel& model() const { return model_; }

 private:
  FieldModel model_;
  GridSpec grid_;
  std::shared_ptr<const GaussianSampler> gaussian_;
};

/// Maps every realization of `spec` through `observable(operator, field)`.
std::vector<std::vector<double>> map_realizations(
    const EnsembleSpec& spec, const RunOptions& options,
    const std::function<std::vector<double>(const HermitianOperator&, const FieldRealization&)>&
        observable);

MCResult expected_counting(const EnsembleSpec& spec, const EnergyInterval& interval,
                           const RunOptions& options = {});
std::vector<MCResult> expected_counting(const EnsembleSpec& spec,
                                        const std::vector<EnergyInterval>& intervals,
                                        const RunOptions& options = {});

/// Monte Carlo mean of N_Λ(E)/|Λ| at each (ascending) energy.
std::vector<MCResult> ids_curve(const EnsembleSpec& spec, const std::vector<double>& energies,
                                const RunOptions& options = {});

struct ChebyshevReport {
  double frequency = 0.0;  // P{nu >= 1}
  double frequency_stderr = 0.0;
  MCResult counting;
  double margin = 0.0;  // mean + 3 sigma_combined - frequency
  bool holds = false;
};

ChebyshevReport chebyshev_check(const EnsembleSpec& spec, const EnergyInterval& interval,
                                const RunOptions& options = {});

/// Monte Carlo mean of Tr e^{-beta H}.
MCResult expected_heat_trace(const EnsembleSpec& spec, double beta, const RunOptions& options = {});

}  // namespace wl
