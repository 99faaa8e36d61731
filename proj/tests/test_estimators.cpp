#include <doctest.h>

#include <cmath>

#include "wegnerlab/error.hpp"
#include "wegnerlab/estimators.hpp"

using namespace wl;
using doctest::Approx;

namespace {

AlloyModel uniform_alloy() {
  AlloyModel m;
  m.single_site = SingleSiteProfile::indicator(1.0);
  m.law = UniformLaw{1.0, 0.0, 1.0};
  return m;
}

EnsembleSpec alloy_spec(std::uint64_t seed, int realizations) {
  EnsembleSpec s;
  s.field = uniform_alloy();
  s.grid = GridSpec::unit_cells(2, 6, 1);
  s.gauge = ConstantFieldGauge::none(2);
  s.bc = Boundary::neumann;
  s.realizations = realizations;
  s.base_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("summary statistics") {
  const MCResult r = summarize({1.0, 2.0, 3.0, 4.0}, true);
  CHECK(r.mean == 2.5);
  CHECK(r.std_error == Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(r.samples == 4);
  CHECK(r.values.size() == 4);
  CHECK(summarize({7.0}).std_error == 0.0);

  std::vector<int> slots(50, -1);
  parallel_for(50, 4, [&](int i) { slots[static_cast<std::size_t>(i)] = i * i; });
  for (int i = 0; i < 50; ++i) CHECK(slots[static_cast<std::size_t>(i)] == i * i);
  try {
    parallel_for(20, 3, [](int i) {
      if (i == 7 || i == 13) throw Error(ErrorKind::numerical, "boom " + std::to_string(i));
    });
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "boom 7");
  }
}

TEST_CASE("ensemble validation") {
  EnsembleSpec s = alloy_spec(1, 0);
  CHECK_THROWS_AS(s.validate(), Error);
  s.realizations = 3;
  CHECK_NOTHROW(s.validate());
  CHECK(s.seed_of(2) == (1ULL ^ 2ULL));
  s.gauge = ConstantFieldGauge::none(3);
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("deterministic ensembles") {
  EnsembleSpec s;
  s.grid = GridSpec::cube(1, 4, 1.0);
  s.bc = Boundary::neumann;
  s.realizations = 20;
  const MCResult zero = expected_counting(s, EnergyInterval::closed(-0.1, 0.1));
  CHECK(zero.mean == 1.0);
  CHECK(zero.std_error == 0.0);
  CHECK(expected_counting(s, EnergyInterval::closed(5.0, 6.0)).mean == 0.0);

  EnsembleSpec a = alloy_spec(3, 50);
  CHECK(expected_counting(a, EnergyInterval::closed(-10.0, -0.01)).mean == 0.0);
  CHECK(expected_counting(a, EnergyInterval::closed(5.01, 9.0)).mean == 0.0);

  const ChebyshevReport none = chebyshev_check(s, EnergyInterval::closed(5.0, 6.0));
  CHECK(none.frequency == 0.0);
  CHECK(none.counting.mean == 0.0);
  CHECK(none.holds);
  const ChebyshevReport three = chebyshev_check(s, EnergyInterval::closed(-0.1, 1.5));
  CHECK(three.frequency == 1.0);
  CHECK(three.counting.mean == 3.0);
  CHECK(three.holds);

  s.field = ConstantField{0.5};
  const MCResult shifted = ids_curve(s, {0.49, 0.51}).front();
  CHECK(shifted.mean == 0.0);
  CHECK(ids_curve(s, {0.49, 0.51})[1].mean == 0.25);
}

TEST_CASE("alloy ensemble self-consistency") {
  const EnergyInterval unit = EnergyInterval::closed(0.0, 1.0);
  const MCResult x = expected_counting(alloy_spec(11, 2000), unit);
  const MCResult y = expected_counting(alloy_spec(977, 2000), unit);
  CHECK(x.std_error > 0.0);
  CHECK(std::abs(x.mean - y.mean) <= 3.0 * std::hypot(x.std_error, y.std_error));

  const ChebyshevReport c = chebyshev_check(alloy_spec(5, 2000), EnergyInterval::closed(0.0, 0.5));
  CHECK(c.holds);
  CHECK(c.margin >= 0.0);
  CHECK(c.frequency <= c.counting.mean + 1e-12);
}

TEST_CASE("determinism under parallelism") {
  RunOptions one;
  one.keep_values = true;
  RunOptions four = one;
  four.jobs = 4;
  const EnsembleSpec s = alloy_spec(21, 64);
  const auto intervals = std::vector{EnergyInterval::closed(0.0, 0.5), EnergyInterval::closed(0.5, 1.5)};
  const auto a = expected_counting(s, intervals, one);
  const auto b = expected_counting(s, intervals, four);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean == b[i].mean);
    CHECK(a[i].std_error == b[i].std_error);
    CHECK(a[i].values == b[i].values);
  }
  EnsembleSpec g = s;
  g.field = CovarianceModel::gaussian(2, 0.25, 1.0);
  g.grid = GridSpec::centered(2, 5, 1.0);
  const MCResult h1 = expected_heat_trace(g, 1.0, one);
  const MCResult h4 = expected_heat_trace(g, 1.0, four);
  CHECK(h1.mean == h4.mean);
  CHECK(h1.values == h4.values);
}

TEST_CASE("realization-wise orderings") {
  const std::vector<double> energies{0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    EnsembleSpec n = alloy_spec(seed, 1);
    n.gauge = ConstantFieldGauge::planar(2, seed % 2 ? 1.0 : 0.0);
    EnsembleSpec d = n;
    d.bc = Boundary::dirichlet;
    const auto cn = ids_curve(n, energies);
    const auto cd = ids_curve(d, energies);
    for (std::size_t i = 0; i < energies.size(); ++i) {
      CHECK(cd[i].mean <= cn[i].mean);
      if (i > 0) CHECK(cn[i - 1].mean <= cn[i].mean);
    }
  }

  const EnsembleSpec s = alloy_spec(8, 40);
  const Eigen::VectorXd bump = Eigen::VectorXd::LinSpaced(36, 0.0, 0.7);
  const auto rows = map_realizations(s, {}, [&](const HermitianOperator& op, const FieldRealization& f) {
    std::vector<double> out;
    const Spectrum base = eigenvalues(op);
    const Spectrum raised = eigenvalues(with_potential(op, bump));
    const Spectrum free = eigenvalues(with_potential(op, -f.values));
    for (double e : {0.3, 0.8, 1.6, 2.5}) {
      out.push_back(finite_volume_ids(base, e, 36.0) - finite_volume_ids(raised, e, 36.0));
      out.push_back(finite_volume_ids(free, e, 36.0) - finite_volume_ids(base, e, 36.0));
    }
    return out;
  });
  for (const auto& r : rows)
    for (double v : r) CHECK(v >= 0.0);
}

TEST_CASE("counting is additive under decoupling") {
  const AlloyModel m = uniform_alloy();
  const GridSpec g = GridSpec::unit_cells(2, 6, 1);
  const auto [left, right] = g.bisect(0, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FieldRealization f = sample_alloy(m, g, seed);
    const auto gauge = ConstantFieldGauge::planar(2, 1.0);
    const auto a = assemble(left, Boundary::dirichlet, gauge, restrict_to(g, f.values, left));
    const auto b = assemble(right, Boundary::dirichlet, gauge, restrict_to(g, f.values, right));
    for (const auto& interval : {EnergyInterval::closed(0.0, 1.0), EnergyInterval::closed(1.0, 3.0)}) {
      const Index whole = count_in_interval(eigenvalues(decouple(a, b)), interval).count;
      CHECK(whole == count_in_interval(eigenvalues(a), interval).count +
                         count_in_interval(eigenvalues(b), interval).count);
    }
  }
}

TEST_CASE("errors carry the failing seed") {
  EnsembleSpec s;
  s.field = CovarianceModel::tabulated(1, {0.0, 1.0, 2.0}, {1.0, -1.0, 0.0});
  s.grid = GridSpec::cube(1, 6, 1.0);
  s.realizations = 2;
  s.base_seed = 99;
  try {
    expected_counting(s, EnergyInterval::closed(0, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
  }

  EnsembleSpec big = alloy_spec(1, 1);
  RunOptions tight;
  tight.dense_limit = 10;
  try {
    expected_counting(big, EnergyInterval::closed(0, 1), tight);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource_limit);
  }

  EnsembleSpec nan = alloy_spec(1, 3);
  nan.field = ConstantField{INFINITY};
  try {
    expected_counting(nan, EnergyInterval::closed(0, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}
