#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wegnerlab/checks.hpp"
#include "wegnerlab/error.hpp"

using namespace wl;
using doctest::Approx;

namespace {

AlloyModel uniform_alloy() {
  AlloyModel m;
  m.law = UniformLaw{1.0, 0.0, 1.0};
  return m;
}

SpectralAveragingInstance scalar_instance() {
  SpectralAveragingInstance s;
  s.l = Eigen::MatrixXcd::Zero(1, 1);
  s.k = Eigen::MatrixXcd::Identity(1, 1);
  s.m = Eigen::MatrixXcd::Identity(1, 1);
  s.g = [](double) { return 1.0; };
  s.g_sup = 1.0;
  s.interval = EnergyInterval::closed(0.0, 1.0);
  s.psi = Eigen::VectorXcd::Ones(1);
  return s;
}

// kappa through the Schur complement onto ran K (K = diag with a zero last entry).
double schur_kappa(const Eigen::MatrixXcd& m, Index range) {
  const Index rest = m.rows() - range;
  const Eigen::MatrixXcd s = m.topLeftCorner(range, range) -
                             m.topRightCorner(range, rest) * m.bottomRightCorner(rest, rest).inverse() *
                                 m.bottomLeftCorner(rest, range);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(0.5 * (s + s.adjoint())).eigenvalues()[0];
}

}  // namespace

TEST_CASE("diamagnetic semigroup") {
  const GridSpec g = GridSpec::centered(2, 5, 1.0);
  const auto field = ConstantFieldGauge::planar(2, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(25);
  const CheckReport t0 = check_diamagnetic_semigroup(g, field, zero, 0.0, 5, 1);
  CHECK(t0.pass);
  CHECK(std::abs(t0.worst_violation) <= 1e-14);

  const CheckReport b0 = check_diamagnetic_semigroup(g, ConstantFieldGauge::none(2), zero, 0.8, 5, 1);
  CHECK(b0.details["nonnegative_gap"].get<double>() <= 1e-12);

  const FieldRealization v = sample_alloy(uniform_alloy(), GridSpec::unit_cells(2, 5, 1), 7);
  const CheckReport r = check_diamagnetic_semigroup(v.grid, field, v.values, 1.0, 50, 7);
  CHECK(r.pass);
  CHECK(r.worst_violation <= 1e-10);
  CHECK(r.worst_violation < 0.0);
}

TEST_CASE("diamagnetic partition") {
  const GridSpec g = GridSpec::cube(2, 6, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(36);
  const Eigen::VectorXd v = wltest::random_real(36, 3);
  const CheckReport eq = check_diamagnetic_partition(g, ConstantFieldGauge::none(2), v, 1.0);
  CHECK(eq.worst_violation == 0.0);

  const CheckReport b2 = check_diamagnetic_partition(g, ConstantFieldGauge::planar(2, 2.0), zero, 1.0);
  CHECK(b2.pass);
  CHECK(b2.details["N"]["slack"].get<double>() > 0.0);
  CHECK(b2.details["D"]["slack"].get<double>() > 0.0);

  double previous = INFINITY;
  for (double b : {1.0, 0.1, 0.01}) {
    const CheckReport r = check_diamagnetic_partition(g, ConstantFieldGauge::planar(2, b), zero, 1.0);
    const double slack = r.details["N"]["slack"].get<double>();
    CHECK(slack >= 0.0);
    CHECK(slack < previous);
    previous = slack;
  }
}

TEST_CASE("resolvent powers") {
  const GridSpec g = GridSpec::centered(2, 5, 1.0);
  const Eigen::VectorXd v = wltest::random_real(25, 5);
  const CheckReport eq = check_resolvent_power(g, ConstantFieldGauge::none(2), v, -4.0, 1.0, 10, 3);
  CHECK(eq.details["nonnegative_gap"].get<double>() <= 1e-12);

  const GridSpec one = GridSpec::cube(1, 1, 1.0);
  // a single node carries no bonds, so h = V = 2 in both operators
  const CheckReport scalar = check_resolvent_power(one, ConstantFieldGauge::none(1),
                                                   Eigen::VectorXd::Constant(1, 2.0), 0.0, 1.0, 3, 1);
  CHECK(std::abs(scalar.worst_violation) <= 1e-15);
  CHECK(resolvent_power_apply(assemble(one, Boundary::neumann, ConstantFieldGauge::none(1),
                                       Eigen::VectorXd::Constant(1, 2.0)),
                              0.0, 1.0, Eigen::VectorXcd::Ones(1))[0]
            .real() == Approx(0.5));

  const auto field = ConstantFieldGauge::planar(2, 1.0);
  double floor = INFINITY;
  for (Boundary bc : {Boundary::dirichlet, Boundary::neumann})
    floor = std::min(floor, eigenvalues(assemble(g, bc, ConstantFieldGauge::none(2), v)).values[0]);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const CheckReport r = check_resolvent_power(g, field, v, {floor - 1.0, 0.5}, alpha, 50, 11);
    CHECK(r.pass);
    CHECK(r.worst_violation <= 1e-9);
  }
  CHECK_THROWS_AS(check_resolvent_power(g, field, v, floor + 0.1, 1.0, 1, 1), Error);
}

TEST_CASE("bracketing") {
  const GridSpec line = GridSpec::cube(1, 4, 1.0);
  const CheckReport free = check_bracketing(line, 0, 2, ConstantFieldGauge::none(1), Eigen::VectorXd::Zero(4), 1e-12);
  CHECK(free.pass);
  const auto d = eigenvalues(assemble(line, Boundary::dirichlet, ConstantFieldGauge::none(1))).values;
  const auto n = eigenvalues(assemble(line, Boundary::neumann, ConstantFieldGauge::none(1))).values;
  CHECK(std::abs(n[0]) < 1e-14);
  CHECK(n[0] <= d[0]);

  const GridSpec sq = GridSpec::unit_cells(2, 6, 1);
  const FieldRealization v = sample_gaussian(CovarianceModel::gaussian(2, 1.0, 1.0), sq, 3);
  const CheckReport r = check_bracketing(sq, 0, 3, ConstantFieldGauge::planar(2, 1.0), v.values, 1e-10);
  CHECK(r.pass);
  CHECK(r.details["levels"].get<int>() == 36);
}

TEST_CASE("decoupling") {
  const auto none = ConstantFieldGauge::none(1);
  const auto a = assemble(GridSpec::cube(1, 1, 1.0), Boundary::neumann, none, Eigen::VectorXd::Constant(1, 0.3));
  const auto b = assemble(GridSpec::cube(1, 1, 1.0, Eigen::VectorXd::Constant(1, 2.0)), Boundary::neumann, none,
                          Eigen::VectorXd::Constant(1, -4.0));
  CHECK(check_decoupling(a, b).worst_violation == 0.0);
  const auto fa = assemble(GridSpec::cube(2, 3, 1.0), Boundary::neumann, ConstantFieldGauge::none(2));
  const auto fb = assemble(GridSpec::cube(2, 3, 1.0, Eigen::Vector2d(5, 0)), Boundary::neumann,
                           ConstantFieldGauge::none(2));
  CHECK(check_decoupling(fa, fb).pass);
  CHECK(count_in_interval(eigenvalues(decouple(fa, fb)), EnergyInterval::closed(-1e-12, 1e-12)).count == 2);
  const auto field = ConstantFieldGauge::planar(2, 0.7);
  const auto ra = assemble(GridSpec::cube(2, 2, 1.0), Boundary::dirichlet, field, wltest::random_real(4, 1));
  const auto rb = assemble(GridSpec::cube(2, 2, 1.0, Eigen::Vector2d(0, 3)), Boundary::dirichlet, field,
                           wltest::random_real(4, 2));
  CHECK(check_decoupling(ra, rb).pass);
  CHECK_THROWS_AS(check_decoupling(ra, ra), Error);
}

TEST_CASE("spectral averaging") {
  const SpectralAveragingInstance s = scalar_instance();
  const SpectralAveragingValue v = spectral_averaging_integral(s);
  CHECK(std::abs(v.integral - 1.0) <= 1e-8);
  CHECK(v.bound == Approx(1.0));
  CHECK(v.kappa == Approx(1.0));
  CHECK(check_spectral_averaging(s).pass);

  SpectralAveragingInstance scaled = s;
  scaled.g = [](double) { return 2.5; };
  scaled.g_sup = 2.5;
  const SpectralAveragingValue w = spectral_averaging_integral(scaled);
  CHECK(w.integral == Approx(2.5 * v.integral));
  CHECK(w.bound == Approx(2.5 * v.bound));

  SpectralAveragingInstance bad = s;
  bad.m = Eigen::MatrixXcd::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(spectral_averaging_integral(bad), Error);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  const int size = 6;
  for (int i = 0; i < 20; ++i) {
    SpectralAveragingInstance inst;
    const Eigen::MatrixXcd h = wltest::random_hermitian(size, 100 + i);
    inst.l = h / std::sqrt(2.0 * size);
    inst.k = Eigen::MatrixXcd::Identity(size, size);
    inst.k(size - 1, size - 1) = 0.0;
    inst.m = inst.k * inst.k + 0.1 * Eigen::MatrixXcd::Identity(size, size);
    const double center = normal(rng);
    inst.g = [=](double x) { return std::exp(-0.5 * (x - center) * (x - center)); };
    inst.g_sup = 1.0;
    inst.interval = EnergyInterval::closed(-1.0, 1.0);
    inst.psi = wltest::random_vector(size, 200 + i);
    const CheckReport r = check_spectral_averaging(inst);
    CHECK(r.pass);
    CHECK(r.details["margin"].get<double>() > 0.0);
    CHECK(spectral_averaging_kappa(inst.k, inst.m) == Approx(schur_kappa(inst.m, size - 1)));
    CHECK(spectral_averaging_kappa(inst.k, inst.m) == Approx(1.1));
  }

  for (int i = 0; i < 10; ++i) {
    const Eigen::MatrixXcd a = wltest::random_hermitian(5, 300 + i);
    const Eigen::MatrixXcd m = a * a + 0.2 * Eigen::MatrixXcd::Identity(5, 5);
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(5, 5);
    k(4, 4) = 0.0;
    CHECK(spectral_averaging_kappa(k, m) == Approx(schur_kappa(m, 4)).epsilon(1e-9));
    Eigen::MatrixXcd singular = m;
    singular.row(4).setZero();
    singular.col(4).setZero();
    CHECK(spectral_averaging_kappa(k, singular) == Approx(schur_kappa(m.topLeftCorner(4, 4), 4)).epsilon(1e-9));
  }
  Eigen::MatrixXcd indefinite = Eigen::MatrixXcd::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK(spectral_averaging_kappa(Eigen::MatrixXcd::Identity(2, 2), indefinite) <= 0.0);
}

TEST_CASE("averaged Golden-Thompson") {
  EnsembleSpec single;
  single.field = uniform_alloy();
  single.grid = GridSpec::unit_cells(1, 1, 1);
  single.realizations = 200;
  single.base_seed = 4;
  const CheckReport s = check_golden_thompson_avg(single, 1.0);
  CHECK(s.pass);
  CHECK(s.details["lhs"].get<double>() == Approx(s.details["rhs"].get<double>()).epsilon(1e-12));

  EnsembleSpec constant = single;
  constant.field = ConstantField{0.7};
  constant.grid = GridSpec::cube(2, 3, 1.0);
  constant.gauge = ConstantFieldGauge::planar(2, 1.0);
  const CheckReport c = check_golden_thompson_avg(constant, 1.3);
  CHECK(c.pass);
  CHECK(c.details["lhs"].get<double>() == Approx(c.details["rhs"].get<double>()).epsilon(1e-12));

  EnsembleSpec gauss;
  gauss.field = CovarianceModel::gaussian(2, 0.25, 1.0);
  gauss.grid = GridSpec::centered(2, 5, 1.0);
  gauss.gauge = ConstantFieldGauge::planar(2, 1.0);
  gauss.realizations = 500;
  gauss.base_seed = 9;
  CHECK(check_golden_thompson_avg(gauss, 1.0).pass);
}

TEST_CASE("free Neumann trace bound") {
  const CheckReport r = check_neumann_partition_bound(1.0, 2.0 * std::numbers::pi, 1);
  CHECK(r.pass);
  CHECK(std::round(r.details["trace"].get<double>() * 1e4) / 1e4 == 1.0);
  CHECK(std::round(r.details["bound"].get<double>() * 1e4) / 1e4 == Approx(1.1592));
  CHECK(neumann_free_trace(1.0, 2.0 * std::numbers::pi, 1) == Approx(1.0 + std::exp(-std::pow(std::numbers::pi, 3))));

  const CheckReport cold = check_neumann_partition_bound(1.0, 1e6, 2);
  CHECK(cold.details["trace"].get<double>() == Approx(1.0));
  CHECK(cold.details["bound"].get<double>() == Approx(1.0).epsilon(1e-3));

  for (int d : {1, 2, 3})
    for (double beta : {0.1, 1.0, 10.0})
      for (double side : {1.0, 2.0}) CHECK(check_neumann_partition_bound(side, beta, d).pass);

  // the series against a brute-force sum
  double direct = 0.0;
  for (int n = 0; n < 2000; ++n) direct += std::exp(-0.01 * std::pow(std::numbers::pi * n, 2) / 8.0);
  CHECK(neumann_free_trace(2.0, 0.01, 1) == Approx(direct).epsilon(1e-13));
}

TEST_CASE("Wegner estimate against Monte Carlo") {
  EnsembleSpec spec;
  spec.field = uniform_alloy();
  spec.grid = GridSpec::unit_cells(2, 6, 1);
  spec.gauge = ConstantFieldGauge::planar(2, 1.0);
  spec.realizations = 300;
  spec.base_seed = 12;
  const auto ladder = wegner_ladder();
  REQUIRE(ladder.size() == 10);
  CHECK(ladder.front().lower == 0.0);
  CHECK(ladder.back().upper == Approx(3.0));

  for (Boundary bc : {Boundary::dirichlet, Boundary::neumann}) {
    spec.bc = bc;
    const CheckReport r = check_wegner_mc(spec, ladder);
    CHECK(r.pass);
    double total = 0.0;
    for (const auto& row : r.details["intervals"]) {
      CHECK(row["mean"].get<double>() <= row["bound"].get<double>());
      total += row["mean"].get<double>();
    }
    const MCResult whole = expected_counting(spec, EnergyInterval::closed(0.0, 3.0));
    CHECK(total >= whole.mean - 1e-12);

    const CheckReport below = check_wegner_mc(spec, {EnergyInterval::closed(-5.0, -4.0)});
    CHECK(below.details["intervals"][0]["mean"].get<double>() == 0.0);
    CHECK(below.details["intervals"][0]["bound"].get<double>() >= 0.0);
    CHECK(below.worst_violation <= 0.0);
    CHECK(below.pass);
  }

  const CheckReport half = check_wegner_mc(spec, {EnergyInterval::closed(1.0, 1.5)});
  const CheckReport full = check_wegner_mc(spec, {EnergyInterval::closed(0.5, 1.5)});
  const double ratio = full.details["intervals"][0]["bound"].get<double>() / half.details["intervals"][0]["bound"].get<double>();
  CHECK(ratio == Approx(2.0));

  EnsembleSpec gauss = spec;
  gauss.field = CovarianceModel::gaussian(2, 1.0, 1.0);
  CHECK_THROWS_AS(check_wegner_mc(gauss, ladder), Error);
}

TEST_CASE("suites") {
  const auto names = suite_names();
  CHECK(names.size() == 9);
  try {
    run_suite("nope", {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  SuiteOptions a;
  a.quick = true;
  SuiteOptions b = a;
  b.jobs = 4;
  for (const std::string name : {"decoupling", "bracketing", "neumann-trace"}) {
    const auto ra = run_suite(name, a);
    const auto rb = run_suite(name, b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].jsonl() == rb[i].jsonl());
    CHECK(ra.back().pass);
  }
  SuiteOptions strict = a;
  strict.tolerance = 0.0;
  strict.instances = 30;
  CHECK(!run_suite("decoupling", strict).back().pass);
}
