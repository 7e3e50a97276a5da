#include "doctest.h"

#include <cmath>

#include "qsd/ensemble.hpp"
#include "qsd/error.hpp"
#include "qsd/oracle.hpp"
#include "qsd/scenarios.hpp"
#include "support.hpp"

using namespace qsd;

namespace {

Scenario small(const char* name, std::size_t dim, double t_final) {
  ScenarioOverrides o;
  o.dim = dim;
  o.t_final = t_final;
  return preset(name, o);
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("single trajectory mean is its pure density") {
  const Scenario s = small("fig3", 10, 1.0);
  const EnsembleResult e = run_ensemble(s.model, s.initial, s.config, 1);
  const PreparedModel pm(s.model);
  const TrajectoryResult r =
      run_trajectory(pm, s.initial, s.config, NoiseStream(s.config.seed, 1).fork(0));
  const CMatrix expect = pure_density(r.final_state).entries();
  CHECK((e.mean_density.back().entries() - expect).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::VectorXd ev = hermitian_eigenvalues(e.mean_density.back().entries());
  CHECK(ev[ev.size() - 1] == doctest::Approx(1.0));
  CHECK(ev[ev.size() - 2] == doctest::Approx(0.0));
  for (double se : e.mean_observables[0].std_error) CHECK(std::isnan(se));
  for (const auto& p : observable_series(e, fock_number(10))) CHECK_FALSE(p.std_error.has_value());
}

TEST_CASE("no dynamics leaves the initial density") {
  const std::size_t d = 5;
  const OpenSystemModel m(OperatorMatrix(CMatrix::Zero(5, 5)), {});
  const std::array<std::size_t, 2> lv{1, 3};
  const StateVector psi = StateVector::superposition(d, lv);
  const TrajectoryConfig cfg{.dt = 0.01, .t_final = 0.5, .record_stride = 10};
  const EnsembleResult e = run_ensemble(m, psi, cfg, 7);
  for (const auto& rho : e.mean_density) {
    CHECK((rho.entries() - pure_density(psi).entries()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const Scenario s = small("fig3", 10, 2.0);
  auto run = [&](unsigned w) {
    return run_ensemble(s.model, s.initial, s.config, EnsembleOptions{40, 6, w, true, true});
  };
  const EnsembleResult a = run(1), b = run(4), c = run(3);
  for (const EnsembleResult* x : {&b, &c}) {
    REQUIRE(x->mean_density.size() == a.mean_density.size());
    for (std::size_t r = 0; r < a.mean_density.size(); ++r) {
      CHECK(x->mean_density[r].entries() == a.mean_density[r].entries());
    }
    for (std::size_t o = 0; o < a.mean_observables.size(); ++o) {
      CHECK(x->mean_observables[o].mean == a.mean_observables[o].mean);
    }
    for (std::size_t i = 0; i < a.final_states.size(); ++i) {
      CHECK(x->final_states[i].amplitudes() == a.final_states[i].amplitudes());
    }
  }
}

TEST_CASE("born tally") {
  const std::vector<StateVector> one{StateVector::basis(6, 3)};
  const BornTally t = born_tally(one);
  CHECK(t.counts.size() == 1);
  CHECK(t.counts.at(3) == 1);
  CHECK(t.unconverged == 0);
  CHECK(t.frequency(3) == 1.0);
  const std::array<std::size_t, 2> lv{0, 1};
  const std::vector<StateVector> mixed{StateVector::superposition(4, lv), StateVector::basis(4, 1)};
  const BornTally u = born_tally(mixed);
  CHECK(u.unconverged == 1);
  CHECK(u.frequency(1) == 0.5);
  CHECK_THROWS_AS(born_tally(one, 0.5), Error);
  CHECK_THROWS_AS(born_tally(one, 1.5), Error);
}

TEST_CASE("measurement runs classify") {
  const Scenario s = preset("fig1");
  const EnsembleResult e =
      run_ensemble(s.model, s.initial, s.config, EnsembleOptions{100, 4, 4, false, false});
  const BornTally t = born_tally(e.final_states);
  CHECK(double(t.unconverged) / double(t.total) <= 0.05);
  for (const auto& [label, count] : t.counts) CHECK(label % 2 == 1);
}

TEST_CASE("identity observable has unit mean") {
  const Scenario s = small("fig3", 12, 2.0);
  const EnsembleResult e =
      run_ensemble(s.model, s.initial, s.config, EnsembleOptions{64, 8, 2, true, true});
  for (const auto& p : observable_series(e, OperatorMatrix::identity(12))) {
    CHECK(std::abs(p.mean - 1.0) <= 1e-8);
    REQUIRE(p.std_error.has_value());
    CHECK(*p.std_error <= 1e-8);
  }
  const auto n = observable_series(e, fock_number(12));
  CHECK(n.back().std_error.value() > 0.0);
  const EnsembleResult no_density =
      run_ensemble(s.model, s.initial, s.config, EnsembleOptions{4, 2, 1, false, false});
  CHECK(no_density.mean_density.empty());
  CHECK_THROWS_AS(observable_series(no_density, fock_number(12)), Error);
}

TEST_CASE("ensemble agrees with the oracle on small presets") {
  struct Case {
    const char* name;
    std::size_t dim;
    double t_final;
  };
  const Case cases[] = {{"fig1", 16, 2.0}, {"fig3", 12, 10.0}, {"fig5", 6, 2.0}};
  const std::size_t m = 400;
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const Scenario s = small(c.name, c.dim, c.t_final);
    const EnsembleResult e = run_ensemble(s.model, s.initial, s.config, EnsembleOptions{m, 8, 4});
    const auto master = integrate_master(s.model, pure_density(s.initial), s.config.dt, s.config.t_final,
                                         s.config.record_stride);
    REQUIRE(master.size() == e.mean_density.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < master.size(); ++r) {
      CHECK(master[r].t == doctest::Approx(e.times[r]));
      worst = std::max(worst, trace_distance(e.mean_density[r], master[r].rho));
    }
    CAPTURE(worst);
    CHECK(worst <= 1e-2 + 5.0 / std::sqrt(double(m)));
  }
}

TEST_CASE("standard errors shrink as one over root M") {
  const Scenario s = small("fig3", 10, 4.0);
  auto se = [&](std::size_t m) {
    const EnsembleResult e =
        run_ensemble(s.model, s.initial, s.config, EnsembleOptions{m, 8, 4, false, false});
    double sum = 0.0;
    const auto& q = e.mean_observables[0].std_error;
    for (std::size_t r = 1; r < q.size(); ++r) sum += q[r];
    return sum / double(q.size() - 1);
  };
  const double ratio = se(200) / se(800);
  CAPTURE(ratio);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("failures name the trajectory and the seed") {
  const std::size_t d = 10;
  const OpenSystemModel stiff(OperatorMatrix(CMatrix::Zero(10, 10)), {Complex(1e4) * fock_number(d)});
  const std::array<std::size_t, 2> lv{1, 8};
  const TrajectoryConfig cfg{.dt = 0.1, .t_final = 1.0, .seed = 4242};
  try {
    run_ensemble(stiff, StateVector::superposition(d, lv), cfg, EnsembleOptions{3, 1, 2});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NumericalBlowup);
    const std::string msg = e.what();
    CHECK(msg.find("trajectory 0") != std::string::npos);
    CHECK(msg.find("4242") != std::string::npos);
  }
  CHECK_THROWS_AS(run_ensemble(stiff, StateVector::superposition(d, lv), cfg, 0), Error);
}

}  // TEST_SUITE("ensemble")
