#include "doctest.h"

#include <cmath>

#include "qsd/error.hpp"
#include "qsd/scenarios.hpp"
#include "support.hpp"

using namespace qsd;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("catalog names build") {
  for (const auto& [name, summary] : scenario_catalog()) {
    CAPTURE(name);
    ScenarioOverrides o;
    if (name == "kaos") o.periods = 2;
    const Scenario s = preset(name, o);
    CHECK(s.name == name);
    CHECK_FALSE(s.summary.empty());
    CHECK(s.initial.dim() == s.model.dim());
    CHECK(s.config.dt > 0.0);
  }
  try {
    preset("fig9");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownScenario);
  }
}

TEST_CASE("fig5 operators") {
  const Scenario s = preset("fig5");
  REQUIRE(s.model.lindblads().size() == 2);
  CHECK(max_abs(s.model.lindblads()[0].entries() - 6.0 * fock_number(100).entries()) < 1e-14);
  CHECK(max_abs(s.model.lindblads()[1].entries() - 0.1 * fock_annihilation(100).entries()) < 1e-14);
  CHECK(max_abs(s.model.h_static().entries()) == 0.0);
  CHECK(s.initial[5] == Complex(1.0));
}

TEST_CASE("kaos anharmonic coefficient") {
  ScenarioOverrides o;
  o.beta = 1.0;
  o.periods = 1;
  o.dim = 20;
  const Scenario s = preset("kaos", o);
  const CMatrix h = s.model.h_static().entries();
  for (int n = 0; n < 20; ++n) CHECK(h(n, n).real() == doctest::Approx(0.002 * n * (n - 1)));
  const ref::Mat a = ref::annihilation(20);
  CHECK((ref::Mat(h) - 0.002 * a.adjoint() * a.adjoint() * a * a).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(s.model.drive().has_value());
  CHECK(s.model.drive()->schedule.f0 == 2.0);
  CHECK(s.model.drive()->schedule.tau1 == 5.0);
  CHECK(s.model.lindblads()[0].entries()(0, 1).real() == doctest::Approx(std::sqrt(0.1)));
  REQUIRE(s.kaos.has_value());
  const double steps = s.kaos->period() / s.config.dt;
  CHECK(std::abs(steps - std::round(steps)) < 1e-6);
}

TEST_CASE("fig2 starts in |8> with the drive term") {
  const Scenario s = preset("fig2");
  CHECK(s.initial[8] == Complex(1.0));
  CHECK(projector_fidelity(s.initial, 8) == 1.0);
  const ref::Mat a = ref::annihilation(100);
  CHECK((ref::Mat(s.model.h_static().entries()) - ref::cd(0, 2) * (a.adjoint() - a)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ref::Mat(s.model.lindblads()[0].entries()) - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fig1 equal superposition of odd levels") {
  const Scenario s = preset("fig1");
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(projector_fidelity(s.initial, k) == doctest::Approx(k % 2 == 1 && k <= 9 ? 0.2 : 0.0));
  }
}

TEST_CASE("half-line projectors resolve the identity") {
  for (double w : {0.0, 0.5}) {
    const auto [pp, pm] = half_line_projectors(64, w);
    const CMatrix sum = pp.entries() + pm.entries();
    CHECK(max_abs(sum - CMatrix::Identity(64, 64)) <= 1e-12);
    CHECK(pp.hermitian_hint());
  }
}

TEST_CASE("double-well operators") {
  const std::size_t d = 96;
  const double w = 8.0;
  const auto [lp, lm] = double_well_operators(d, w, 0.1, 0.5);
  const CMatrix par = parity(d).entries();
  const CMatrix conj = par * lp.entries() * par;
  // L_- is the parity image of L_+ up to the sign of the channel.
  CHECK(max_abs(lm.entries() + conj) <= 1e-10);

  const StateVector right = StateVector::coherent(d, w / std::sqrt(2.0));
  REQUIRE(top_level_leak(right) < 1e-6);
  const Complex ellp = expectation(lp, right);
  const CVector fluct = apply(lp, right) - ellp * right.amplitudes();
  CHECK(fluct.norm() <= 1e-3);
  CHECK(apply(lm, right).norm() <= 1e-3);

  CHECK_THROWS_AS(double_well_operators(20, w, 0.1), Error);
}

TEST_CASE("sharp projectors follow the position eigenbasis") {
  const std::size_t d = 40;
  const auto [pp, pm] = half_line_projectors(d, 0.0);
  CHECK(max_abs(pp.entries() * pp.entries() - pp.entries()) <= 1e-10);
  const PositionEigenbasis b = position_eigenbasis(d);
  for (std::size_t k = 0; k < d; ++k) {
    const CVector v = b.transform.col(Eigen::Index(k));
    const double inside = (v.adjoint() * pp.entries() * v)(0).real();
    CHECK(inside == doctest::Approx(b.eigenvalues[k] >= 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("default dt respects both limits") {
  ScenarioOverrides o;
  o.dim = 30;
  for (const char* name : {"fig2", "fig3", "fig5"}) {
    const Scenario s = preset(name, o);
    const double dt = default_dt(s.model);
    double scale = ref::Mat(s.model.h_static().entries()).jacobiSvd().singularValues()(0);
    for (const auto& l : s.model.lindblads()) {
      const ref::Mat ll = ref::Mat(l.entries()).adjoint() * ref::Mat(l.entries());
      scale = std::max(scale, ll.jacobiSvd().singularValues()(0));
    }
    CAPTURE(name);
    CHECK(dt > 0.0);
    CHECK(dt * scale <= 0.05 * (1 + 1e-9));
    CHECK(dt <= euler_stable_dt(s.model) * (1 + 1e-12));
  }
  const OpenSystemModel damp(fock_number(10), {fock_annihilation(10)});
  const double bound = euler_stable_dt(damp);
  // K = -i n - n/2 has eigenvalues -(1/2 + i) m; |1 + lambda dt| <= 1 needs
  // dt <= 2 * (m/2) / (m^2 (1/4 + 1)) = 0.8 / m for every m >= 1.
  CHECK(bound == doctest::Approx(0.8 / 9.0).epsilon(1e-6));
}

TEST_CASE("heisenberg floor across presets") {
  struct Case {
    const char* name;
    std::size_t dim;
    double t_final;
  };
  for (const Case& c : {Case{"fig1", 16, 2.0}, Case{"fig2", 100, 10.0}, Case{"fig3", 40, 20.0},
                        Case{"fig4", 96, 2.0}, Case{"fig5", 40, 5.0}, Case{"kaos", 64, 0.99}}) {
    CAPTURE(c.name);
    ScenarioOverrides o;
    o.dim = c.dim;
    o.t_final = c.t_final;
    Scenario s = preset(c.name, o);
    s.config.observables = {{"q", position(c.dim)}, {"p", momentum(c.dim)}};
    s.config.record_stride = std::max<std::size_t>(1, std::size_t(0.05 / s.config.dt));
    const TrajectoryResult r = run_trajectory(s.model, s.initial, s.config);
    for (const auto& rec : r.records) CHECK(rec.variances[0] * rec.variances[1] >= 0.25 - 1e-3);
  }
}

}  // TEST_SUITE("scenarios")
