#include "validate.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qsd/commands.hpp"
#include "qsd/config.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/expr.hpp"
#include "qsd/integrator.hpp"
#include "qsd/kaos.hpp"
#include "qsd/kernels.hpp"
#include "qsd/noise.hpp"
#include "qsd/oracle.hpp"
#include "qsd/output.hpp"
#include "qsd/scenarios.hpp"

namespace qsd::tools {

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Outcome philox_vectors() {
  using W = std::array<std::uint32_t, 4>;
  using K = std::array<std::uint32_t, 2>;
  struct Case { W ctr; K key; W expect; };
  const Case cases[] = {
      {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
      {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff},
       {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
      {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0},
       {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
  };
  for (const auto& c : cases) {
    if (philox4x32(c.ctr, c.key) != c.expect) return {false, "known-answer mismatch"};
  }
  return {true, "3 known-answer vectors"};
}

Outcome kernel_equivalence() {
  const kernels::Table* fast = kernels::avx2();
  if (!fast) return {true, "no AVX2 variant on this CPU"};
  const kernels::Table& ref = kernels::scalar();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (std::size_t n : {2, 3, 5, 8, 17, 64, 101}) {
    std::vector<Complex> a(n * n), x(n), y1(n), y2(n);
    for (auto& v : a) v = {g(rng), g(rng)};
    for (auto& v : x) v = {g(rng), g(rng)};
    for (std::size_t lo : {std::size_t(0), std::size_t(1), n - 1}) {
      const std::size_t up = std::min<std::size_t>(2, n - 1);
      ref.band_matvec(a.data(), n, lo, up, x.data(), y1.data());
      fast->band_matvec(a.data(), n, lo, up, x.data(), y2.data());
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y1[i] - y2[i]) / (1 + std::abs(y1[i])));
    }
    worst = std::max(worst, std::abs(ref.cdot(x.data(), a.data(), n) - fast->cdot(x.data(), a.data(), n)) /
                                (1 + std::abs(ref.cdot(x.data(), a.data(), n))));
    worst = std::max(worst, std::abs(ref.norm2(x.data(), n) - fast->norm2(x.data(), n)) / (1 + ref.norm2(x.data(), n)));
    y1 = x;
    y2 = x;
    ref.axpy({0.3, -1.2}, a.data(), y1.data(), n);
    fast->axpy({0.3, -1.2}, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y1[i] - y2[i]));
  }
  return {worst <= 1e-13, "max relative difference " + fmt(worst)};
}

Outcome noise_moments() {
  const double dt = 0.01;
  const std::size_t n = 1'000'000;
  NoiseStream s(12345, 2);
  std::vector<Complex> d(2);
  double m_re = 0, m_im = 0, sq_re = 0, sq_im = 0, abs2 = 0, abs4 = 0, cross = 0;
  double v_re = 0, v_im = 0;
  for (std::size_t k = 0; k < n; ++k) {
    s.sample_increments(dt, d);
    m_re += d[0].real();
    m_im += d[0].imag();
    const Complex sq = d[0] * d[0];
    sq_re += sq.real();
    sq_im += sq.imag();
    abs2 += std::norm(d[0]);
    abs4 += std::norm(d[0]) * std::norm(d[0]);
    cross += (std::conj(d[0]) * d[1]).real();
    v_re += d[0].real() * d[0].real();
    v_im += d[0].imag() * d[0].imag();
  }
  const double N = double(n);
  const double mean_bound = 4 * std::sqrt(dt / (2 * N));
  const double sq_se = dt / std::sqrt(N);              // sd of Re(dxi^2) is dt/sqrt(2)
  const double abs_se = std::sqrt(abs4 / N - (abs2 / N) * (abs2 / N)) / std::sqrt(N);
  const bool ok = std::abs(m_re / N) <= mean_bound && std::abs(m_im / N) <= mean_bound &&
                  std::abs(sq_re / N) <= 4 * sq_se && std::abs(sq_im / N) <= 4 * sq_se &&
                  std::abs(abs2 / N - dt) <= 4 * abs_se &&
                  std::abs(cross / N) <= 4 * sq_se &&
                  std::abs(v_re / N - dt / 2) <= 0.01 * dt / 2 &&
                  std::abs(v_im / N - dt / 2) <= 0.01 * dt / 2;
  return {ok, "E|dxi|^2 = " + fmt(abs2 / N) + " at dt = 0.01"};
}

Outcome operator_algebra() {
  const std::size_t d = 12;
  const CMatrix a = fock_annihilation(d).entries();
  const CMatrix ad = fock_creation(d).entries();
  CMatrix c = a * ad - ad * a;
  c(Eigen::Index(d - 1), Eigen::Index(d - 1)) += double(d);  // truncation corner
  const double comm = (c - CMatrix::Identity(Eigen::Index(d), Eigen::Index(d))).cwiseAbs().maxCoeff();
  const double num = (ad * a - fock_number(d).entries()).cwiseAbs().maxCoeff();
  const double q = ((a + ad) / std::sqrt(2.0) - position(d).entries()).cwiseAbs().maxCoeff();
  const OperatorMatrix e = OperatorExpr::parse("2i*(adag - a)").eval(d);
  const double ex = (e.entries() - Complex(0, 2) * (ad - a)).cwiseAbs().maxCoeff();
  const double worst = std::max({comm, num, q, ex});
  return {worst <= 1e-12, "max deviation " + fmt(worst)};
}

Outcome eigenstate_fixed_point() {
  const std::size_t d = 8;
  OpenSystemModel m(OperatorMatrix(CMatrix::Zero(8, 8)), {fock_number(d)});
  const StateVector psi = StateVector::basis(d, 3);
  const double dnorm = qsd::drift(psi, m, 0.0).norm();
  double diff = 0.0;
  for (const auto& v : diffusion_vectors(psi, m)) diff = std::max(diff, v.norm());
  return {dnorm <= 1e-14 && diff <= 1e-14, "drift " + fmt(dnorm) + ", diffusion " + fmt(diff)};
}

Outcome master_invariants() {
  ScenarioOverrides o;
  o.dim = 6;
  const Scenario s = preset("fig5", o);
  const auto recs = integrate_master(s.model, pure_density(s.initial), 1e-3, 1.0, 100);
  double worst_trace = 0.0, min_eig = 1.0;
  for (const auto& r : recs) {
    const DensityReport rep = check_density(r.rho);
    worst_trace = std::max(worst_trace, rep.trace_error);
    min_eig = std::min(min_eig, rep.min_eigenvalue);
  }
  return {worst_trace <= 1e-8 && min_eig >= -1e-8,
          "trace error " + fmt(worst_trace) + ", min eigenvalue " + fmt(min_eig)};
}

Outcome small_unraveling() {
  ScenarioOverrides o;
  o.dim = 6;
  o.t_final = 0.5;
  o.record_stride = 100;
  const Scenario s = preset("fig5", o);
  const EnsembleResult e = run_ensemble(s.model, s.initial, s.config, 400);
  const auto recs = integrate_master(s.model, pure_density(s.initial), s.config.dt,
                                     s.config.t_final, s.config.record_stride);
  double worst = 0.0;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    worst = std::max(worst, trace_distance(e.mean_density[r], recs[r].rho));
  }
  return {worst <= 0.1, "M = 400, max trace distance " + fmt(worst)};
}

Outcome worker_independence() {
  ScenarioOverrides o;
  o.dim = 10;
  o.t_final = 2.0;
  const Scenario s = preset("fig3", o);
  const EnsembleResult one = run_ensemble(s.model, s.initial, s.config, EnsembleOptions{12, 4, 1});
  const EnsembleResult three = run_ensemble(s.model, s.initial, s.config, EnsembleOptions{12, 4, 3});
  bool same = true;
  for (std::size_t r = 0; r < one.times.size(); ++r) {
    same = same && one.mean_density[r].entries() == three.mean_density[r].entries();
  }
  return {same, "1 vs 3 workers"};
}

Outcome heisenberg_bound() {
  double worst = 1.0;
  for (const char* name : {"fig2", "fig3"}) {
    ScenarioOverrides o;
    o.dim = 40;
    o.t_final = 4.0;
    const Scenario s = preset(name, o);
    TrajectoryConfig cfg = s.config;
    cfg.observables = {{"q", position(40)}, {"p", momentum(40)}};
    for (const auto& r : run_trajectory(s.model, s.initial, cfg).records) {
      worst = std::min(worst, r.variances[0] * r.variances[1]);
    }
  }
  return {worst >= 0.25 - 1e-3, "min dq^2 dp^2 = " + fmt(worst)};
}

Outcome beta_scaling() {
  const KaosParams base;
  const double beta = 2.0;
  const KaosParams scaled = beta_scale(base, beta);
  const std::size_t per = 2000;
  const double dt = base.period() / per;
  const auto u = integrate_classical({0.5, -0.5}, base, dt, 3 * base.period(), 1);
  const auto v = integrate_classical({0.25, -0.25}, scaled, dt / beta, 3 * scaled.period(), 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(u.size(), v.size()); ++i) {
    worst = std::max(worst, std::abs(beta * v[i].xi - u[i].xi));
  }
  return {u.size() == v.size() && worst <= 1e-6, "sup error " + fmt(worst) + " at beta = 2"};
}

Outcome config_round_trip() {
  for (const auto& [name, summary] : scenario_catalog()) {
    const RunConfig cfg = scenario_config(name);
    const std::string first = describe(cfg, resolve(cfg));
    const RunConfig again = parse_config(first);
    if (describe(again, resolve(again)) != first) return {false, name + " differs"};
  }
  return {true, "all presets"};
}

Outcome output_round_trip() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Table t{{"t", "x"}, {}};
  for (int i = 0; i < 200; ++i) t.rows.push_back({u(rng) * 1e-7, u(rng)});
  std::stringstream buf;
  write_table(buf, t, OutputFormat::Csv);
  const Table back = read_csv(buf);
  return {back.rows == t.rows, "200 random rows"};
}

}  // namespace

bool run_validation(std::ostream& out) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"philox known answers", philox_vectors},
      {"AVX2 kernels match scalar", kernel_equivalence},
      {"noise moments", noise_moments},
      {"operator algebra", operator_algebra},
      {"eigenstates are fixed points", eigenstate_fixed_point},
      {"master equation keeps rho a density matrix", master_invariants},
      {"ensemble mean follows master equation", small_unraveling},
      {"ensemble independent of worker count", worker_independence},
      {"Heisenberg bound", heisenberg_bound},
      {"classical beta scaling", beta_scaling},
      {"config round trip", config_round_trip},
      {"output round trip", output_round_trip},
  };
  bool all = true;
  for (const auto& [name, fn] : checks) {
    Outcome r{false, ""};
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    all = all && r.ok;
    out << (r.ok ? "PASS " : "FAIL ") << name << " (" << r.detail << ")\n";
  }
  return all;
}

}  // namespace qsd::tools
