#include "qsd/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qsd/error.hpp"

namespace qsd {

namespace {

OperatorMatrix scaled(double c, const OperatorMatrix& m) { return Complex(c) * m; }

std::vector<Observable> observables(std::size_t dim, std::initializer_list<std::string_view> names) {
  std::vector<Observable> out;
  for (std::string_view n : names) {
    if (n == "n") out.push_back({"n", fock_number(dim)});
    else if (n == "q") out.push_back({"q", position(dim)});
    else if (n == "p") out.push_back({"p", momentum(dim)});
    else if (n == "a") out.push_back({"a", fock_annihilation(dim)});
  }
  return out;
}

void apply_common(TrajectoryConfig& cfg, const ScenarioOverrides& o) {
  if (o.dt) cfg.dt = *o.dt;
  if (o.t_final) cfg.t_final = *o.t_final;
  if (o.record_stride) cfg.record_stride = *o.record_stride;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
}

void require_positive(std::optional<double> v, const char* what) {
  if (v && !(*v > 0.0)) {
    throw Error(ErrorKind::Contract, std::string(what) + " must be > 0");
  }
}

Scenario fig1(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(16);
  require_positive(o.kappa, "kappa");
  const double kappa = o.kappa.value_or(1.0);
  constexpr std::array<std::size_t, 5> levels{1, 3, 5, 7, 9};
  TrajectoryConfig cfg{.dt = 1e-3, .t_final = 8.0, .record_stride = 10,
                       .seed = kDefaultSeed, .observables = observables(dim, {"n"})};
  apply_common(cfg, o);
  return {"fig1",
          "photon-number measurement, L = kappa n, start in equal superposition of n = 1,3,5,7,9",
          OpenSystemModel(OperatorMatrix(CMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim))),
                          {scaled(kappa, fock_number(dim))}),
          StateVector::superposition(dim, levels), cfg, std::nullopt};
}

Scenario fig2(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(100);
  const OperatorMatrix a = fock_annihilation(dim);
  const OperatorMatrix h = Complex(0.0, 2.0) * (a.adjoint() - a);
  TrajectoryConfig cfg{.dt = 2e-3, .t_final = 40.0, .record_stride = 500,
                       .seed = kDefaultSeed,
                       .observables = observables(dim, {"n", "q", "p", "a"})};
  apply_common(cfg, o);
  return {"fig2", "driven damped oscillator, H = 2i(a^dag - a), L = a, start in n = 8",
          OpenSystemModel(h, {a}), StateVector::basis(dim, o.initial_level.value_or(8)), cfg,
          std::nullopt};
}

Scenario fig3(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(40);
  require_positive(o.gamma, "gamma");
  const double gamma = o.gamma.value_or(0.1);
  const double nbar = o.nbar.value_or(0.0);
  if (nbar < 0.0) throw Error(ErrorKind::Contract, "nbar must be >= 0");
  const OperatorMatrix a = fock_annihilation(dim);
  std::vector<OperatorMatrix> ls{scaled(std::sqrt(gamma * (nbar + 1.0)), a)};
  if (nbar > 0.0) ls.push_back(scaled(std::sqrt(gamma * nbar), a.adjoint()));
  TrajectoryConfig cfg{.dt = 1e-3, .t_final = 80.0, .record_stride = 100,
                       .seed = kDefaultSeed,
                       .observables = observables(dim, {"q", "p", "n"})};
  apply_common(cfg, o);
  return {"fig3", "oscillator H = n in a thermal bath, start in n = 3",
          OpenSystemModel(fock_number(dim), std::move(ls)),
          StateVector::basis(dim, o.initial_level.value_or(3)), cfg, std::nullopt};
}

Scenario fig4(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(96);
  require_positive(o.rate, "rate");
  require_positive(o.well_center, "well_center");
  const double w = o.well_center.value_or(8.0);
  const double rate = o.rate.value_or(0.1);
  const double lambda = 1.0 / (8.0 * w * w);
  const CMatrix q = position(dim).entries();
  const CMatrix p = momentum(dim).entries();
  const CMatrix id = CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim));
  const CMatrix well = q * q - w * w * id;
  CMatrix h = 0.5 * (p * p) + lambda * (well * well);
  h = 0.5 * (h + h.adjoint()).eval();
  auto [lp, lm] = double_well_operators(dim, w, rate, o.edge_width.value_or(0.5));
  TrajectoryConfig cfg{.dt = 2e-4, .t_final = 60.0, .record_stride = 500,
                       .seed = kDefaultSeed, .observables = observables(dim, {"q", "p"})};
  apply_common(cfg, o);
  return {"fig4", "double well p^2/2 + lambda (q^2 - w^2)^2 with wells at +-w damped independently",
          OpenSystemModel(OperatorMatrix(std::move(h)), {std::move(lp), std::move(lm)}),
          StateVector::basis(dim, o.initial_level.value_or(0)), cfg, std::nullopt};
}

Scenario fig5(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(100);
  const OperatorMatrix n = fock_number(dim);
  TrajectoryConfig cfg{.dt = 1e-3, .t_final = 100.0, .record_stride = 100,
                       .seed = kDefaultSeed, .observables = observables(dim, {"n"})};
  apply_common(cfg, o);
  return {"fig5", "measurement plus damping, H = 0, L1 = 6 n, L2 = 0.1 a",
          OpenSystemModel(OperatorMatrix(CMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim))),
                          {scaled(6.0, n), scaled(0.1, fock_annihilation(dim))}),
          StateVector::basis(dim, o.initial_level.value_or(5)), cfg, std::nullopt};
}

Scenario kaos(const ScenarioOverrides& o) {
  const std::size_t dim = o.dim.value_or(64);
  KaosParams base;
  if (o.chi) base.chi = *o.chi;
  if (o.gamma) base.gamma = *o.gamma;
  if (o.f0) base.f0 = *o.f0;
  if (o.tau1) base.tau1 = *o.tau1;
  if (o.tau2) base.tau2 = *o.tau2;
  base.validate();
  const KaosParams k = beta_scale(base, o.beta.value_or(10.0));

  const OperatorMatrix a = fock_annihilation(dim);
  const OperatorMatrix ad = a.adjoint();
  const OperatorMatrix h = Complex(0.5 * k.chi) * (ad * ad * a * a);
  Drive drive{Complex(0.0, 1.0) * (ad - a), k.schedule()};

  OpenSystemModel model(h, {scaled(std::sqrt(k.gamma), a)}, std::move(drive));

  TrajectoryConfig cfg{.dt = 0.0, .t_final = 0.0, .record_stride = 0,
                       .seed = kDefaultSeed,
                       .observables = observables(dim, {"a", "n", "q", "p"})};
  // A whole number of steps per drive period, so records land on the section.
  const double period = k.period();
  cfg.dt = o.dt ? *o.dt : period / std::ceil(period / default_dt(model));
  const std::size_t periods = o.periods.value_or(200);
  cfg.t_final = double(periods) * period;
  cfg.record_stride = std::max<std::size_t>(1, std::size_t(std::llround(period / cfg.dt)));
  ScenarioOverrides rest = o;
  rest.dt.reset();
  apply_common(cfg, rest);
  return {"kaos",
          "kicked anharmonic oscillator H = chi/2 a^dag^2 a^2 + i F(t)(a^dag - a), L = sqrt(gamma) a",
          std::move(model), StateVector::basis(dim, 0), cfg, k};
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& scenario_catalog() {
  static const std::vector<std::pair<std::string, std::string>> names{
      {"fig1", "photon-number measurement; trajectories settle on number states"},
      {"fig2", "driven damped oscillator relaxing to a coherent state"},
      {"fig3", "oscillator in a zero-temperature (or thermal) bath"},
      {"fig4", "double well at zero temperature; each run picks one well"},
      {"fig5", "strong number measurement with weak damping; quantum jumps"},
      {"kaos", "pulsed anharmonic oscillator, beta-scaled (default beta = 10)"},
  };
  return names;
}

Scenario preset(std::string_view name, const ScenarioOverrides& o) {
  if (name == "fig1") return fig1(o);
  if (name == "fig2") return fig2(o);
  if (name == "fig3") return fig3(o);
  if (name == "fig4") return fig4(o);
  if (name == "fig5") return fig5(o);
  if (name == "kaos") return kaos(o);
  throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + std::string(name) + "'");
}

std::pair<OperatorMatrix, OperatorMatrix> half_line_projectors(std::size_t dim,
                                                               double edge_width) {
  const PositionEigenbasis basis = position_eigenbasis(dim);
  Eigen::VectorXd plus(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const double x = basis.eigenvalues[k];
    plus[Eigen::Index(k)] = edge_width > 0.0
                                ? 0.5 * std::erfc(-x / (std::sqrt(2.0) * edge_width))
                                : (x >= -1e-9 ? 1.0 : 0.0);
  }
  const CMatrix& u = basis.transform;
  CMatrix pp = u * plus.cast<Complex>().asDiagonal() * u.adjoint();
  pp = 0.5 * (pp + pp.adjoint()).eval();
  CMatrix pm = CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim)) - pp;
  return {OperatorMatrix(std::move(pp)), OperatorMatrix(std::move(pm))};
}

std::pair<OperatorMatrix, OperatorMatrix> double_well_operators(std::size_t dim,
                                                                double well_center,
                                                                double rate,
                                                                double edge_width) {
  if (!(rate >= 0.0)) throw Error(ErrorKind::Contract, "well damping rate must be >= 0");
  const PositionEigenbasis basis = position_eigenbasis(dim);
  const double span = std::min(-basis.eigenvalues.front(), basis.eigenvalues.back());
  if (span < 1.5 * std::abs(well_center)) {
    throw Error(ErrorKind::InvalidDimension,
                "dim " + std::to_string(dim) + " spans positions only to +-" +
                    std::to_string(span) + "; need +-1.5 * well centre");
  }
  const auto [pp, pm] = half_line_projectors(dim, edge_width);
  const CMatrix a = fock_annihilation(dim).entries();
  const CMatrix id = CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim));
  // (q -+ c + i p)/sqrt(2) = a -+ c/sqrt(2)
  const double shift = well_center / std::sqrt(2.0);
  const double s = std::sqrt(rate);
  return {OperatorMatrix(CMatrix(s * pp.entries() * (a - shift * id))),
          OperatorMatrix(CMatrix(s * pm.entries() * (a + shift * id)))};
}

double euler_stable_dt(const OpenSystemModel& model, double amplitude) {
  CMatrix k = Complex(0.0, -1.0) * model.hamiltonian_for(amplitude).entries();
  for (const auto& l : model.lindblads()) k -= 0.5 * (l.entries().adjoint() * l.entries());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(k, false);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Complex lam = solver.eigenvalues()[i];
    if (lam.real() < -1e-12 && std::norm(lam) > 0.0) {
      best = std::min(best, -2.0 * lam.real() / std::norm(lam));
    }
  }
  return best;
}

double default_dt(const OpenSystemModel& model) {
  auto spectral = [](const CMatrix& m) {
    return hermitian_eigenvalues(m).cwiseAbs().maxCoeff();
  };
  double scale = spectral(model.h_static().entries());
  if (model.drive()) {
    scale = std::max(scale, spectral(model.hamiltonian_for(model.drive()->schedule.f0).entries()));
  }
  for (const auto& l : model.lindblads()) {
    scale = std::max(scale, spectral(CMatrix(l.entries().adjoint() * l.entries())));
  }
  double dt = scale > 0.0 ? 0.05 / scale : 0.01;
  dt = std::min(dt, euler_stable_dt(model, 0.0));
  if (model.drive()) dt = std::min(dt, euler_stable_dt(model, model.drive()->schedule.f0));
  return dt;
}

}  // namespace qsd
