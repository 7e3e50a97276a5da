#include "qsd/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsd/error.hpp"
#include "qsd/kernels.hpp"

namespace qsd {

namespace {

constexpr double kBlowupAmplitude = 1e6;

OperatorMatrix effective_generator(const OpenSystemModel& m, double amplitude) {
  CMatrix k = Complex(0.0, -1.0) * m.hamiltonian_for(amplitude).entries();
  for (const auto& l : m.lindblads()) {
    k -= 0.5 * (l.entries().adjoint() * l.entries());
  }
  return OperatorMatrix(std::move(k));
}

[[noreturn]] void blowup(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite or exploding amplitudes at t = " << t
     << "; reduce dt";
  throw Error(ErrorKind::NumericalBlowup, os.str());
}

// Scratch space for one trajectory.
struct Workspace {
  explicit Workspace(std::size_t dim, std::size_t channels)
      : next(dim), k_psi(dim), l_psi(channels, std::vector<Complex>(dim)),
        ell(channels), increments(channels) {}

  std::vector<Complex> next;
  std::vector<Complex> k_psi;
  std::vector<std::vector<Complex>> l_psi;
  std::vector<Complex> ell;
  std::vector<Complex> increments;
};

// psi <- normalize(psi + drift dt + sum diffusion_j dxi_j). Returns the
// pre-normalization norm drift.
double advance(const PreparedModel& pm, std::vector<Complex>& psi,
               double amplitude, double dt, std::span<const Complex> dxi,
               Workspace& ws, double t_for_errors) {
  const auto& kern = kernels::active();
  const auto& ls = pm.model().lindblads();
  const std::size_t n = psi.size();

  double sum_ell2 = 0.0;
  for (std::size_t j = 0; j < ls.size(); ++j) {
    apply(ls[j], psi, ws.l_psi[j]);
    const Complex ell = kern.cdot(psi.data(), ws.l_psi[j].data(), n);
    ws.ell[j] = ell;
    sum_ell2 += std::norm(ell);
  }

  // k_psi becomes the drift, next the diffusion increment.
  apply(pm.generator(amplitude), psi, ws.k_psi);
  kern.axpy(Complex(-0.5 * sum_ell2), psi.data(), ws.k_psi.data(), n);
  std::fill(ws.next.begin(), ws.next.end(), Complex(0.0));
  for (std::size_t j = 0; j < ls.size(); ++j) {
    kern.axpy(std::conj(ws.ell[j]), ws.l_psi[j].data(), ws.k_psi.data(), n);
    kern.axpy(-ws.ell[j], psi.data(), ws.l_psi[j].data(), n);
    kern.axpy(dxi[j], ws.l_psi[j].data(), ws.next.data(), n);
  }
  kern.axpy(Complex(dt), ws.k_psi.data(), ws.next.data(), n);
  for (std::size_t i = 0; i < n; ++i) ws.next[i] += psi[i];

  const double norm2 = kern.norm2(ws.next.data(), n);
  if (!std::isfinite(norm2)) blowup(t_for_errors);
  for (const Complex& c : ws.next) {
    if (std::abs(c.real()) > kBlowupAmplitude || std::abs(c.imag()) > kBlowupAmplitude) {
      blowup(t_for_errors);
    }
  }
  const double norm = std::sqrt(norm2);
  if (norm == 0.0) blowup(t_for_errors);
  const double inv = 1.0 / norm;
  for (std::size_t i = 0; i < n; ++i) psi[i] = ws.next[i] * inv;
  return std::abs(norm - 1.0);
}

double leak_of(const std::vector<Complex>& psi) {
  const std::size_t n = psi.size();
  const std::size_t first = n > 5 ? n - 5 : 0;
  double s = 0.0;
  for (std::size_t k = first; k < n; ++k) s += std::norm(psi[k]);
  return std::min(1.0, s);
}

TrajectoryRecord make_record(double t, const StateVector& psi,
                             const TrajectoryConfig& cfg, double drift_value,
                             double leak) {
  TrajectoryRecord r;
  r.t = t;
  r.norm_drift = drift_value;
  r.top_level_leak = leak;
  r.expectations.reserve(cfg.observables.size());
  for (const auto& ob : cfg.observables) {
    r.expectations.push_back(expectation(ob.op, psi));
    if (ob.op.hermitian_hint()) r.variances.push_back(variance(ob.op, psi));
  }
  return r;
}

}  // namespace

// ------------------------------------------------------------ configuration

void TrajectoryConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidStep, "dt must be positive and finite");
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw Error(ErrorKind::InvalidStep, "t_final must be positive and finite");
  }
  if (dt > t_final * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidStep, "dt must not exceed t_final");
  }
  if (record_stride == 0) {
    throw Error(ErrorKind::Contract, "record_stride must be >= 1");
  }
}

std::size_t TrajectoryConfig::step_count() const {
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

std::vector<double> record_times(const TrajectoryConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  const std::size_t steps = cfg.step_count();
  for (std::size_t k = 0; k <= steps; k += cfg.record_stride) {
    out.push_back(std::min(double(k) * cfg.dt, cfg.t_final));
  }
  return out;
}

// ------------------------------------------------------------ PreparedModel

PreparedModel::PreparedModel(const OpenSystemModel& model)
    : model_(model),
      k_off_(effective_generator(model, 0.0)),
      k_on_(model.drive() ? effective_generator(model, model.drive()->schedule.f0)
                          : k_off_),
      f0_(model.drive() ? model.drive()->schedule.f0 : 0.0) {}

const OperatorMatrix& PreparedModel::generator(double amplitude) const {
  if (amplitude == 0.0) return k_off_;
  if (amplitude == f0_) return k_on_;
  throw Error(ErrorKind::Contract, "drive amplitude is neither 0 nor F0");
}

// ------------------------------------------------------------ single-state API

CVector drift(const StateVector& psi, const OpenSystemModel& model, double t) {
  require_same_dim(psi.dim(), model.dim(), "drift");
  CVector out = Complex(0.0, -1.0) * apply(model.hamiltonian_at(t), psi);
  const CVector& v = psi.amplitudes();
  for (const auto& l : model.lindblads()) {
    const CVector lv = apply(l, psi);
    const Complex ell = v.dot(lv);  // conjugates the first argument
    const CVector ldl = l.entries().adjoint() * lv;
    out += -0.5 * ldl - 0.5 * std::norm(ell) * v + std::conj(ell) * lv;
  }
  return out;
}

std::vector<CVector> diffusion_vectors(const StateVector& psi,
                                       const OpenSystemModel& model) {
  require_same_dim(psi.dim(), model.dim(), "diffusion_vectors");
  std::vector<CVector> out;
  const CVector& v = psi.amplitudes();
  for (const auto& l : model.lindblads()) {
    const CVector lv = apply(l, psi);
    out.push_back(lv - v.dot(lv) * v);
  }
  return out;
}

StateVector step(const StateVector& psi, const OpenSystemModel& model, double t,
                 double dt, std::span<const Complex> increments,
                 double* norm_drift) {
  require_same_dim(psi.dim(), model.dim(), "step");
  if (increments.size() != model.lindblads().size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "need one increment per environment operator");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidStep, "dt must be > 0");
  const PreparedModel pm(model);
  Workspace ws(psi.dim(), model.lindblads().size());
  std::vector<Complex> v(psi.span().begin(), psi.span().end());
  const double d = advance(pm, v, model.drive_amplitude(t), dt, increments, ws, t);
  if (norm_drift) *norm_drift = d;
  return StateVector(Eigen::Map<CVector>(v.data(), Eigen::Index(v.size())));
}

// ------------------------------------------------------------ trajectories

TrajectoryResult run_trajectory(const OpenSystemModel& model,
                                const StateVector& psi0,
                                const TrajectoryConfig& cfg) {
  const PreparedModel pm(model);
  return run_trajectory(pm, psi0, cfg,
                        NoiseStream(cfg.seed, model.lindblads().size()).fork(0));
}

TrajectoryResult run_trajectory(const PreparedModel& pm, const StateVector& psi0,
                                const TrajectoryConfig& cfg, NoiseStream noise,
                                const StateObserver& observer) {
  cfg.validate();
  const OpenSystemModel& model = pm.model();
  require_same_dim(psi0.dim(), model.dim(), "run_trajectory");
  for (const auto& ob : cfg.observables) {
    require_same_dim(ob.op.dim(), model.dim(), "observable");
  }
  const std::size_t channels = model.lindblads().size();
  if (noise.channel_count() != channels) {
    throw Error(ErrorKind::DimensionMismatch, "noise stream has wrong channel count");
  }
  const bool enforce_leak = model.raises_excitation();

  Workspace ws(model.dim(), channels);
  std::vector<Complex> psi(psi0.span().begin(), psi0.span().end());
  auto snapshot = [&] {
    return StateVector(Eigen::Map<CVector>(psi.data(), Eigen::Index(psi.size())));
  };

  std::vector<TrajectoryRecord> records;
  {
    const StateVector s = snapshot();
    records.push_back(make_record(0.0, s, cfg, 0.0, leak_of(psi)));
    if (observer) observer(0, s);
  }

  const std::size_t steps = cfg.step_count();
  const double snap = 1e-6 * cfg.dt;
  double last_drift = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = double(k) * cfg.dt;
    const double t1 = std::min(double(k + 1) * cfg.dt, cfg.t_final);
    double t = t0;
    last_drift = 0.0;
    // Subdivide at pulse edges so the Hamiltonian is constant in each piece.
    while (t < t1) {
      double edge = model.next_edge(t + snap);
      if (edge >= t1 - snap) edge = t1;
      const double h = edge - t;
      noise.sample_increments(h, ws.increments);
      const double amp = model.drive_amplitude(0.5 * (t + edge));
      last_drift = std::max(last_drift, advance(pm, psi, amp, h, ws.increments, ws, edge));
      t = edge;
    }
    const double leak = leak_of(psi);
    if (enforce_leak && leak > cfg.leak_limit) {
      std::ostringstream os;
      os << "probability " << leak << " in the top five levels at t = " << t1
         << " exceeds " << cfg.leak_limit << "; increase dim";
      throw Error(ErrorKind::TruncationLeak, os.str());
    }
    if ((k + 1) % cfg.record_stride == 0) {
      const StateVector s = snapshot();
      records.push_back(make_record(t1, s, cfg, last_drift, leak));
      if (observer) observer(records.size() - 1, s);
    }
  }
  return TrajectoryResult{std::move(records), snapshot()};
}

}  // namespace qsd
