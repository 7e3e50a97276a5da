#include "qsd/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qsd/error.hpp"

namespace qsd {

void PulseSchedule::validate() const {
  if (!(tau1 >= 0.0) || !(tau2 > 0.0) || !std::isfinite(f0) ||
      !std::isfinite(tau1) || !std::isfinite(tau2)) {
    throw Error(ErrorKind::Contract,
                "pulse schedule needs tau1 >= 0, tau2 > 0 and finite F0");
  }
}

double pulse_value(const PulseSchedule& s, double t) {
  const double tau = s.period();
  double phase = std::fmod(t, tau);
  if (phase < 0.0) phase += tau;
  return phase < s.tau1 ? 0.0 : s.f0;
}

double next_pulse_edge(const PulseSchedule& s, double t) {
  const double tau = s.period();
  const double k = std::floor(t / tau);
  // Candidate edges in the current and next period, in order.
  const double candidates[] = {k * tau + s.tau1, (k + 1) * tau,
                               (k + 1) * tau + s.tau1, (k + 2) * tau};
  for (double e : candidates) {
    if (e > t) return e;
  }
  return (k + 2) * tau + s.tau1;
}

OpenSystemModel::OpenSystemModel(OperatorMatrix h_static,
                                 std::vector<OperatorMatrix> lindblads,
                                 std::optional<Drive> drive)
    : h_(std::move(h_static)), ls_(std::move(lindblads)), drive_(std::move(drive)) {
  for (const auto& l : ls_) require_same_dim(l.dim(), dim(), "lindblad operator");
  if (!h_.hermitian_hint()) {
    throw Error(ErrorKind::Contract, "static Hamiltonian is not hermitian");
  }
  if (drive_) {
    require_same_dim(drive_->op.dim(), dim(), "drive operator");
    drive_->schedule.validate();
    if (!hamiltonian_for(drive_->schedule.f0).hermitian_hint()) {
      throw Error(ErrorKind::Contract, "driven Hamiltonian is not hermitian at F = F0");
    }
  }
}

double OpenSystemModel::drive_amplitude(double t) const {
  return drive_ ? pulse_value(drive_->schedule, t) : 0.0;
}

OperatorMatrix OpenSystemModel::hamiltonian_for(double amplitude) const {
  if (!drive_ || amplitude == 0.0) return h_;
  return h_ + Complex(amplitude) * drive_->op;
}

OperatorMatrix OpenSystemModel::hamiltonian_at(double t) const {
  return hamiltonian_for(drive_amplitude(t));
}

double OpenSystemModel::next_edge(double t) const {
  if (!drive_) return std::numeric_limits<double>::infinity();
  return next_pulse_edge(drive_->schedule, t);
}

bool OpenSystemModel::raises_excitation() const noexcept {
  if (h_.has_raising_part()) return true;
  if (drive_ && drive_->op.has_raising_part()) return true;
  for (const auto& l : ls_) {
    if (l.has_raising_part()) return true;
  }
  return false;
}

}  // namespace qsd
