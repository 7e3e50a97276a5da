#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

/// Periodic rectangular pulse train: off for tau1, then F0 for tau2.
struct PulseSchedule {
  double tau1 = 0.0;
  double tau2 = 1.0;
  double f0 = 0.0;

  double period() const noexcept { return tau1 + tau2; }
  void validate() const;
};

/// F(t) = 0 if t mod tau < tau1, F0 otherwise (the edge t mod tau == tau1
/// belongs to the "on" phase).
double pulse_value(const PulseSchedule& schedule, double t);

/// First pulse edge strictly after t (edges at k tau and k tau + tau1).
double next_pulse_edge(const PulseSchedule& schedule, double t);

struct Drive {
  OperatorMatrix op;
  PulseSchedule schedule;
};

/// H(t) = H_static + F(t) drive_op, plus environment operators L_j.
class OpenSystemModel {
 public:
  OpenSystemModel(OperatorMatrix h_static, std::vector<OperatorMatrix> lindblads,
                  std::optional<Drive> drive = std::nullopt);

  std::size_t dim() const noexcept { return h_.dim(); }
  const OperatorMatrix& h_static() const noexcept { return h_; }
  const std::vector<OperatorMatrix>& lindblads() const noexcept { return ls_; }
  const std::optional<Drive>& drive() const noexcept { return drive_; }

  /// F(t), or 0 without a drive.
  double drive_amplitude(double t) const;
  OperatorMatrix hamiltonian_at(double t) const;
  /// Hamiltonian for a given drive amplitude.
  OperatorMatrix hamiltonian_for(double amplitude) const;

  /// Next time after t where H changes, or +inf.
  double next_edge(double t) const;

  /// True when some operator can move weight towards the truncation edge.
  bool raises_excitation() const noexcept;

 private:
  OperatorMatrix h_;
  std::vector<OperatorMatrix> ls_;
  std::optional<Drive> drive_;
};

}  // namespace qsd
