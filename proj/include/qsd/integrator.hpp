#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/model.hpp"
#include "qsd/noise.hpp"

namespace qsd {

struct Observable {
  std::string name;
  OperatorMatrix op;
};

struct TrajectoryConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t record_stride = 1;
  std::uint64_t seed = 0;
  std::vector<Observable> observables;
  /// Top-five-level probability that aborts a run whose operators can
  /// raise excitation.
  double leak_limit = 1e-3;

  void validate() const;
  std::size_t step_count() const;
};

struct TrajectoryRecord {
  double t = 0.0;
  std::vector<Complex> expectations;  // one per observable
  std::vector<double> variances;      // hermitian observables only, in order
  double norm_drift = 0.0;            // |‖psi‖ - 1| before renormalizing
  double top_level_leak = 0.0;
};

struct TrajectoryResult {
  std::vector<TrajectoryRecord> records;
  StateVector final_state;
};

/// The model with its effective generators K(F) = -i H(F) - 1/2 sum L^dag L
/// precomputed for F = 0 and F = F0. Immutable; share across threads.
class PreparedModel {
 public:
  explicit PreparedModel(const OpenSystemModel& model);

  const OpenSystemModel& model() const noexcept { return model_; }
  const OperatorMatrix& generator(double amplitude) const;

 private:
  OpenSystemModel model_;
  OperatorMatrix k_off_;
  OperatorMatrix k_on_;
  double f0_ = 0.0;
};

/// dt-coefficient of the Ito equation:
///   -i H psi - 1/2 sum_j (L_j^dag L_j + |l_j|^2 - 2 conj(l_j) L_j) psi
/// with l_j = <psi|L_j|psi>.
CVector drift(const StateVector& psi, const OpenSystemModel& model, double t);

/// (L_j - l_j) psi for every environment operator.
std::vector<CVector> diffusion_vectors(const StateVector& psi,
                                       const OpenSystemModel& model);

/// One Euler-Maruyama step followed by renormalization. The drive amplitude
/// is evaluated at t. `norm_drift`, if given, receives |‖psi'‖ - 1| before
/// renormalizing.
StateVector step(const StateVector& psi, const OpenSystemModel& model, double t,
                 double dt, std::span<const Complex> increments,
                 double* norm_drift = nullptr);

/// Called at every record with the record index and current state.
using StateObserver = std::function<void(std::size_t, const StateVector&)>;

TrajectoryResult run_trajectory(const OpenSystemModel& model,
                                const StateVector& psi0,
                                const TrajectoryConfig& cfg);

/// Runs with an explicit noise stream; `cfg.seed` is ignored.
TrajectoryResult run_trajectory(const PreparedModel& model,
                                const StateVector& psi0,
                                const TrajectoryConfig& cfg, NoiseStream noise,
                                const StateObserver& observer = {});

/// Record times k * stride * dt for k = 0, 1, ... up to t_final.
std::vector<double> record_times(const TrajectoryConfig& cfg);

}  // namespace qsd
