#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsd/integrator.hpp"
#include "qsd/linalg.hpp"
#include "qsd/model.hpp"

namespace qsd {

struct EnsembleOptions {
  std::size_t trajectories = 1;
  /// Number of contiguous trajectory groups kept for batch-mean errors.
  std::size_t batches = 32;
  unsigned workers = 1;
  /// Accumulate mean |psi><psi| per record. Off: only observable statistics.
  bool track_density = true;
  /// Also keep the per-batch densities used by observable_series errors.
  bool keep_batch_density = false;
};

struct ObservableStats {
  std::string name;
  std::vector<Complex> mean;       // per record time
  std::vector<double> std_error;   // per record time, NaN when M == 1
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<DensityMatrix> mean_density;  // empty unless track_density
  std::vector<ObservableStats> mean_observables;
  /// batch_density[b][r]: mean of |psi><psi| over batch b at record r.
  /// Empty unless keep_batch_density.
  std::vector<std::vector<CMatrix>> batch_density;
  std::vector<StateVector> final_states;
  std::size_t trajectory_count = 0;
};

/// Averages |psi><psi| over trajectories driven by fork(seed, 0..M-1).
/// Trajectories run on `workers` threads; all reductions happen in
/// trajectory-index order, so the result does not depend on the worker count.
EnsembleResult run_ensemble(const OpenSystemModel& model, const StateVector& psi0,
                            const TrajectoryConfig& cfg, const EnsembleOptions& opts);

inline EnsembleResult run_ensemble(const OpenSystemModel& model,
                                   const StateVector& psi0,
                                   const TrajectoryConfig& cfg, std::size_t m) {
  return run_ensemble(model, psi0, cfg, EnsembleOptions{m});
}

struct SeriesPoint {
  double t;
  Complex mean;
  std::optional<double> std_error;  // absent for a single batch
};

/// tr(mean_density op) per record, with a batch-means standard error when
/// batch densities were kept.
std::vector<SeriesPoint> observable_series(const EnsembleResult& result,
                                           const OperatorMatrix& op);

struct BornTally {
  std::map<std::size_t, std::size_t> counts;  // basis label -> trajectories
  std::size_t unconverged = 0;
  std::size_t total = 0;

  double frequency(std::size_t label) const;
};

/// Assigns each state to the basis level whose fidelity exceeds `threshold`,
/// or counts it as unconverged. threshold must lie in (0.5, 1].
BornTally born_tally(std::span<const StateVector> final_states,
                     double threshold = 0.99);

}  // namespace qsd
