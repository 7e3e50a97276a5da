#include "qsd/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "qsd/error.hpp"

namespace qsd {

namespace {

// Neumaier-compensated elementwise accumulation of complex matrices.
class CompensatedSum {
 public:
  CompensatedSum(Eigen::Index n) : sum_(CMatrix::Zero(n, n)), comp_(CMatrix::Zero(n, n)) {}

  void add(const CMatrix& x) {
    const Eigen::Index size = x.size();
    double* s = reinterpret_cast<double*>(sum_.data());
    double* c = reinterpret_cast<double*>(comp_.data());
    const double* v = reinterpret_cast<const double*>(x.data());
    for (Eigen::Index k = 0; k < 2 * size; ++k) {
      const double t = s[k] + v[k];
      if (std::abs(s[k]) >= std::abs(v[k])) {
        c[k] += (s[k] - t) + v[k];
      } else {
        c[k] += (v[k] - t) + s[k];
      }
      s[k] = t;
    }
  }

  CMatrix value() const { return sum_ + comp_; }

 private:
  CMatrix sum_;
  CMatrix comp_;
};

// Welford running mean / M2 for complex samples, fed in index order.
struct RunningStats {
  std::size_t n = 0;
  Complex mean{};
  double m2 = 0.0;

  void add(Complex x) {
    ++n;
    const Complex d = x - mean;
    mean += d / double(n);
    m2 += std::real(std::conj(d) * (x - mean));
  }
  double std_error() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(m2 / double(n - 1) / double(n));
  }
};

}  // namespace

EnsembleResult run_ensemble(const OpenSystemModel& model, const StateVector& psi0,
                            const TrajectoryConfig& cfg, const EnsembleOptions& opts) {
  const std::size_t m = opts.trajectories;
  if (m == 0) throw Error(ErrorKind::Contract, "ensemble needs at least one trajectory");
  cfg.validate();

  const PreparedModel pm(model);
  const NoiseStream root(cfg.seed, model.lindblads().size());
  const std::vector<double> times = record_times(cfg);
  const std::size_t n_rec = times.size();
  const std::size_t n_obs = cfg.observables.size();
  const auto dim = Eigen::Index(model.dim());

  const std::size_t n_batches = std::max<std::size_t>(1, std::min(opts.batches, m));
  const unsigned workers = std::max(1u, opts.workers);

  EnsembleResult out;
  out.times = times;
  out.trajectory_count = m;
  out.final_states.reserve(m);
  const bool density = opts.track_density;
  const bool keep_batches = density && opts.keep_batch_density;
  if (keep_batches) out.batch_density.resize(n_batches);

  std::vector<CompensatedSum> totals(density ? n_rec : 0, CompensatedSum(dim));
  std::vector<std::vector<RunningStats>> stats(n_obs, std::vector<RunningStats>(n_rec));

  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::size_t first = b * m / n_batches;
    const std::size_t last = (b + 1) * m / n_batches;
    const std::size_t count = last - first;

    // states[i][r] for trajectory first + i
    std::vector<std::vector<CVector>> states(count, std::vector<CVector>(density ? n_rec : 0));
    std::vector<std::optional<TrajectoryResult>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        const std::size_t index = first + i;
        try {
          StateObserver keep;
          if (density) {
            keep = [&states, i](std::size_t r, const StateVector& s) {
              states[i][r] = s.amplitudes();
            };
          }
          results[i] = run_trajectory(pm, psi0, cfg, root.fork(index), keep);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (workers == 1 || count == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < count; ++i) {
      if (!errors[i]) continue;
      const std::string where = "trajectory " + std::to_string(first + i) +
                                " (master seed " + std::to_string(cfg.seed) + "): ";
      try {
        std::rethrow_exception(errors[i]);
      } catch (const Error& e) {
        throw Error(e.kind(), where + e.what());
      }
    }

    std::vector<CMatrix> batch(density ? n_rec : 0, CMatrix::Zero(dim, dim));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        const CVector& v = states[i][r];
        batch[r].noalias() += v * v.adjoint();
      }
      const auto& recs = results[i]->records;
      for (std::size_t o = 0; o < n_obs; ++o) {
        for (std::size_t r = 0; r < n_rec; ++r) stats[o][r].add(recs[r].expectations[o]);
      }
      out.final_states.push_back(results[i]->final_state);
    }
    for (std::size_t r = 0; r < batch.size(); ++r) {
      totals[r].add(batch[r]);
      batch[r] /= double(count);
    }
    if (keep_batches) out.batch_density[b] = std::move(batch);
  }

  out.mean_density.reserve(totals.size());
  for (std::size_t r = 0; r < totals.size(); ++r) {
    out.mean_density.emplace_back(CMatrix(totals[r].value() / double(m)));
  }
  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableStats s;
    s.name = cfg.observables[o].name;
    for (std::size_t r = 0; r < n_rec; ++r) {
      s.mean.push_back(stats[o][r].mean);
      s.std_error.push_back(stats[o][r].std_error());
    }
    out.mean_observables.push_back(std::move(s));
  }
  return out;
}

std::vector<SeriesPoint> observable_series(const EnsembleResult& result,
                                           const OperatorMatrix& op) {
  if (result.mean_density.size() != result.times.size()) {
    throw Error(ErrorKind::Contract, "ensemble was run without density tracking");
  }
  if (!result.mean_density.empty()) {
    require_same_dim(op.dim(), result.mean_density.front().dim(), "observable_series");
  }
  auto trace_with = [&op](const CMatrix& rho) {
    return Complex((rho.cwiseProduct(op.entries().transpose())).sum());
  };
  const std::size_t nb = result.batch_density.size();
  std::vector<SeriesPoint> out;
  for (std::size_t r = 0; r < result.times.size(); ++r) {
    SeriesPoint p{result.times[r], trace_with(result.mean_density[r].entries()), {}};
    if (nb >= 2) {
      std::vector<Complex> v(nb);
      Complex avg{};
      for (std::size_t b = 0; b < nb; ++b) {
        v[b] = trace_with(result.batch_density[b][r]);
        avg += v[b];
      }
      avg /= double(nb);
      double ss = 0.0;
      for (const Complex& x : v) ss += std::norm(x - avg);
      p.std_error = std::sqrt(ss / double(nb - 1) / double(nb));
    }
    out.push_back(p);
  }
  return out;
}

double BornTally::frequency(std::size_t label) const {
  if (total == 0) return 0.0;
  const auto it = counts.find(label);
  return it == counts.end() ? 0.0 : double(it->second) / double(total);
}

BornTally born_tally(std::span<const StateVector> final_states, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorKind::Contract, "classification threshold must lie in (0.5, 1]");
  }
  BornTally tally;
  for (const StateVector& s : final_states) {
    ++tally.total;
    bool assigned = false;
    for (std::size_t k = 0; k < s.dim(); ++k) {
      if (projector_fidelity(s, k) > threshold) {
        ++tally.counts[k];
        assigned = true;
        break;
      }
    }
    if (!assigned) ++tally.unconverged;
  }
  return tally;
}

}  // namespace qsd
