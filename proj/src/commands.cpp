#include "qsd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "qsd/ensemble.hpp"
#include "qsd/error.hpp"
#include "qsd/kaos.hpp"
#include "qsd/oracle.hpp"

namespace qsd {

namespace {

std::string target_name(const RunConfig& cfg) {
  return cfg.scenario ? *cfg.scenario : std::string("inline");
}

OutputHeader header_for(const RunConfig& cfg, const Scenario& s, Mode mode) {
  return {"qsd " + std::string(mode_name(mode)), s.config.seed, true, describe(cfg, s)};
}

const KaosParams& kaos_params(const Scenario& s) {
  if (!s.kaos) {
    throw Error(ErrorKind::Config, "classical and poincare modes need the kaos scenario");
  }
  return *s.kaos;
}

std::size_t observable_index(const TrajectoryConfig& cfg, std::string_view name) {
  for (std::size_t i = 0; i < cfg.observables.size(); ++i) {
    if (cfg.observables[i].name == name) return i;
  }
  throw Error(ErrorKind::Config, "no observable named '" + std::string(name) + "'");
}

CommandOutcome run_trajectory_mode(const RunConfig& cfg, const Scenario& s,
                                   const std::filesystem::path& path) {
  const PreparedModel pm(s.model);
  const NoiseStream root(s.config.seed, s.model.lindblads().size());
  const TrajectoryResult r = run_trajectory(pm, s.initial, s.config, root.fork(0));
  emit_series(r.records, s.config.observables, path, cfg.format,
              header_for(cfg, s, Mode::Trajectory));
  double drift = 0.0, leak = 0.0;
  for (const auto& rec : r.records) {
    drift = std::max(drift, rec.norm_drift);
    leak = std::max(leak, rec.top_level_leak);
  }
  return {path, r.records.size(), {{"max_norm_drift", drift}, {"max_leak", leak}}};
}

CommandOutcome run_ensemble_mode(const RunConfig& cfg, const Scenario& s,
                                 const std::filesystem::path& path) {
  const EnsembleResult e = run_ensemble(
      s.model, s.initial, s.config,
      EnsembleOptions{cfg.trajectories, cfg.batches, cfg.workers, cfg.compare_oracle, false});
  Table t;
  t.columns.push_back("t");
  for (const auto& ob : e.mean_observables) {
    t.columns.push_back(ob.name + "_re");
    t.columns.push_back(ob.name + "_im");
    t.columns.push_back(ob.name + "_se");
  }
  std::vector<double> distances;
  if (cfg.compare_oracle) {
    t.columns.push_back("trace_distance");
    const auto master = integrate_master(s.model, pure_density(s.initial), s.config.dt,
                                         s.config.t_final, s.config.record_stride);
    if (master.size() != e.times.size()) {
      throw Error(ErrorKind::Contract, "oracle and ensemble record grids differ");
    }
    for (std::size_t r = 0; r < master.size(); ++r) {
      distances.push_back(trace_distance(e.mean_density[r], master[r].rho));
    }
  }
  for (std::size_t r = 0; r < e.times.size(); ++r) {
    std::vector<double> row{e.times[r]};
    for (const auto& ob : e.mean_observables) {
      row.push_back(ob.mean[r].real());
      row.push_back(ob.mean[r].imag());
      row.push_back(ob.std_error[r]);
    }
    if (cfg.compare_oracle) row.push_back(distances[r]);
    t.rows.push_back(std::move(row));
  }
  emit_table(t, path, cfg.format, header_for(cfg, s, Mode::Ensemble));
  CommandOutcome out{path, t.rows.size(), {{"trajectories", double(e.trajectory_count)}}};
  if (cfg.compare_oracle) {
    out.summary.push_back({"max_trace_distance", *std::max_element(distances.begin(), distances.end())});
  }
  return out;
}

CommandOutcome run_oracle_mode(const RunConfig& cfg, const Scenario& s,
                               const std::filesystem::path& path) {
  const auto master = integrate_master(s.model, pure_density(s.initial), s.config.dt,
                                       s.config.t_final, s.config.record_stride);
  Table t;
  t.columns.push_back("t");
  for (const auto& ob : s.config.observables) {
    t.columns.push_back(ob.name + "_re");
    t.columns.push_back(ob.name + "_im");
  }
  t.columns.push_back("purity");
  for (const auto& rec : master) {
    std::vector<double> row{rec.t};
    for (const auto& ob : s.config.observables) {
      const Complex v = (rec.rho.entries() * ob.op.entries()).trace();
      row.push_back(v.real());
      row.push_back(v.imag());
    }
    row.push_back((rec.rho.entries() * rec.rho.entries()).trace().real());
    t.rows.push_back(std::move(row));
  }
  emit_table(t, path, cfg.format, header_for(cfg, s, Mode::Oracle));
  return {path, t.rows.size(), {}};
}

CommandOutcome run_classical_mode(const RunConfig& cfg, const Scenario& s,
                                  const std::filesystem::path& path) {
  const KaosParams& k = kaos_params(s);
  const double period = k.period();
  const double dt = cfg.overrides.dt ? *cfg.overrides.dt : period / 1000.0;
  const std::size_t stride = std::max<std::size_t>(1, std::size_t(std::llround(period / dt)));
  const auto samples = integrate_classical({0.0, 0.0}, k, dt, s.config.t_final, stride);
  const auto points = poincare_section(samples, k, cfg.discard_periods, 0.5 * dt);
  emit_table(poincare_table(points), path, cfg.format, header_for(cfg, s, Mode::Classical));
  return {path, points.size(), {}};
}

CommandOutcome run_poincare_mode(const RunConfig& cfg, const Scenario& s,
                                 const std::filesystem::path& path) {
  const KaosParams& k = kaos_params(s);
  const std::size_t a = observable_index(s.config, "a");
  const TrajectoryResult r = run_trajectory(s.model, s.initial, s.config);
  const auto points = poincare_section(r.records, a, k, cfg.discard_periods, 0.5 * s.config.dt);
  emit_table(poincare_table(points), path, cfg.format, header_for(cfg, s, Mode::Poincare));
  double radius = 0.0;
  for (const auto& p : points) radius = std::max(radius, std::hypot(p.re, p.im));
  return {path, points.size(), {{"max_abs_a", radius}}};
}

}  // namespace

Mode parse_mode(std::string_view text) {
  if (text == "trajectory") return Mode::Trajectory;
  if (text == "ensemble") return Mode::Ensemble;
  if (text == "oracle") return Mode::Oracle;
  if (text == "classical") return Mode::Classical;
  if (text == "poincare") return Mode::Poincare;
  throw Error(ErrorKind::Config, "unknown mode '" + std::string(text) + "'");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Trajectory: return "trajectory";
    case Mode::Ensemble: return "ensemble";
    case Mode::Oracle: return "oracle";
    case Mode::Classical: return "classical";
    case Mode::Poincare: return "poincare";
  }
  return "?";
}

std::filesystem::path output_path(const RunConfig& cfg, Mode mode) {
  if (cfg.output) return *cfg.output;
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv("QSD_OUTPUT_DIR"); env && *env) dir = env;
  return dir / (target_name(cfg) + "_" + std::string(mode_name(mode)) + "." +
                std::string(format_name(cfg.format)));
}

CommandOutcome run_command(const RunConfig& cfg, Mode mode) {
  const Scenario s = resolve(cfg);
  const std::filesystem::path path = output_path(cfg, mode);
  switch (mode) {
    case Mode::Trajectory: return run_trajectory_mode(cfg, s, path);
    case Mode::Ensemble: return run_ensemble_mode(cfg, s, path);
    case Mode::Oracle: return run_oracle_mode(cfg, s, path);
    case Mode::Classical: return run_classical_mode(cfg, s, path);
    case Mode::Poincare: return run_poincare_mode(cfg, s, path);
  }
  throw Error(ErrorKind::Contract, "unhandled mode");
}

}  // namespace qsd
