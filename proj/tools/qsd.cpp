#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsd/commands.hpp"
#include "qsd/config.hpp"
#include "qsd/error.hpp"
#include "qsd/scenarios.hpp"
#include "validate.hpp"

namespace {

struct Flags {
  std::string target;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<double> beta;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> discard_periods;
  std::optional<unsigned> workers;
  std::optional<std::size_t> periods;
  std::optional<std::size_t> dim;
  bool no_oracle = false;
};

void add_flags(CLI::App* cmd, Flags& f, bool target_required, const std::string& default_target) {
  auto* t = cmd->add_option("target", f.target, "scenario name or YAML config file");
  if (target_required) t->required();
  else f.target = default_target;
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--trajectories", f.trajectories, "ensemble size M");
  cmd->add_option("--dt", f.dt, "time step");
  cmd->add_option("--t-final", f.t_final, "end time");
  cmd->add_option("--beta", f.beta, "kaos beta scaling");
  cmd->add_option("--out", f.out, "output file");
  cmd->add_option("--format", f.format, "csv or jsonl");
  cmd->add_option("--discard-periods", f.discard_periods, "transient periods dropped from sections");
  cmd->add_option("--workers", f.workers, "ensemble worker threads");
  cmd->add_option("--periods", f.periods, "kaos run length in drive periods");
  cmd->add_option("--dim", f.dim, "Fock-space truncation");
  cmd->add_flag("--no-oracle", f.no_oracle, "skip the master-equation comparison");
}

qsd::RunConfig load(const Flags& f) {
  qsd::RunConfig cfg;
  if (std::filesystem::is_regular_file(f.target)) {
    std::ifstream in(f.target);
    std::stringstream text;
    text << in.rdbuf();
    if (!in) throw qsd::Error(qsd::ErrorKind::Io, "cannot read " + f.target);
    cfg = qsd::parse_config(text.str());
  } else {
    cfg = qsd::scenario_config(f.target);
  }
  auto& o = cfg.overrides;
  if (f.seed) o.seed = *f.seed;
  if (f.dt) o.dt = *f.dt;
  if (f.t_final) o.t_final = *f.t_final;
  if (f.dim) o.dim = *f.dim;
  const bool kaos = cfg.scenario && *cfg.scenario == "kaos";
  if ((f.beta || f.periods) && !kaos) {
    throw qsd::Error(qsd::ErrorKind::Config, "--beta and --periods apply only to kaos");
  }
  if (f.beta) o.beta = *f.beta;
  if (f.periods) o.periods = *f.periods;
  if (f.trajectories) cfg.trajectories = *f.trajectories;
  if (f.out) cfg.output = *f.out;
  if (f.format) cfg.format = qsd::parse_format(*f.format);
  if (f.discard_periods) cfg.discard_periods = *f.discard_periods;
  if (f.workers) cfg.workers = *f.workers;
  if (f.no_oracle) cfg.compare_oracle = false;
  return cfg;
}

int exit_code(qsd::ErrorKind kind) {
  switch (kind) {
    case qsd::ErrorKind::NumericalBlowup:
    case qsd::ErrorKind::TruncationLeak:
    case qsd::ErrorKind::IntegratorStepTooLarge:
      return 3;
    case qsd::ErrorKind::Io:
      return 4;
    default:
      return 2;
  }
}

void report(const qsd::CommandOutcome& r, qsd::Mode mode) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(qsd::mode_name(mode));
  j["output"] = r.output.string();
  j["rows"] = r.rows;
  for (const auto& [k, v] : r.summary) j[k] = v;
  std::cout << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state diffusion trajectories, master-equation oracle and KAOS sections"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qsd::version()));

  auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios");
  Flags run_f, oracle_f, classical_f, poincare_f;
  auto* run = app.add_subcommand("run", "trajectory, or ensemble when --trajectories > 1");
  add_flags(run, run_f, true, "");
  auto* oracle = app.add_subcommand("oracle", "integrate the master equation");
  add_flags(oracle, oracle_f, true, "");
  auto* classical = app.add_subcommand("classical", "classical kaos Poincare section");
  add_flags(classical, classical_f, false, "kaos");
  auto* poincare = app.add_subcommand("poincare", "quantum kaos Poincare section");
  add_flags(poincare, poincare_f, false, "kaos");
  auto* validate = app.add_subcommand("validate", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& [name, summary] : qsd::scenario_catalog()) {
        std::cout << name << "\t" << summary << '\n';
      }
      return 0;
    }
    if (validate->parsed()) return qsd::tools::run_validation(std::cout) ? 0 : 1;

    const Flags* f = nullptr;
    qsd::Mode mode = qsd::Mode::Trajectory;
    if (run->parsed()) f = &run_f;
    else if (oracle->parsed()) { f = &oracle_f; mode = qsd::Mode::Oracle; }
    else if (classical->parsed()) { f = &classical_f; mode = qsd::Mode::Classical; }
    else { f = &poincare_f; mode = qsd::Mode::Poincare; }

    const qsd::RunConfig cfg = load(*f);
    if (run->parsed() && cfg.trajectories > 1) mode = qsd::Mode::Ensemble;
    report(qsd::run_command(cfg, mode), mode);
    return 0;
  } catch (const qsd::Error& e) {
    nlohmann::ordered_json j;
    j["error"] = std::string(qsd::to_string(e.kind()));
    j["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    nlohmann::ordered_json j;
    j["error"] = "internal";
    j["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return 1;
  }
}
