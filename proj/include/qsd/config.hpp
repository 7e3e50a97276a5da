#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsd/output.hpp"
#include "qsd/scenarios.hpp"

namespace qsd {

/// A model written out as operator expressions.
struct InlineModel {
  std::string hamiltonian;
  std::optional<std::string> drive;  // needs tau1, tau2, f0
  std::vector<std::string> lindblads;
};

struct ObservableSpec {
  std::string name;
  std::string expr;
};

/// Everything a run needs. Either `scenario` or `model` is set; the shared
/// keys (dim, dt, t_final, seed, ...) live in `overrides`.
struct RunConfig {
  std::optional<std::string> scenario;
  std::optional<InlineModel> model;
  ScenarioOverrides overrides;
  std::vector<ObservableSpec> observables;  // empty: scenario default
  std::optional<double> leak_limit;
  std::size_t trajectories = 1;
  std::size_t batches = 32;
  unsigned workers = 1;
  std::size_t discard_periods = 20;
  /// Ensemble runs also solve the master equation and report trace distances.
  bool compare_oracle = true;
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::Csv;
};

/// Parses a YAML document. Unknown keys, malformed values and invalid
/// operator expressions throw Error(Config) or Error(Parse) with the line
/// and column. The result is resolved once to validate it.
RunConfig parse_config(std::string_view text);

/// Shorthand for a document naming only a scenario.
RunConfig scenario_config(std::string_view name);

/// Builds the model, initial state and trajectory settings.
Scenario resolve(const RunConfig& cfg);

/// YAML document that parses back to an equivalent RunConfig, with dt,
/// t_final, record stride and seed filled in from `resolved`.
std::string describe(const RunConfig& cfg, const Scenario& resolved);

}  // namespace qsd
