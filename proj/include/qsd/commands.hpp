#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsd/config.hpp"

namespace qsd {

enum class Mode { Trajectory, Ensemble, Oracle, Classical, Poincare };

Mode parse_mode(std::string_view text);
std::string_view mode_name(Mode mode);

struct CommandOutcome {
  std::filesystem::path output;
  std::size_t rows = 0;
  /// Headline numbers, e.g. max_trace_distance for an ensemble.
  std::vector<std::pair<std::string, double>> summary;
};

/// `cfg.output` if set, else <dir>/<name>_<mode>.<csv|jsonl> where dir is
/// $QSD_OUTPUT_DIR or the working directory.
std::filesystem::path output_path(const RunConfig& cfg, Mode mode);

/// Runs one pipeline and writes its data file.
///   trajectory: one run, fork 0 of the master seed
///   ensemble:   cfg.trajectories runs, observable means and standard errors,
///               plus the trace distance to the master-equation solution when
///               cfg.compare_oracle is set
///   oracle:     master-equation expectations
///   classical:  kaos classical Poincare section, xi(0) = 0
///   poincare:   kaos quantum Poincare section of <a>
CommandOutcome run_command(const RunConfig& cfg, Mode mode);

}  // namespace qsd
