#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsd/integrator.hpp"
#include "qsd/kaos.hpp"

namespace qsd {

enum class OutputFormat { Csv, JsonLines };

/// "csv" or "jsonl" / "json-lines"; throws Error(Config) otherwise.
OutputFormat parse_format(std::string_view text);
std::string_view format_name(OutputFormat format);

/// git-describe style version of this build.
std::string_view version();

/// Named numeric columns. Every row has one value per column.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Provenance written ahead of the data. Empty fields are omitted; a default
/// header writes nothing.
struct OutputHeader {
  std::string tool;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string config;  // resolved config document, may span lines
};

/// CSV: '#' comment lines for the header, then a column row, then data rows.
/// JSON-lines: an optional {"meta": ...} line, then one object per row.
/// Numbers carry 17 significant digits.
void write_table(std::ostream& out, const Table& table, OutputFormat format,
                 const OutputHeader& header = {});

/// write_table into `path`, creating parent directories. I/O failures throw
/// Error(Io) naming the path.
void emit_table(const Table& table, const std::filesystem::path& path,
                OutputFormat format, const OutputHeader& header = {});

/// Reads a CSV written by write_table, skipping comment lines.
Table read_csv(std::istream& in);

/// Columns: t, <name>_re, <name>_im per observable, var_<name> per hermitian
/// observable, norm_drift, leak.
Table series_table(std::span<const TrajectoryRecord> records,
                   std::span<const Observable> observables);

/// Columns: period_index, re, im.
Table poincare_table(std::span<const PoincarePoint> points);

void emit_series(std::span<const TrajectoryRecord> records,
                 std::span<const Observable> observables,
                 const std::filesystem::path& path, OutputFormat format,
                 const OutputHeader& header = {});

/// Formats v with 17 significant digits ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double v);

}  // namespace qsd
