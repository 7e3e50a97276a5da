#include "qsd/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "qsd/error.hpp"

#ifndef QSD_VERSION_STRING
#define QSD_VERSION_STRING "unknown"
#endif

namespace qsd {

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "jsonl" || text == "json-lines") return OutputFormat::JsonLines;
  throw Error(ErrorKind::Config,
              "unknown output format '" + std::string(text) + "' (csv or jsonl)");
}

std::string_view format_name(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "jsonl";
}

std::string_view version() { return QSD_VERSION_STRING; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, end);
}

namespace {

void write_csv(std::ostream& out, const Table& table, const OutputHeader& header) {
  if (!header.tool.empty()) out << "# " << header.tool << ' ' << version() << '\n';
  if (header.has_seed) out << "# seed: " << header.seed << '\n';
  if (!header.config.empty()) {
    out << "# config:\n";
    std::istringstream lines(header.config);
    for (std::string line; std::getline(lines, line);) out << "#   " << line << '\n';
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_double(row[c]);
    }
    out << '\n';
  }
}

std::string json_number(double v) {
  return std::isfinite(v) ? format_double(v) : "null";
}

void write_jsonl(std::ostream& out, const Table& table, const OutputHeader& header) {
  if (!header.tool.empty() || header.has_seed || !header.config.empty()) {
    nlohmann::ordered_json meta;
    meta["tool"] = header.tool;
    meta["version"] = std::string(version());
    if (header.has_seed) meta["seed"] = header.seed;
    if (!header.config.empty()) meta["config"] = header.config;
    out << nlohmann::ordered_json{{"meta", meta}}.dump() << '\n';
  }
  std::vector<std::string> keys;
  keys.reserve(table.columns.size());
  for (const auto& c : table.columns) keys.push_back(nlohmann::json(c).dump());
  for (const auto& row : table.rows) {
    out << '{';
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << keys[c] << ':' << json_number(row[c]);
    }
    out << "}\n";
  }
}

}  // namespace

void write_table(std::ostream& out, const Table& table, OutputFormat format,
                 const OutputHeader& header) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw Error(ErrorKind::Contract, "table row width does not match its columns");
    }
  }
  if (format == OutputFormat::Csv) write_csv(out, table, header);
  else write_jsonl(out, table, header);
}

void emit_table(const Table& table, const std::filesystem::path& path,
                OutputFormat format, const OutputHeader& header) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_table(out, table, format, header);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw Error(ErrorKind::Parse, "row with " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c == "nan") { row.push_back(std::nan("")); continue; }
      if (c == "inf") { row.push_back(HUGE_VAL); continue; }
      if (c == "-inf") { row.push_back(-HUGE_VAL); continue; }
      double v = 0.0;
      auto [end, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || end != c.data() + c.size()) {
        throw Error(ErrorKind::Parse, "bad number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table series_table(std::span<const TrajectoryRecord> records,
                   std::span<const Observable> observables) {
  Table t;
  t.columns.push_back("t");
  for (const auto& ob : observables) {
    t.columns.push_back(ob.name + "_re");
    t.columns.push_back(ob.name + "_im");
  }
  for (const auto& ob : observables) {
    if (ob.op.hermitian_hint()) t.columns.push_back("var_" + ob.name);
  }
  t.columns.push_back("norm_drift");
  t.columns.push_back("leak");
  for (const auto& r : records) {
    if (r.expectations.size() != observables.size()) {
      throw Error(ErrorKind::Contract, "record does not match the observable list");
    }
    std::vector<double> row{r.t};
    for (const auto& e : r.expectations) {
      row.push_back(e.real());
      row.push_back(e.imag());
    }
    row.insert(row.end(), r.variances.begin(), r.variances.end());
    row.push_back(r.norm_drift);
    row.push_back(r.top_level_leak);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table poincare_table(std::span<const PoincarePoint> points) {
  Table t{{"period_index", "re", "im"}, {}};
  for (const auto& p : points) t.rows.push_back({double(p.period_index), p.re, p.im});
  return t;
}

void emit_series(std::span<const TrajectoryRecord> records,
                 std::span<const Observable> observables,
                 const std::filesystem::path& path, OutputFormat format,
                 const OutputHeader& header) {
  if (records.empty()) throw Error(ErrorKind::Contract, "no records to write");
  emit_table(series_table(records, observables), path, format, header);
}

}  // namespace qsd
