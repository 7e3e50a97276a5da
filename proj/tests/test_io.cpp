#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "qsd/commands.hpp"
#include "qsd/config.hpp"
#include "qsd/error.hpp"
#include "qsd/output.hpp"
#include "support.hpp"

using namespace qsd;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Contract;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qsd_test_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("config") {

TEST_CASE("scenario document gives the preset defaults") {
  const RunConfig cfg = parse_config("scenario: fig5\n");
  const Scenario s = resolve(cfg);
  const Scenario p = preset("fig5");
  CHECK(s.name == "fig5");
  CHECK(s.model.dim() == p.model.dim());
  CHECK(s.config.dt == p.config.dt);
  CHECK(s.config.t_final == p.config.t_final);
  CHECK(s.config.seed == kDefaultSeed);
  CHECK(cfg.trajectories == 1);
}

TEST_CASE("inline driven damped oscillator") {
  const RunConfig cfg = parse_config(
      "hamiltonian: \"2i*(adag - a)\"\n"
      "lindblads: a\n"
      "dim: 30\n"
      "t_final: 1.0\n"
      "dt: 0.001\n");
  const Scenario s = resolve(cfg);
  const ref::Mat a = ref::annihilation(30);
  CHECK((ref::Mat(s.model.h_static().entries()) - ref::cd(0, 2) * (a.adjoint() - a)).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(s.model.lindblads().size() == 1);
  CHECK((ref::Mat(s.model.lindblads()[0].entries()) - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.config.dt == 0.001);
  CHECK(s.config.observables.at(0).name == "n");
}

TEST_CASE("non-hermitian lindblad is accepted, hamiltonian is not") {
  CHECK_NOTHROW(parse_config("hamiltonian: n\nlindblads: [\"q*p\"]\ndim: 8\nt_final: 1\n"));
  CHECK(kind_of([] { parse_config("hamiltonian: a\ndim: 8\nt_final: 1\n"); }) == ErrorKind::Config);
}

TEST_CASE("unknown and misplaced keys are rejected with a position") {
  for (const char* doc : {"scenario: fig5\ntua1: 3\n", "scenario: fig5\nkappa: 2\n",
                          "scenario: fig1\nbeta: 2\n", "scenario: fig9\n", "scenario: fig5\ndt: -1\n",
                          "scenario: fig5\ndim: [1, 2]\n", "- just\n- a list\n",
                          "hamiltonian: n\ndim: 8\n", "hamiltonian: \"n +\"\ndim: 8\nt_final: 1\n"}) {
    CAPTURE(doc);
    try {
      parse_config(doc);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Parse ||
             e.kind() == ErrorKind::UnknownScenario));
      CHECK(std::string(e.what()).size() > 10);
    }
  }
  try {
    parse_config("scenario: fig5\nseed: 3\ntua1: 3\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("observables accept names and expressions") {
  const RunConfig cfg = parse_config("scenario: fig3\nobservables:\n  - q\n  - x2: \"q*q\"\n");
  const Scenario s = resolve(cfg);
  REQUIRE(s.config.observables.size() == 2);
  CHECK(s.config.observables[0].name == "q");
  CHECK(s.config.observables[1].name == "x2");
  const CMatrix q = position(s.model.dim()).entries();
  CHECK((s.config.observables[1].op.entries() - q * q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("describe round-trips every preset") {
  for (const auto& [name, summary] : scenario_catalog()) {
    CAPTURE(name);
    RunConfig cfg = scenario_config(name);
    if (name == "kaos") cfg.overrides.periods = 3;
    cfg.overrides.seed = 77;
    const Scenario s = resolve(cfg);
    const std::string doc = describe(cfg, s);
    const RunConfig back = parse_config(doc);
    const Scenario t = resolve(back);
    CHECK(describe(back, t) == doc);
    CHECK(t.config.dt == s.config.dt);
    CHECK(t.config.seed == 77);
    CHECK(t.config.t_final == s.config.t_final);
  }
}

}  // TEST_SUITE("config")

TEST_SUITE("output") {

TEST_CASE("one record, one observable gives two lines") {
  TrajectoryRecord rec;
  rec.t = 0.5;
  rec.expectations = {Complex(1.25, -0.5)};
  const std::vector<Observable> obs{{"a", fock_annihilation(3)}};
  std::ostringstream os;
  write_table(os, series_table(std::span(&rec, 1), obs), OutputFormat::Csv);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind("t,a_re,a_im,norm_drift,leak\n", 0) == 0);
}

TEST_CASE("series columns include variances of hermitian observables") {
  TrajectoryRecord rec;
  rec.expectations = {Complex(1.0), Complex(0.5)};
  rec.variances = {0.25};
  const std::vector<Observable> obs{{"n", fock_number(3)}, {"a", fock_annihilation(3)}};
  const Table t = series_table(std::span(&rec, 1), obs);
  CHECK(t.columns == std::vector<std::string>{"t", "n_re", "n_im", "a_re", "a_im", "var_n", "norm_drift", "leak"});
  CHECK(t.rows[0][5] == 0.25);
  CHECK_THROWS_AS(emit_series({}, obs, "unused.csv", OutputFormat::Csv), Error);
}

TEST_CASE("17-digit round trip") {
  Table t{{"x", "y"}, {}};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) t.rows.push_back({u(rng) * 1e-12, std::ldexp(u(rng), i % 60 - 30)});
  t.rows.push_back({std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()});
  t.rows.push_back({-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::denorm_min()});
  t.rows.push_back({0.1, -0.0});
  std::stringstream ss;
  write_table(ss, t, OutputFormat::Csv, {"tool", 5, true, "scenario: fig1\ndim: 16"});
  const Table back = read_csv(ss);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const double x = t.rows[r][c], y = back.rows[r][c];
      if (std::isnan(x)) CHECK(std::isnan(y));
      else CHECK(x == y);
    }
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("json lines have identical keys per row") {
  Table t{{"t", "n_re", "n_im"}, {{0.0, 1.0, 0.0}, {0.5, 0.75, -0.0}, {1.0, std::nan(""), 2.0}}};
  std::stringstream ss;
  write_table(ss, t, OutputFormat::JsonLines, {"qsd test", 9, true, "scenario: fig5"});
  std::string line;
  std::getline(ss, line);
  const auto meta = nlohmann::json::parse(line);
  CHECK(meta.at("meta").at("seed") == 9);
  int rows = 0;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    CHECK(keys == std::vector<std::string>{"n_im", "n_re", "t"});
    ++rows;
  }
  CHECK(rows == 3);
  std::stringstream plain;
  write_table(plain, t, OutputFormat::JsonLines);
  std::getline(plain, line);
  CHECK(nlohmann::json::parse(line).contains("t"));
}

TEST_CASE("formats") {
  CHECK(parse_format("csv") == OutputFormat::Csv);
  CHECK(parse_format("jsonl") == OutputFormat::JsonLines);
  CHECK(parse_format("json-lines") == OutputFormat::JsonLines);
  CHECK(kind_of([] { parse_format("xml"); }) == ErrorKind::Config);
  CHECK_FALSE(version().empty());
}

TEST_CASE("write failures name the path") {
  TempDir dir;
  const fs::path blocker = dir.path / "file";
  std::ofstream(blocker) << "x";
  const fs::path bad = blocker / "sub" / "out.csv";
  try {
    emit_table(Table{{"t"}, {{1.0}}}, bad, OutputFormat::Csv);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(std::string(e.what()).find(blocker.string()) != std::string::npos);
  }
}

}  // TEST_SUITE("output")

TEST_SUITE("commands") {

TEST_CASE("modes") {
  for (Mode m : {Mode::Trajectory, Mode::Ensemble, Mode::Oracle, Mode::Classical, Mode::Poincare}) {
    CHECK(parse_mode(mode_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_mode("fast"), Error);
}

TEST_CASE("output path defaults") {
  RunConfig cfg = scenario_config("fig1");
  cfg.format = OutputFormat::JsonLines;
  ::setenv("QSD_OUTPUT_DIR", "/tmp/somewhere", 1);
  CHECK(output_path(cfg, Mode::Oracle) == fs::path("/tmp/somewhere/fig1_oracle.jsonl"));
  ::unsetenv("QSD_OUTPUT_DIR");
  CHECK(output_path(cfg, Mode::Trajectory) == fs::path("./fig1_trajectory.jsonl"));
  cfg.output = "x/y.csv";
  CHECK(output_path(cfg, Mode::Trajectory) == fs::path("x/y.csv"));
}

TEST_CASE("trajectory file is self-describing") {
  TempDir dir;
  RunConfig cfg = scenario_config("fig1");
  cfg.overrides.t_final = 1.0;
  cfg.output = (dir.path / "traj.csv").string();
  const CommandOutcome r = run_command(cfg, Mode::Trajectory);
  CHECK(r.rows == 101);
  const std::string text = slurp(r.output);
  CHECK(text.find("# seed: 20240601") != std::string::npos);
  CHECK(text.find("#   scenario: \"fig1\"") != std::string::npos);
  std::ifstream in(r.output);
  const Table t = read_csv(in);
  CHECK(t.columns[1] == "n_re");
  CHECK(t.rows.size() == 101);

  // The embedded config reproduces the file.
  std::string doc;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("#   ", 0) == 0) doc += line.substr(4) + "\n";
  }
  RunConfig again = parse_config(doc);
  again.output = (dir.path / "again.csv").string();
  run_command(again, Mode::Trajectory);
  CHECK(slurp(again.output.value()) == text);
}

TEST_CASE("ensemble files do not depend on workers") {
  TempDir dir;
  RunConfig cfg = parse_config("scenario: fig5\ndim: 6\nt_final: 1\nrecord_stride: 100\ntrajectories: 40\n");
  cfg.workers = 1;
  cfg.output = (dir.path / "w1.csv").string();
  const CommandOutcome a = run_command(cfg, Mode::Ensemble);
  cfg.workers = 4;
  cfg.output = (dir.path / "w4.csv").string();
  const CommandOutcome b = run_command(cfg, Mode::Ensemble);
  CHECK(slurp(a.output) == slurp(b.output));
  CHECK(a.rows == 11);
  bool has_distance = false;
  for (const auto& [k, v] : a.summary) {
    if (k == "max_trace_distance") {
      has_distance = true;
      CHECK(v < 0.5);
    }
  }
  CHECK(has_distance);
}

TEST_CASE("classical section has a row per kept period") {
  TempDir dir;
  RunConfig cfg = scenario_config("kaos");
  cfg.overrides.periods = 40;
  cfg.discard_periods = 10;
  cfg.output = (dir.path / "classical.csv").string();
  const CommandOutcome r = run_command(cfg, Mode::Classical);
  CHECK(r.rows >= 30);
  std::ifstream in(r.output);
  const Table t = read_csv(in);
  CHECK(t.columns == std::vector<std::string>{"period_index", "re", "im"});
  CHECK(t.rows.size() == r.rows);
}

TEST_CASE("oracle mode writes purity") {
  TempDir dir;
  RunConfig cfg = parse_config("scenario: fig3\ndim: 10\nt_final: 2\n");
  cfg.output = (dir.path / "o.jsonl").string();
  cfg.format = OutputFormat::JsonLines;
  const CommandOutcome r = run_command(cfg, Mode::Oracle);
  std::ifstream in(r.output);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(nlohmann::json::parse(line).at("purity").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("classical and poincare need kaos") {
  RunConfig cfg = scenario_config("fig3");
  CHECK(kind_of([&] { run_command(cfg, Mode::Classical); }) == ErrorKind::Config);
}

}  // TEST_SUITE("commands")
