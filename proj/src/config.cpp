#include "qsd/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

#include "qsd/error.hpp"
#include "qsd/expr.hpp"

namespace qsd {

namespace {

std::string where(const YAML::Mark& m) {
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  throw Error(ErrorKind::Config, where(n.Mark()) + ": " + msg);
}

std::string scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
  return n.Scalar();
}

double real_value(const YAML::Node& n, const std::string& key) {
  const std::string s = scalar(n, key);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail(n, "'" + key + "' must be a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t count_value(const YAML::Node& n, const std::string& key) {
  const std::string s = scalar(n, key);
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail(n, "'" + key + "' must be a nonnegative integer, got '" + s + "'");
  }
  return v;
}

// Which scenarios accept a model-specific key; "inline" is the expression model.
const std::map<std::string, std::set<std::string>>& specific_keys() {
  static const std::map<std::string, std::set<std::string>> table{
      {"initial_level", {"fig2", "fig3", "fig4", "fig5", "inline"}},
      {"kappa", {"fig1"}},
      {"gamma", {"fig3", "kaos"}},
      {"nbar", {"fig3"}},
      {"rate", {"fig4"}},
      {"well_center", {"fig4"}},
      {"edge_width", {"fig4"}},
      {"beta", {"kaos"}},
      {"chi", {"kaos"}},
      {"periods", {"kaos"}},
      {"f0", {"kaos", "inline"}},
      {"tau1", {"kaos", "inline"}},
      {"tau2", {"kaos", "inline"}},
  };
  return table;
}

OperatorMatrix checked_eval(const std::string& text, std::size_t dim, const YAML::Node& at) {
  try {
    return OperatorExpr::parse(text).eval(dim);
  } catch (const Error& e) {
    throw Error(e.kind(), where(at.Mark()) + ": in '" + text + "': " + e.what());
  }
}

std::vector<Observable> build_observables(const std::vector<ObservableSpec>& specs,
                                          std::size_t dim) {
  std::vector<Observable> out;
  for (const auto& s : specs) out.push_back({s.name, OperatorExpr::parse(s.expr).eval(dim)});
  return out;
}

Scenario resolve_inline(const RunConfig& cfg) {
  const InlineModel& m = *cfg.model;
  const ScenarioOverrides& o = cfg.overrides;
  if (!o.dim) throw Error(ErrorKind::Config, "an inline model needs 'dim'");
  if (!o.t_final) throw Error(ErrorKind::Config, "an inline model needs 't_final'");
  const std::size_t dim = *o.dim;
  OperatorMatrix h = OperatorExpr::parse(m.hamiltonian).eval(dim);
  if (!h.hermitian_hint()) {
    throw Error(ErrorKind::Config, "hamiltonian '" + m.hamiltonian + "' is not hermitian");
  }
  std::optional<Drive> drive;
  if (m.drive) {
    if (!o.tau1 || !o.tau2 || !o.f0) {
      throw Error(ErrorKind::Config, "a drive needs 'tau1', 'tau2' and 'f0'");
    }
    PulseSchedule sched{*o.tau1, *o.tau2, *o.f0};
    sched.validate();
    drive = Drive{OperatorExpr::parse(*m.drive).eval(dim), sched};
  } else if (o.tau1 || o.tau2 || o.f0) {
    throw Error(ErrorKind::Config, "'tau1', 'tau2' and 'f0' need a 'drive'");
  }
  std::vector<OperatorMatrix> ls;
  for (const auto& l : m.lindblads) ls.push_back(OperatorExpr::parse(l).eval(dim));
  OpenSystemModel model(std::move(h), std::move(ls), std::move(drive));

  TrajectoryConfig tc;
  tc.dt = o.dt ? *o.dt : default_dt(model);
  tc.t_final = *o.t_final;
  tc.record_stride = o.record_stride.value_or(1);
  tc.seed = o.seed.value_or(kDefaultSeed);
  tc.observables = build_observables(
      cfg.observables.empty() ? std::vector<ObservableSpec>{{"n", "n"}} : cfg.observables, dim);
  tc.validate();
  return {"inline", m.hamiltonian, std::move(model),
          StateVector::basis(dim, o.initial_level.value_or(0)), std::move(tc), std::nullopt};
}

void put(std::ostringstream& out, const char* key, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out << key << ": " << std::string_view(buf, std::size_t(end - buf)) << '\n';
}

void put(std::ostringstream& out, const char* key, std::uint64_t v) {
  out << key << ": " << v << '\n';
}

void put(std::ostringstream& out, const char* key, const std::string& v) {
  out << key << ": " << nlohmann::json(v).dump() << '\n';
}

template <class T>
void put(std::ostringstream& out, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, double>) put(out, key, *v);
  else put(out, key, std::uint64_t(*v));
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Parse, where(e.mark) + ": " + e.msg);
  }
  if (!doc.IsMap()) {
    throw Error(ErrorKind::Config, where(doc.Mark()) + ": config must be a key-value mapping");
  }

  RunConfig cfg;
  ScenarioOverrides& o = cfg.overrides;
  std::optional<YAML::Node> ham_node, drive_node, lindblad_node;
  std::vector<YAML::Node> obs_nodes;
  std::map<std::string, YAML::Node> specific;

  for (const auto& kv : doc) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "scenario") cfg.scenario = scalar(v, key);
    else if (key == "dim") o.dim = count_value(v, key);
    else if (key == "dt") o.dt = real_value(v, key);
    else if (key == "t_final") o.t_final = real_value(v, key);
    else if (key == "record_stride") o.record_stride = count_value(v, key);
    else if (key == "seed") o.seed = count_value(v, key);
    else if (key == "trajectories") cfg.trajectories = count_value(v, key);
    else if (key == "batches") cfg.batches = count_value(v, key);
    else if (key == "workers") cfg.workers = unsigned(count_value(v, key));
    else if (key == "discard_periods") cfg.discard_periods = count_value(v, key);
    else if (key == "compare_oracle") {
      if (!YAML::convert<bool>::decode(v, cfg.compare_oracle)) fail(v, "'compare_oracle' must be true or false");
    } else if (key == "leak_limit") cfg.leak_limit = real_value(v, key);
    else if (key == "output") cfg.output = scalar(v, key);
    else if (key == "format") {
      try {
        cfg.format = parse_format(scalar(v, key));
      } catch (const Error& e) {
        fail(v, e.what());
      }
    } else if (key == "hamiltonian") ham_node = v;
    else if (key == "drive") drive_node = v;
    else if (key == "lindblads") lindblad_node = v;
    else if (key == "observables") {
      if (!v.IsSequence()) fail(v, "'observables' must be a list");
      for (const auto& item : v) obs_nodes.push_back(item);
    } else if (specific_keys().count(key)) {
      specific.emplace(key, v);
      if (key == "initial_level") o.initial_level = count_value(v, key);
      else if (key == "periods") o.periods = count_value(v, key);
      else {
        const double x = real_value(v, key);
        if (key == "kappa") o.kappa = x;
        else if (key == "gamma") o.gamma = x;
        else if (key == "nbar") o.nbar = x;
        else if (key == "rate") o.rate = x;
        else if (key == "well_center") o.well_center = x;
        else if (key == "edge_width") o.edge_width = x;
        else if (key == "beta") o.beta = x;
        else if (key == "chi") o.chi = x;
        else if (key == "f0") o.f0 = x;
        else if (key == "tau1") o.tau1 = x;
        else if (key == "tau2") o.tau2 = x;
      }
    } else {
      fail(kv.first, "unknown key '" + key + "'");
    }
  }

  if (cfg.scenario && ham_node) {
    fail(*ham_node, "give either 'scenario' or an inline 'hamiltonian', not both");
  }
  if (!cfg.scenario && !ham_node) {
    throw Error(ErrorKind::Config, "config needs 'scenario' or 'hamiltonian'");
  }
  if (cfg.scenario) {
    if (drive_node) fail(*drive_node, "'drive' only applies to an inline model");
    if (lindblad_node) fail(*lindblad_node, "'lindblads' only applies to an inline model");
  }
  const std::string kind = cfg.scenario ? *cfg.scenario : "inline";
  if (cfg.scenario) {
    bool known = false;
    for (const auto& entry : scenario_catalog()) known = known || entry.first == kind;
    if (!known) {
      throw Error(ErrorKind::UnknownScenario,
                  where(doc["scenario"].Mark()) + ": unknown scenario '" + kind + "'");
    }
  }
  for (const auto& [key, node] : specific) {
    if (!specific_keys().at(key).count(kind)) {
      fail(node, "'" + key + "' does not apply to scenario '" + kind + "'");
    }
  }

  if (ham_node) {
    if (!o.dim) fail(*ham_node, "an inline model needs 'dim'");
    InlineModel m;
    m.hamiltonian = scalar(*ham_node, "hamiltonian");
    const OperatorMatrix h = checked_eval(m.hamiltonian, *o.dim, *ham_node);
    if (!h.hermitian_hint()) fail(*ham_node, "hamiltonian '" + m.hamiltonian + "' is not hermitian");
    if (drive_node) {
      m.drive = scalar(*drive_node, "drive");
      const OperatorMatrix d = checked_eval(*m.drive, *o.dim, *drive_node);
      if (!d.hermitian_hint()) fail(*drive_node, "drive '" + *m.drive + "' is not hermitian");
    }
    if (lindblad_node) {
      const YAML::Node& ln = *lindblad_node;
      if (ln.IsScalar()) {
        m.lindblads.push_back(ln.Scalar());
        checked_eval(m.lindblads.back(), *o.dim, ln);
      } else if (ln.IsSequence()) {
        for (const auto& l : ln) {
          m.lindblads.push_back(scalar(l, "lindblads"));
          checked_eval(m.lindblads.back(), *o.dim, l);
        }
      } else {
        fail(ln, "'lindblads' must be an expression or a list of expressions");
      }
    }
    cfg.model = std::move(m);
  }

  std::size_t dim_for_check = o.dim.value_or(0);
  if (!obs_nodes.empty() && dim_for_check == 0) {
    RunConfig probe;
    probe.scenario = cfg.scenario;
    probe.overrides = o;
    dim_for_check = resolve(probe).model.dim();
  }

  for (const auto& item : obs_nodes) {
    ObservableSpec spec;
    if (item.IsScalar()) {
      spec = {item.Scalar(), item.Scalar()};
    } else if (item.IsMap() && item.size() == 1) {
      const auto entry = *item.begin();
      spec = {entry.first.as<std::string>(), scalar(entry.second, "observables")};
    } else {
      fail(item, "an observable is an expression or a one-entry {name: expression} map");
    }
    checked_eval(spec.expr, dim_for_check, item);
    cfg.observables.push_back(std::move(spec));
  }

  try {
    resolve(cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Parse) throw;
    throw Error(ErrorKind::Config, std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RunConfig scenario_config(std::string_view name) {
  RunConfig cfg;
  cfg.scenario = std::string(name);
  return cfg;
}

Scenario resolve(const RunConfig& cfg) {
  if (cfg.trajectories == 0) throw Error(ErrorKind::Config, "'trajectories' must be >= 1");
  if (cfg.batches == 0) throw Error(ErrorKind::Config, "'batches' must be >= 1");
  Scenario s = cfg.model ? resolve_inline(cfg) : [&] {
    if (!cfg.scenario) throw Error(ErrorKind::Config, "config names no scenario or model");
    return preset(*cfg.scenario, cfg.overrides);
  }();
  if (cfg.model == std::nullopt && !cfg.observables.empty()) {
    s.config.observables = build_observables(cfg.observables, s.model.dim());
  }
  if (cfg.leak_limit) {
    if (!(*cfg.leak_limit > 0.0)) throw Error(ErrorKind::Config, "'leak_limit' must be > 0");
    s.config.leak_limit = *cfg.leak_limit;
  }
  return s;
}

std::string describe(const RunConfig& cfg, const Scenario& resolved) {
  std::ostringstream out;
  const ScenarioOverrides& o = cfg.overrides;
  if (cfg.scenario) put(out, "scenario", *cfg.scenario);
  put(out, "dim", std::uint64_t(resolved.model.dim()));
  if (cfg.model) {
    put(out, "hamiltonian", cfg.model->hamiltonian);
    if (cfg.model->drive) put(out, "drive", *cfg.model->drive);
    if (!cfg.model->lindblads.empty()) {
      out << "lindblads:\n";
      for (const auto& l : cfg.model->lindblads) out << "  - " << nlohmann::json(l).dump() << '\n';
    }
  }
  put(out, "dt", resolved.config.dt);
  put(out, "t_final", resolved.config.t_final);
  put(out, "record_stride", std::uint64_t(resolved.config.record_stride));
  put(out, "seed", resolved.config.seed);
  put(out, "initial_level", o.initial_level);
  put(out, "kappa", o.kappa);
  put(out, "gamma", o.gamma);
  put(out, "nbar", o.nbar);
  put(out, "rate", o.rate);
  put(out, "well_center", o.well_center);
  put(out, "edge_width", o.edge_width);
  put(out, "beta", o.beta);
  put(out, "chi", o.chi);
  put(out, "f0", o.f0);
  put(out, "tau1", o.tau1);
  put(out, "tau2", o.tau2);
  put(out, "periods", o.periods);
  put(out, "leak_limit", resolved.config.leak_limit);
  put(out, "trajectories", std::uint64_t(cfg.trajectories));
  put(out, "batches", std::uint64_t(cfg.batches));
  put(out, "discard_periods", std::uint64_t(cfg.discard_periods));
  out << "compare_oracle: " << (cfg.compare_oracle ? "true" : "false") << '\n';
  out << "observables:\n";
  for (std::size_t i = 0; i < resolved.config.observables.size(); ++i) {
    const std::string& name = resolved.config.observables[i].name;
    const std::string expr = i < cfg.observables.size() ? cfg.observables[i].expr : name;
    out << "  - " << nlohmann::json(name).dump() << ": " << nlohmann::json(expr).dump() << '\n';
  }
  return out.str();
}

}  // namespace qsd
