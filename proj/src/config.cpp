#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace imcf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void invalid(const KeyValue& kv, const std::string& why) {
  fail(ErrorCode::validation, "invalid value for '" + kv.key + "' (line " + std::to_string(kv.line) + "): " + why);
}

[[noreturn]] void invalid_key(const std::string& key, const std::string& why) {
  fail(ErrorCode::validation, "invalid value for '" + key + "': " + why);
}

double to_double(const KeyValue& kv) {
  const std::string& v = kv.value;
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) invalid(kv, "expected a finite number");
  return out;
}

long long to_integer(const KeyValue& kv) {
  const std::string& v = kv.value;
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) invalid(kv, "expected an integer");
  return out;
}

int to_int(const KeyValue& kv) {
  long long v = to_integer(kv);
  if (v < -1000000000LL || v > 1000000000LL) invalid(kv, "integer out of range");
  return static_cast<int>(v);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_verdict(const KeyValue& kv) {
  if (kv.value == "PASS") return true;
  if (kv.value == "FAIL") return false;
  invalid(kv, "expected PASS or FAIL");
}

const std::map<std::string, std::set<std::string>>& lambda_keys() {
  static const std::map<std::string, std::set<std::string>> m{
      {"euclidean", {}}, {"hyperbolic", {}},           {"example1", {"l", "p", "q", "r_min"}},
      {"sqrt", {"scale"}}, {"combo", {"a", "k", "b", "c", "r_min"}}};
  return m;
}

const std::map<std::string, std::set<std::string>>& factor_keys() {
  static const std::map<std::string, std::set<std::string>> m{
      {"zero", {}},           {"constant", {"c"}},          {"log", {}},
      {"power", {"a", "m"}}, {"separable", {"a", "m", "eps"}}, {"dipole", {"a", "m", "eps"}},
      {"bump", {"a", "support"}}};
  return m;
}

}  // namespace

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::certify: return "certify";
    case Subcommand::run: return "run";
    case Subcommand::oracle: return "oracle";
    case Subcommand::report: return "report";
  }
  return "?";
}

Subcommand parse_subcommand(const std::string& text) {
  for (Subcommand s : {Subcommand::certify, Subcommand::run, Subcommand::oracle, Subcommand::report})
    if (text == subcommand_name(s)) return s;
  fail(ErrorCode::validation, "invalid value for 'subcommand': unknown subcommand '" + text + "'");
}

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse, "line " + std::to_string(line) + ": expected 'key = value'");
    KeyValue kv{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (kv.key.empty()) fail(ErrorCode::parse, "line " + std::to_string(line) + ": empty key");
    if (kv.value.empty())
      fail(ErrorCode::parse, "line " + std::to_string(line) + ": key '" + kv.key + "' has no value");
    if (!seen.insert(kv.key).second)
      fail(ErrorCode::parse, "line " + std::to_string(line) + ": duplicate key '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  for (const KeyValue& kv : parse_key_values(text)) {
    const std::string& k = kv.key;
    if (k == "subcommand") {
      c.subcommand = parse_subcommand(kv.value);
    } else if (k == "scenario") {
      c.scenario = kv.value;
    } else if (k.rfind("param.", 0) == 0 && k.size() > 6) {
      c.params[k.substr(6)] = to_double(kv);
    } else if (k == "plan.r_min") {
      c.plan_r_min = to_double(kv);
    } else if (k == "plan.r_max") {
      c.plan_r_max = to_double(kv);
    } else if (k == "plan.r_count") {
      c.plan_r_count = to_int(kv);
    } else if (k == "plan.cone_samples") {
      c.plan_cone_samples = to_int(kv);
    } else if (k == "plan.angular_samples") {
      c.plan_angular_samples = to_int(kv);
    } else if (k == "mode") {
      try {
        c.mode = parse_flow_mode(kv.value);
      } catch (const Error&) {
        invalid(kv, "expected rot_sym, axisym or full_s2");
      }
    } else if (k == "T") {
      c.T = to_double(kv);
    } else if (k == "resolution") {
      c.resolution = to_int(kv);
    } else if (k == "safety") {
      c.safety = to_double(kv);
    } else if (k == "steps") {
      c.steps = to_int(kv);
    } else if (k == "dt_max") {
      c.dt_max = to_double(kv);
    } else if (k == "checkpoint_every") {
      c.checkpoint_every = to_int(kv);
    } else if (k == "threads") {
      c.threads = to_int(kv);
    } else if (k == "out") {
      c.out = kv.value;
    } else if (k == "seed") {
      std::uint64_t s = 0;
      const char* b = kv.value.data();
      auto [end, ec] = std::from_chars(b, b + kv.value.size(), s);
      if (ec != std::errc() || end != b + kv.value.size()) invalid(kv, "expected a non-negative 64-bit integer");
      c.seed = s;
    } else if (k == "monitor.c0_rate") {
      c.c0_rate = to_double(kv);
    } else if (k == "monitor.upper_exponent") {
      c.upper_exponent = kv.value;
    } else if (k == "oracle.samples") {
      c.oracle_samples = to_int(kv);
    } else if (k == "oracle.states") {
      c.oracle_states = to_int(kv);
    } else {
      fail(ErrorCode::parse, "line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
    }
  }
  validate_config(c);
  return c;
}

void validate_config(const RunConfig& c) {
  if (c.scenario.empty()) invalid_key("scenario", "must not be empty");
  if (!(c.T > 0.0)) invalid_key("T", "flow horizon must be positive");
  if (!(c.safety > 0.0 && c.safety <= 0.5)) invalid_key("safety", "must lie in (0, 0.5]");
  if (c.mode == FlowMode::axisym && c.resolution < 16) invalid_key("resolution", "axisym needs at least 16 nodes");
  if (c.mode == FlowMode::full_s2 && c.resolution < 8) invalid_key("resolution", "full_s2 needs at least 8 nodes");
  if (c.resolution < 1 || c.resolution > 4096) invalid_key("resolution", "must lie in [1, 4096]");
  if (c.steps < 0) invalid_key("steps", "must be non-negative");
  if (!(c.dt_max > 0.0)) invalid_key("dt_max", "must be positive");
  if (c.checkpoint_every < 0) invalid_key("checkpoint_every", "must be non-negative");
  if (c.threads < 1 || c.threads > 256) invalid_key("threads", "must lie in [1, 256]");
  if (c.plan_r_count < 2) invalid_key("plan.r_count", "needs at least 2 radii");
  if (c.plan_cone_samples < 8) invalid_key("plan.cone_samples", "needs at least 8 samples");
  if (c.plan_angular_samples < 1) invalid_key("plan.angular_samples", "needs at least 1 sample");
  if (c.plan_r_min && c.plan_r_max && !(*c.plan_r_max > *c.plan_r_min))
    invalid_key("plan.r_max", "must exceed plan.r_min");
  if (c.c0_rate && !(*c.c0_rate > 0.0)) invalid_key("monitor.c0_rate", "must be positive");
  if (c.upper_exponent != "alpha" && c.upper_exponent != "gamma")
    invalid_key("monitor.upper_exponent", "expected alpha or gamma");
  if (c.oracle_samples < 1) invalid_key("oracle.samples", "must be positive");
  if (c.oracle_states < 0) invalid_key("oracle.states", "must be non-negative");
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "subcommand = " << subcommand_name(c.subcommand) << "\n";
  o << "scenario = " << c.scenario << "\n";
  for (const auto& [k, v] : c.params) o << "param." << k << " = " << fmt(v) << "\n";
  if (c.plan_r_min) o << "plan.r_min = " << fmt(*c.plan_r_min) << "\n";
  if (c.plan_r_max) o << "plan.r_max = " << fmt(*c.plan_r_max) << "\n";
  o << "plan.r_count = " << c.plan_r_count << "\n";
  o << "plan.cone_samples = " << c.plan_cone_samples << "\n";
  o << "plan.angular_samples = " << c.plan_angular_samples << "\n";
  o << "mode = " << flow_mode_name(c.mode) << "\n";
  o << "T = " << fmt(c.T) << "\n";
  o << "resolution = " << c.resolution << "\n";
  o << "safety = " << fmt(c.safety) << "\n";
  o << "steps = " << c.steps << "\n";
  o << "dt_max = " << fmt(c.dt_max) << "\n";
  o << "checkpoint_every = " << c.checkpoint_every << "\n";
  o << "threads = " << c.threads << "\n";
  if (!c.out.empty()) o << "out = " << c.out << "\n";
  o << "seed = " << c.seed << "\n";
  if (c.c0_rate) o << "monitor.c0_rate = " << fmt(*c.c0_rate) << "\n";
  o << "monitor.upper_exponent = " << c.upper_exponent << "\n";
  o << "oracle.samples = " << c.oracle_samples << "\n";
  o << "oracle.states = " << c.oracle_states << "\n";
  return o.str();
}

ScenarioSpec parse_scenario_text(const std::string& text) {
  std::vector<KeyValue> kvs = parse_key_values(text);
  ScenarioSpec s;
  s.lambda_family = "euclidean";
  auto base = std::find_if(kvs.begin(), kvs.end(), [](const KeyValue& kv) { return kv.key == "base"; });
  if (base != kvs.end()) {
    s = catalogue_spec(base->value, {});
    s.expect_lte.reset();
    s.expect_asym.reset();
    s.expect_lte_failures.clear();
    s.tags.clear();
  }
  std::vector<const KeyValue*> lambda_params, factor_params;
  bool init_kind_set = false;
  for (const KeyValue& kv : kvs) {
    const std::string& k = kv.key;
    if (k == "base") {
      continue;
    } else if (k == "id") {
      s.id = kv.value;
    } else if (k == "n") {
      s.n = to_int(kv);
    } else if (k == "lambda.family") {
      if (!lambda_keys().count(kv.value)) invalid(kv, "unknown lambda family '" + kv.value + "'");
      if (kv.value != s.lambda_family) s.lambda_params.clear();
      s.lambda_family = kv.value;
    } else if (k.rfind("lambda.", 0) == 0) {
      lambda_params.push_back(&kv);
    } else if (k == "f.family") {
      if (!factor_keys().count(kv.value)) invalid(kv, "unknown f family '" + kv.value + "'");
      if (kv.value != s.f_family) s.f_params.clear();
      s.f_family = kv.value;
    } else if (k.rfind("f.", 0) == 0) {
      factor_params.push_back(&kv);
    } else if (k == "fiber.rho1") {
      s.band.rho1 = to_double(kv);
    } else if (k == "fiber.rho2") {
      s.band.rho2 = to_double(kv);
    } else if (k == "cone.theta1") {
      s.cone.theta1 = to_double(kv);
    } else if (k == "cone.theta2") {
      s.cone.theta2 = to_double(kv);
    } else if (k == "init.kind") {
      if (kv.value == "sphere") s.init.kind = InitKind::sphere;
      else if (kv.value == "perturbed") s.init.kind = InitKind::perturbed;
      else invalid(kv, "expected sphere or perturbed");
      init_kind_set = true;
    } else if (k == "init.r0") {
      s.init.r0 = to_double(kv);
    } else if (k == "init.degree") {
      s.init.degree = to_int(kv);
    } else if (k == "init.amplitude") {
      s.init.amplitude = to_double(kv);
    } else if (k == "init.azimuthal_amplitude") {
      s.init.azimuthal_amplitude = to_double(kv);
    } else if (k == "asym.alpha") {
      s.asym.alpha = to_double(kv);
    } else if (k == "asym.beta") {
      s.asym.beta = to_double(kv);
    } else if (k == "asym.gamma") {
      s.asym.gamma = to_double(kv);
    } else if (k == "asym.C1") {
      s.asym.C1 = to_double(kv);
    } else if (k == "asym.C2") {
      s.asym.C2 = to_double(kv);
    } else if (k == "asym.C3") {
      s.asym.C3 = to_double(kv);
    } else if (k == "asym.C4") {
      s.asym.C4 = to_double(kv);
    } else if (k == "lte.delta1") {
      s.delta1 = to_double(kv);
    } else if (k == "lte.delta2") {
      s.delta2 = to_double(kv);
    } else if (k == "lte.ricci_C") {
      s.ricci_C = to_double(kv);
    } else if (k == "plan.r_min") {
      s.plan_r_min = to_double(kv);
    } else if (k == "plan.r_max") {
      s.plan_r_max = to_double(kv);
    } else if (k == "expect.lte") {
      s.expect_lte = to_verdict(kv);
    } else if (k == "expect.asym") {
      s.expect_asym = to_verdict(kv);
    } else if (k == "expect.lte_failures") {
      s.expect_lte_failures = split_list(kv.value);
    } else if (k == "tags") {
      s.tags = split_list(kv.value);
    } else {
      fail(ErrorCode::parse, "line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
    }
  }
  for (const KeyValue* kv : lambda_params) {
    std::string name = kv->key.substr(7);
    if (!lambda_keys().at(s.lambda_family).count(name))
      fail(ErrorCode::parse, "line " + std::to_string(kv->line) + ": unknown key '" + kv->key + "' for lambda family " +
                                 s.lambda_family);
    s.lambda_params[name] = to_double(*kv);
  }
  for (const KeyValue* kv : factor_params) {
    std::string name = kv->key.substr(2);
    if (!factor_keys().at(s.f_family).count(name))
      fail(ErrorCode::parse,
           "line " + std::to_string(kv->line) + ": unknown key '" + kv->key + "' for f family " + s.f_family);
    s.f_params[name] = to_double(*kv);
  }
  if (!init_kind_set && (s.init.amplitude != 0.0 || s.init.azimuthal_amplitude != 0.0))
    s.init.kind = InitKind::perturbed;
  if (s.id.empty()) fail(ErrorCode::validation, "invalid value for 'id': scenario files must name an id");
  return s;
}

std::string serialize_scenario(const ScenarioSpec& s) {
  std::ostringstream o;
  o << "id = " << s.id << "\n";
  o << "n = " << s.n << "\n";
  o << "lambda.family = " << s.lambda_family << "\n";
  for (const auto& [k, v] : s.lambda_params) o << "lambda." << k << " = " << fmt(v) << "\n";
  o << "f.family = " << s.f_family << "\n";
  for (const auto& [k, v] : s.f_params) o << "f." << k << " = " << fmt(v) << "\n";
  o << "fiber.rho1 = " << fmt(s.band.rho1) << "\n";
  o << "fiber.rho2 = " << fmt(s.band.rho2) << "\n";
  o << "cone.theta1 = " << fmt(s.cone.theta1) << "\n";
  o << "cone.theta2 = " << fmt(s.cone.theta2) << "\n";
  o << "init.kind = " << (s.init.kind == InitKind::sphere ? "sphere" : "perturbed") << "\n";
  o << "init.r0 = " << fmt(s.init.r0) << "\n";
  o << "init.degree = " << s.init.degree << "\n";
  o << "init.amplitude = " << fmt(s.init.amplitude) << "\n";
  o << "init.azimuthal_amplitude = " << fmt(s.init.azimuthal_amplitude) << "\n";
  o << "asym.alpha = " << fmt(s.asym.alpha) << "\n";
  o << "asym.beta = " << fmt(s.asym.beta) << "\n";
  o << "asym.gamma = " << fmt(s.asym.gamma) << "\n";
  o << "asym.C1 = " << fmt(s.asym.C1) << "\n";
  o << "asym.C2 = " << fmt(s.asym.C2) << "\n";
  o << "asym.C3 = " << fmt(s.asym.C3) << "\n";
  o << "asym.C4 = " << fmt(s.asym.C4) << "\n";
  o << "lte.delta1 = " << fmt(s.delta1) << "\n";
  o << "lte.delta2 = " << fmt(s.delta2) << "\n";
  o << "lte.ricci_C = " << fmt(s.ricci_C) << "\n";
  o << "plan.r_min = " << fmt(s.plan_r_min) << "\n";
  o << "plan.r_max = " << fmt(s.plan_r_max) << "\n";
  if (s.expect_lte) o << "expect.lte = " << (*s.expect_lte ? "PASS" : "FAIL") << "\n";
  if (s.expect_asym) o << "expect.asym = " << (*s.expect_asym ? "PASS" : "FAIL") << "\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const std::string& x : v) out += (out.empty() ? "" : ",") + x;
    return out;
  };
  if (!s.expect_lte_failures.empty()) o << "expect.lte_failures = " << join(s.expect_lte_failures) << "\n";
  if (!s.tags.empty()) o << "tags = " << join(s.tags) << "\n";
  return o.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::io, "error while reading '" + path + "'");
  return ss.str();
}

Scenario load_scenario(const RunConfig& c, const std::string& base_dir) {
  auto ids = catalogue_ids();
  ScenarioSpec spec;
  if (std::find(ids.begin(), ids.end(), c.scenario) != ids.end()) {
    spec = catalogue_spec(c.scenario, c.params);
  } else {
    std::filesystem::path p(c.scenario);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p))
      fail(ErrorCode::unknown_scenario, "'" + c.scenario + "' is neither a catalogue id nor a readable scenario file");
    if (!c.params.empty())
      fail(ErrorCode::validation, "invalid value for 'param." + c.params.begin()->first +
                                      "': catalogue parameters do not apply to scenario files");
    try {
      spec = parse_scenario_text(read_text_file(p.string()));
    } catch (const Error& e) {
      fail(e.code(), p.string() + ": " + e.what());
    }
  }
  if (c.plan_r_min) spec.plan_r_min = *c.plan_r_min;
  if (c.plan_r_max) spec.plan_r_max = *c.plan_r_max;
  return build_scenario(spec);
}

}  // namespace imcf
