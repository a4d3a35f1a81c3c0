#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flow_engine.hpp"
#include "scenarios.hpp"

namespace imcf {

enum class Subcommand { certify, run, oracle, report };

const char* subcommand_name(Subcommand s);
Subcommand parse_subcommand(const std::string& text);

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// `key = value` lines; `#` starts a comment. Duplicate keys and lines without '=' are ParseErrors.
std::vector<KeyValue> parse_key_values(const std::string& text);

struct RunConfig {
  Subcommand subcommand = Subcommand::run;
  std::string scenario = "hyperbolic";  // catalogue id or scenario-file path
  std::map<std::string, double> params;  // catalogue parameters, `param.<name>`
  std::optional<double> plan_r_min, plan_r_max;
  int plan_r_count = 96;
  int plan_cone_samples = 16;
  int plan_angular_samples = 8;
  FlowMode mode = FlowMode::rot_sym;
  double T = 1.0;
  int resolution = 64;
  double safety = 0.2;
  int steps = 0;
  double dt_max = 2e-3;
  int checkpoint_every = 0;
  int threads = 1;
  std::string out;
  std::uint64_t seed = 0;
  std::optional<double> c0_rate;
  std::string upper_exponent = "alpha";
  int oracle_samples = 100;
  int oracle_states = 20;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);
void validate_config(const RunConfig& config);

ScenarioSpec parse_scenario_text(const std::string& text);
std::string serialize_scenario(const ScenarioSpec& spec);

// Catalogue id, or a scenario file resolved against base_dir when relative.
Scenario load_scenario(const RunConfig& config, const std::string& base_dir);

std::string read_text_file(const std::string& path);

}  // namespace imcf
