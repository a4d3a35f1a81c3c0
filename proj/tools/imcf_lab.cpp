#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "imcf/imcf.h"

namespace {

constexpr int kUsage = 2;

int report_error(int code, const char* context) {
  std::fprintf(stderr, "imcf-lab: %s: %s: %s\n", context, imcf_error_name(code), imcf_last_error());
  return code == IMCF_E_INTERNAL ? 1 : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for inverse mean curvature flow in conformally warped products", "imcf-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(imcf_version()));

  std::string config_path, out_dir;
  std::int64_t seed = -1;
  bool quiet = false;
  const char* subcommands[][2] = {
      {"certify", "Certify the scenario's hypotheses and write certificate reports"},
      {"run", "Run the flow, write the trajectory, checkpoints and monitor verdicts"},
      {"oracle", "Cross-check analytic curvature and graph geometry against finite-difference oracles"},
      {"report", "Merge prior outputs in the output directory into one summary"}};
  for (auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file (key = value lines)")->required();
    sub->add_option("--out", out_dir, "Output directory (default: config 'out', then $IMCF_LAB_OUT)");
    sub->add_option("--seed", seed, "Sampling seed, overrides the config")->check(CLI::NonNegativeNumber);
    sub->add_flag("-q,--quiet", quiet, "Suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  std::string sub = app.get_subcommands().front()->get_name();
  imcf_config* config = nullptr;
  int rc = imcf_config_load(config_path.c_str(), &config);
  if (rc != IMCF_OK) return report_error(rc, config_path.c_str());

  int status = kUsage;
  rc = imcf_config_set_subcommand(config, sub.c_str());
  if (rc == IMCF_OK && seed >= 0) rc = imcf_config_set_seed(config, static_cast<std::uint64_t>(seed));
  if (rc == IMCF_OK) {
    std::string base = std::filesystem::path(config_path).parent_path().string();
    rc = imcf_execute(config, base.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), quiet ? 0 : 1, &status);
  }
  imcf_config_free(config);
  if (rc != IMCF_OK) return report_error(rc, sub.c_str());
  return status;
}
