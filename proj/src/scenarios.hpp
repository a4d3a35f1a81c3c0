#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "certifier.hpp"
#include "metric_kernel.hpp"

namespace imcf {

enum class InitKind { sphere, perturbed };

// F(θ, ϕ, 0) = r0·(1 + amplitude·P_degree(cos θ) + azimuthal_amplitude·sin θ·cos ϕ)
struct InitialSurface {
  InitKind kind = InitKind::sphere;
  double r0 = 1.0;
  int degree = 2;
  double amplitude = 0.0;
  double azimuthal_amplitude = 0.0;
};

double legendre(int degree, double x);
double initial_radius(const InitialSurface& init, double theta, double phi);

// Flat, serializable description of a scenario; the catalogue and scenario files both produce one.
struct ScenarioSpec {
  std::string id;
  int n = 2;
  std::string lambda_family = "hyperbolic";
  std::map<std::string, double> lambda_params;
  std::string f_family = "zero";
  std::map<std::string, double> f_params;
  FiberCurvatureBand band;
  ConeSpec cone{0.5235987755982988, 0.5235987755982988};
  InitialSurface init;
  AsymptoticParams asym;
  double delta1 = 0.0;
  double delta2 = 1e300;
  double ricci_C = 1e3;
  double plan_r_min = 1.0;
  double plan_r_max = 20.0;
  std::optional<bool> expect_lte;
  std::optional<bool> expect_asym;
  std::vector<std::string> expect_lte_failures;
  std::vector<std::string> tags;
};

struct Scenario {
  ScenarioSpec spec;
  Ambient ambient;

  const std::string& id() const { return spec.id; }
  int n() const { return ambient.n; }
  const ConeSpec& cone() const { return spec.cone; }
  const InitialSurface& init() const { return spec.init; }
  LteOptions lte_options(unsigned threads = 1) const;
  SamplingPlan default_plan(std::uint64_t seed = 0, int r_count = 96, int cone_samples = 16,
                            int angular_samples = 8) const;
  bool has_tag(const std::string& tag) const;
};

std::vector<std::string> catalogue_ids();
ScenarioSpec catalogue_spec(const std::string& id, const std::map<std::string, double>& params);
Scenario build_scenario(const ScenarioSpec& spec);
Scenario make_scenario(const std::string& id, const std::map<std::string, double>& params = {});

}  // namespace imcf
