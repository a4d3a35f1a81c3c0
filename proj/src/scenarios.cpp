#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "errors.hpp"

namespace imcf {

namespace {

constexpr double pi = std::numbers::pi;

double get(const std::map<std::string, double>& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::param_out_of_range, what);
}

int as_int(double v, const std::string& key) {
  require(std::isfinite(v) && v == std::floor(v), key + " must be an integer");
  return static_cast<int>(v);
}

struct CatalogueEntry {
  const char* id;
  std::vector<std::string> keys;
};

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries{
      {"euclidean", {}},
      {"hyperbolic", {}},
      {"hyperbolic_sphere", {}},
      {"example1", {"l", "p", "q"}},
      {"example2_negative", {"scale"}},
      {"example3", {"a", "m"}},
      {"example4", {"a", "m", "eps"}},
      {"constant_f", {"c"}},
      {"compact_f", {"a", "support"}},
  };
  return entries;
}

}  // namespace

double legendre(int degree, double x) {
  if (degree == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < degree; ++k) {
    double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double initial_radius(const InitialSurface& init, double theta, double phi) {
  if (init.kind == InitKind::sphere) return init.r0;
  return init.r0 * (1.0 + init.amplitude * legendre(init.degree, std::cos(theta)) +
                    init.azimuthal_amplitude * std::sin(theta) * std::cos(phi));
}

std::vector<std::string> catalogue_ids() {
  std::vector<std::string> ids;
  for (const auto& e : catalogue()) ids.push_back(e.id);
  return ids;
}

ScenarioSpec catalogue_spec(const std::string& id, const std::map<std::string, double>& params) {
  auto entry = std::find_if(catalogue().begin(), catalogue().end(), [&](const auto& e) { return id == e.id; });
  if (entry == catalogue().end()) fail(ErrorCode::unknown_scenario, "unknown scenario '" + id + "'");
  std::set<std::string> allowed{"n", "r0", "amplitude", "degree", "azimuthal_amplitude", "theta1", "theta2"};
  allowed.insert(entry->keys.begin(), entry->keys.end());
  for (const auto& [k, v] : params)
    if (!allowed.count(k)) fail(ErrorCode::param_out_of_range, "scenario '" + id + "' has no parameter '" + k + "'");

  ScenarioSpec s;
  s.id = id;
  s.n = as_int(get(params, "n", 2), "n");
  s.init.r0 = get(params, "r0", 1.0);
  s.init.amplitude = get(params, "amplitude", 0.0);
  s.init.degree = as_int(get(params, "degree", 2), "degree");
  s.init.azimuthal_amplitude = get(params, "azimuthal_amplitude", 0.0);
  s.init.kind = (s.init.amplitude != 0.0 || s.init.azimuthal_amplitude != 0.0) ? InitKind::perturbed : InitKind::sphere;
  s.cone.theta1 = get(params, "theta1", pi / 6);
  s.cone.theta2 = get(params, "theta2", pi / 6);

  if (id == "euclidean") {
    s.lambda_family = "euclidean";
    s.expect_lte = true;
    s.expect_asym = false;
  } else if (id == "hyperbolic" || id == "hyperbolic_sphere") {
    s.lambda_family = "hyperbolic";
    s.expect_lte = true;
    s.expect_asym = true;
  } else if (id == "example1") {
    s.lambda_family = "example1";
    s.lambda_params = {{"l", get(params, "l", 1.0)}, {"p", get(params, "p", 0.5)}, {"q", get(params, "q", 1.0)},
                       {"r_min", 0.5}};
    s.init.r0 = get(params, "r0", 2.0);
    s.expect_lte = true;
    s.expect_asym = false;
    if (s.n == 2) s.tags.push_back("R_hat_ge_-6");
  } else if (id == "example2_negative") {
    s.lambda_family = "sqrt";
    s.lambda_params = {{"scale", get(params, "scale", 2.0)}};
    s.expect_lte = false;
    s.expect_lte_failures = {"G_cone"};
    s.expect_asym = false;
  } else if (id == "example3") {
    s.lambda_family = "euclidean";
    s.f_family = "power";
    s.f_params = {{"a", get(params, "a", 0.5)}, {"m", get(params, "m", 1.0)}};
    s.expect_lte = true;
    s.expect_asym = false;
    s.tags.push_back("example3_closed_form");
  } else if (id == "example4") {
    s.lambda_family = "hyperbolic";
    s.f_family = "separable";
    s.f_params = {{"a", get(params, "a", 0.05)}, {"m", get(params, "m", 2.0)}, {"eps", get(params, "eps", 0.2)}};
    s.expect_lte = true;
    s.expect_asym = false;
    s.tags.push_back("R_hat_ge_-6");
  } else if (id == "constant_f") {
    s.lambda_family = "hyperbolic";
    s.f_family = "constant";
    s.f_params = {{"c", get(params, "c", 0.5)}};
    s.expect_lte = true;
    s.expect_asym = false;
  } else if (id == "compact_f") {
    s.lambda_family = "hyperbolic";
    s.f_family = "bump";
    s.f_params = {{"a", get(params, "a", 0.005)}, {"support", get(params, "support", 3.0)}};
    s.expect_lte = true;
    s.expect_asym = true;
  }
  return s;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  require(spec.n >= 1 && spec.n <= 16, "fiber dimension n must lie in [1, 16]");
  Scenario sc;
  sc.spec = spec;
  sc.ambient.n = spec.n;
  sc.ambient.band = spec.band;
  const auto& lp = spec.lambda_params;
  const auto& fp = spec.f_params;
  int n = spec.n;

  if (spec.lambda_family == "euclidean") {
    sc.ambient.profile = euclidean_profile();
  } else if (spec.lambda_family == "hyperbolic") {
    sc.ambient.profile = hyperbolic_profile();
  } else if (spec.lambda_family == "example1") {
    double l = get(lp, "l", 1.0), p = get(lp, "p", 0.5), q = get(lp, "q", 1.0), r_min = get(lp, "r_min", 0.5);
    require(n >= 2, "example1 warping requires n >= 2");
    double bound = std::sqrt(n * (n - 1.0));
    require(p > 0.0 && p <= 1.0 / (n - 1.0) + 1e-15, "example1 requires 0 < p <= 1/(n-1)");
    require(l > 0.0 && l <= bound + 1e-15, "example1 requires 0 < l <= sqrt(n(n-1))");
    require(q > 0.0 && q <= bound + 1e-15, "example1 requires 0 < q <= sqrt(n(n-1))");
    require(r_min > 0.0, "example1 requires r_min > 0");
    sc.ambient.profile = example1_profile(l, p, q, r_min);
  } else if (spec.lambda_family == "sqrt") {
    double scale = get(lp, "scale", 2.0);
    require(scale > 0.0, "sqrt warping requires scale > 0");
    sc.ambient.profile = sqrt_profile(scale);
  } else if (spec.lambda_family == "combo") {
    sc.ambient.profile = combo_profile(get(lp, "a", 1.0), get(lp, "k", 1.0), get(lp, "b", 0.0), get(lp, "c", 0.0),
                                       get(lp, "r_min", 1e-9));
  } else {
    fail(ErrorCode::param_out_of_range, "unknown lambda family '" + spec.lambda_family + "'");
  }

  if (spec.f_family == "zero") {
    sc.ambient.factor = zero_factor();
  } else if (spec.f_family == "constant") {
    sc.ambient.factor = constant_factor(get(fp, "c", 0.0));
  } else if (spec.f_family == "log") {
    require(sc.ambient.profile.r_min > 0.0, "log factor needs r_min > 0");
    sc.ambient.factor = log_factor();
  } else if (spec.f_family == "power") {
    require(get(fp, "m", 1.0) > 0.0, "power factor needs m > 0");
    sc.ambient.factor = power_factor(get(fp, "a", 0.0), get(fp, "m", 1.0));
  } else if (spec.f_family == "separable") {
    require(n >= 2, "separable factor needs n >= 2");
    sc.ambient.factor = separable_factor(get(fp, "a", 0.0), get(fp, "m", 1.0), get(fp, "eps", 0.0));
  } else if (spec.f_family == "dipole") {
    require(n == 2, "dipole factor needs n = 2");
    sc.ambient.factor = dipole_factor(get(fp, "a", 0.0), get(fp, "m", 1.0), get(fp, "eps", 0.0));
  } else if (spec.f_family == "bump") {
    require(get(fp, "support", 1.0) > 0.0, "bump factor needs support > 0");
    sc.ambient.factor = bump_factor(get(fp, "a", 0.0), get(fp, "support", 1.0));
  } else {
    fail(ErrorCode::param_out_of_range, "unknown f family '" + spec.f_family + "'");
  }

  require(spec.band.rho1 <= spec.band.rho2, "fiber band requires rho1 <= rho2");
  auto angle_ok = [](double t) { return t >= 0.0 && t < pi / 2; };
  require(angle_ok(spec.cone.theta1) && angle_ok(spec.cone.theta2), "cone angles must lie in [0, pi/2)");
  require(spec.init.r0 > sc.ambient.profile.r_min, "initial radius r0 must exceed r_min");
  require(spec.init.degree >= 0 && spec.init.degree <= 12, "perturbation degree must lie in [0, 12]");
  require(std::abs(spec.init.amplitude) + std::abs(spec.init.azimuthal_amplitude) < 0.5,
          "perturbation amplitudes must sum to less than 0.5");
  require(spec.plan_r_max > spec.plan_r_min && spec.plan_r_min >= sc.ambient.profile.r_min,
          "default plan range must satisfy r_min <= plan.r_min < plan.r_max");
  return sc;
}

Scenario make_scenario(const std::string& id, const std::map<std::string, double>& params) {
  return build_scenario(catalogue_spec(id, params));
}

LteOptions Scenario::lte_options(unsigned threads) const {
  LteOptions o;
  o.delta1 = spec.delta1;
  o.delta2 = spec.delta2;
  o.ricci_C = spec.ricci_C;
  o.threads = threads;
  return o;
}

SamplingPlan Scenario::default_plan(std::uint64_t seed, int r_count, int cone_samples, int angular_samples) const {
  return uniform_plan(spec.plan_r_min, spec.plan_r_max, r_count, cone_samples, angular_samples, seed);
}

bool Scenario::has_tag(const std::string& tag) const {
  return std::find(spec.tags.begin(), spec.tags.end(), tag) != spec.tags.end();
}

}  // namespace imcf
