#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "scenarios.hpp"

using namespace imcf;

TEST_CASE("catalogue honesty: certificates reproduce the recorded outcomes") {
  for (const std::string& id : catalogue_ids()) {
    INFO(id);
    Scenario sc = make_scenario(id);
    SamplingPlan plan = sc.default_plan();
    CertificateReport lte = certify_lte(sc.ambient, id, sc.cone(), plan, sc.lte_options());
    CertificateReport asym = certify_asymptotics(sc.ambient, id, sc.spec.asym, plan);
    REQUIRE(sc.spec.expect_lte.has_value());
    REQUIRE(sc.spec.expect_asym.has_value());
    CHECK(lte.pass == *sc.spec.expect_lte);
    CHECK(asym.pass == *sc.spec.expect_asym);
    for (const std::string& cond : sc.spec.expect_lte_failures) {
      REQUIRE(lte.find(cond));
      CHECK_FALSE(lte.find(cond)->pass);
    }
    if (sc.has_tag("R_hat_ge_-6")) CHECK(lte.fitted_value("hat_scalar_min") >= -6.0);
  }
}

TEST_CASE("catalogue entries") {
  Scenario e = make_scenario("euclidean", {{"n", 2}, {"r0", 1}});
  CHECK(e.ambient.profile.family == WarpingFamily::euclidean);
  CHECK(e.ambient.band.rho1 == 1.0);
  CHECK(e.ambient.band.rho2 == 1.0);
  CHECK(e.init().kind == InitKind::sphere);

  Scenario x = make_scenario("example1", {{"l", 1}, {"p", 0.5}, {"q", 1}, {"n", 2}});
  CHECK(x.ambient.profile.family == WarpingFamily::example1);
  WarpingJet j = eval_warping(x.ambient.profile, 3.0);
  CHECK(j.value == doctest::Approx(std::sinh(3.0) + 1 / std::sqrt(3.0) + std::exp(-3.0)).epsilon(1e-15));
  CHECK(x.has_tag("R_hat_ge_-6"));

  Scenario neg = make_scenario("example2_negative");
  for (double r : {0.0, 1.0, 10.0}) {
    WarpingJet l = eval_warping(neg.ambient.profile, r);
    CHECK(l.d1 > 0.0);
    CHECK(l.d2 < 0.0);
  }
}

TEST_CASE("catalogue errors") {
  CHECK_THROWS_WITH_AS(make_scenario("nope"), doctest::Contains("unknown scenario"), Error);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ok;
  };
  CHECK(code([] { make_scenario("nope"); }) == ErrorCode::unknown_scenario);
  CHECK(code([] { make_scenario("example1", {{"p", 1.5}}); }) == ErrorCode::param_out_of_range);
  CHECK(code([] { make_scenario("example1", {{"l", 2.0}}); }) == ErrorCode::param_out_of_range);
  CHECK(code([] { make_scenario("example1", {{"q", 0.0}}); }) == ErrorCode::param_out_of_range);
  CHECK(code([] { make_scenario("example1", {{"n", 3}, {"p", 0.5}, {"l", 2.4}}); }) == ErrorCode::ok);
  CHECK(code([] { make_scenario("euclidean", {{"l", 1.0}}); }) == ErrorCode::param_out_of_range);
  CHECK(code([] { make_scenario("hyperbolic", {{"r0", -1.0}}); }) == ErrorCode::param_out_of_range);
  CHECK(code([] { make_scenario("hyperbolic", {{"theta1", 2.0}}); }) == ErrorCode::param_out_of_range);
}

TEST_CASE("Example 3 closed form: r^2 f_rr + r f_r stays above the recorded delta") {
  Scenario sc = make_scenario("example3");
  double a = sc.spec.f_params.at("a"), m = sc.spec.f_params.at("m");
  SamplingPlan plan = sc.default_plan();
  CertificateReport rep = certify_lte(sc.ambient, sc.id(), sc.cone(), plan, sc.lte_options());
  double delta = a * m * m * std::pow(plan.r_grid.back(), -m);
  for (double r : plan.r_grid) {
    double f = a * std::pow(r, -m);
    double q = r * r * m * (m + 1) * f / (r * r) + r * (-m * f / r);
    CHECK(q >= delta * (1 - 1e-12));
    // the certifier's G margin is this quantity times (1 - cos θ2): G is radial for radial f
    LocalGeometry geo(sc.ambient.profile, sc.ambient.factor, 2, AmbientPoint{r, {}});
    CHECK(geo.dot(geo.G(), geo.eta(), MetricKind::hat) == doctest::Approx(q).epsilon(1e-12));
  }
  CHECK(rep.find("G_cone")->margin == doctest::Approx(delta * (1 - std::cos(sc.cone().theta2))).epsilon(1e-9));
}

TEST_CASE("initial surface recipes") {
  for (int l = 0; l <= 4; ++l) CHECK(legendre(l, 1.0) == doctest::Approx(1.0));
  CHECK(legendre(2, 0.3) == doctest::Approx(0.5 * (3 * 0.09 - 1)));
  CHECK(legendre(3, -0.4) == doctest::Approx(0.5 * (5 * -0.064 - 3 * -0.4)));
  InitialSurface s;
  s.r0 = 1.5;
  CHECK(initial_radius(s, 0.3, 1.0) == 1.5);
  s.kind = InitKind::perturbed;
  s.amplitude = 0.05;
  s.degree = 2;
  s.azimuthal_amplitude = 0.02;
  double th = 0.7, ph = 2.0;
  CHECK(initial_radius(s, th, ph) ==
        doctest::Approx(1.5 * (1 + 0.05 * legendre(2, std::cos(th)) + 0.02 * std::sin(th) * std::cos(ph))));
}
