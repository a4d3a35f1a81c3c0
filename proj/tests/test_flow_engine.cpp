#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "flow_engine.hpp"
#include "scenarios.hpp"

using namespace imcf;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

// classical RK4 on dρ/dt = g(ρ) with a fine step
template <class G>
double rk4(G g, double y, double T, int steps) {
  double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    double k1 = g(y), k2 = g(y + 0.5 * h * k1), k3 = g(y + 0.5 * h * k2), k4 = g(y + h * k3);
    y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
  }
  return y;
}

FlowState axisym_state(const Scenario& sc, int N, auto&& F) {
  FlowState s;
  s.mode = FlowMode::axisym;
  s.n = 2;
  s.grid = make_grid(FlowMode::axisym, N);
  s.scenario_id = sc.id();
  for (double th : s.grid.theta) s.F.push_back(F(th));
  return s;
}

}  // namespace

TEST_CASE("round spheres: slice formula and closed forms") {
  Scenario euc = make_scenario("euclidean", {{"r0", 1.5}});
  FlowState s = initial_state(euc, FlowMode::rot_sym, 1);
  NodeGeometry g = graph_geometry(euc.ambient, s).front();
  CHECK(g.H_hat == doctest::Approx(2 / 1.5).epsilon(1e-15));
  CHECK(g.w == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(g.v_bar == 1.0);
  CHECK(g.u == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.shape_eigen_max == doctest::Approx(g.H_hat * g.H_hat / 2).epsilon(1e-15));

  for (const char* id : {"hyperbolic", "example1", "example3", "constant_f", "compact_f"}) {
    Scenario sc = make_scenario(id);
    for (double F : {1.2, 2.0, 3.5}) {
      FlowState st = initial_state(sc, FlowMode::rot_sym, 1);
      st.F = {F};
      NodeGeometry ng = graph_geometry(sc.ambient, st).front();
      LocalGeometry lg(sc.ambient.profile, sc.ambient.factor, 2, AmbientPoint{F, {pi / 2, 0.0}});
      CHECK(ng.H_hat == doctest::Approx(2 * lg.psi_hat() / lg.eta_norm_hat()).epsilon(1e-13));
      CHECK(ng.w * ng.v_bar == doctest::Approx(std::exp(ng.f) * ng.eta_norm_bar).epsilon(1e-13));
    }
  }
}

TEST_CASE("slice formula on constant graphs in axisym mode with a non-radial factor") {
  Scenario sc = make_scenario("example4", {{"a", 0.2}, {"m", 1.0}, {"eps", 0.5}});
  FlowState s = axisym_state(sc, 32, [](double) { return 1.7; });
  auto geo = graph_geometry(sc.ambient, s);
  for (int i = 0; i < 32; ++i) {
    LocalGeometry lg(sc.ambient.profile, sc.ambient.factor, 2, AmbientPoint{1.7, {s.grid.theta[i], 0.0}});
    CHECK(geo[i].H_hat == doctest::Approx(2 * lg.psi_hat() / lg.eta_norm_hat()).epsilon(1e-13));
  }
}

TEST_CASE("rot_sym in general dimension") {
  for (int n : {1, 3, 4}) {
    Scenario sc = make_scenario("hyperbolic", {{"n", n}});
    FlowState s = initial_state(sc, FlowMode::rot_sym, 1);
    NodeGeometry g = graph_geometry(sc.ambient, s).front();
    CHECK(g.H_hat == doctest::Approx(n / std::tanh(1.0)).epsilon(1e-14));
    Scenario e = make_scenario("euclidean", {{"n", n}});
    FlowControls c;
    c.T = 1.0;
    c.steps = 400;
    Trajectory tr = run(e, initial_state(e, FlowMode::rot_sym, 1), c);
    CHECK(tr.final_state.F[0] == doctest::Approx(std::exp(1.0 / n)).epsilon(1e-5));
  }
}

TEST_CASE("Euclidean sphere grows like r0 e^{t/n}") {
  Scenario sc = make_scenario("euclidean");
  FlowControls c;
  c.T = 2.0;
  c.steps = 512;
  Trajectory tr = run(sc, initial_state(sc, FlowMode::rot_sym, 1), c);
  REQUIRE(tr.records.size() == 513);
  CHECK_FALSE(tr.halt.has_value());
  double worst = 0.0;
  for (const auto& r : tr.records) {
    double exact = std::exp(r.t / 2);
    worst = std::max(worst, std::abs(r.F_max - exact) / exact);
    worst = std::max(worst, std::abs(r.H_max - 2 / exact) / (2 / exact));
  }
  CHECK(worst <= 1e-6);
  CHECK(tr.records.back().t == 2.0);
}

TEST_CASE("hyperbolic sphere follows the tanh law") {
  Scenario sc = make_scenario("hyperbolic_sphere");
  FlowControls c;
  c.T = 4.0;
  c.steps = 2048;
  Trajectory tr = run(sc, initial_state(sc, FlowMode::rot_sym, 1), c);
  auto g = [](double r) { return std::tanh(r) / 2; };
  for (std::size_t k = 256; k < tr.records.size(); k += 256) {
    const auto& r = tr.records[k];
    double ref = rk4(g, 1.0, r.t, 20000);
    CHECK(std::abs(r.F_max - ref) <= 1e-6);
    CHECK(ref == doctest::Approx(std::asinh(std::sinh(1.0) * std::exp(r.t / 2))).epsilon(1e-12));
  }
}

TEST_CASE("shape oracle on spheres") {
  Scenario euc = make_scenario("euclidean", {{"r0", 1.3}});
  FlowState s = initial_state(euc, FlowMode::axisym, 32);
  for (int i : {0, 7, 16, 31}) CHECK(std::abs(fd_shape_oracle(euc.ambient, s, i, 0) - 2 / 1.3) <= 1e-6);
  Scenario hyp = make_scenario("hyperbolic", {{"r0", 1.6}});
  FlowState h = initial_state(hyp, FlowMode::axisym, 32);
  for (int i : {0, 9, 20}) CHECK(std::abs(fd_shape_oracle(hyp.ambient, h, i, 0) - 2 / std::tanh(1.6)) <= 1e-5);
  FlowState r = initial_state(hyp, FlowMode::rot_sym, 1);
  CHECK(std::abs(fd_shape_oracle(hyp.ambient, r, 0, 0) - 2 / std::tanh(1.6)) <= 1e-5);
}

TEST_CASE("graph mean curvature agrees with the shape oracle") {
  Scenario sc = make_scenario("hyperbolic");
  FlowState s = axisym_state(sc, 128, [](double th) { return 1.0 + 0.05 * std::cos(th); });
  auto geo = graph_geometry(sc.ambient, s);
  for (int i = 0; i < 128; i += 9) {
    double o = fd_shape_oracle(sc.ambient, s, i, 0);
    CHECK(std::abs(geo[i].H_hat - o) <= 1e-4 * std::abs(o));
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> amp(-0.04, 0.04);
  for (const char* id : {"example4", "compact_f", "example1"}) {
    Scenario x = make_scenario(id);
    double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
    FlowState st = axisym_state(x, 128, [&](double th) {
      return 2.0 * (1 + a1 * std::cos(th) + a2 * legendre(2, std::cos(th)) + a3 * legendre(3, std::cos(th)));
    });
    auto gx = graph_geometry(x.ambient, st);
    for (int i = 3; i < 128; i += 17) {
      double o = fd_shape_oracle(x.ambient, st, i, 0);
      CHECK(std::abs(gx[i].H_hat - o) <= 1e-4 * std::abs(o));
    }
  }
}

TEST_CASE("full_s2 mode matches axisym on axial data and the oracle off-axis") {
  Scenario sc = make_scenario("hyperbolic", {{"amplitude", 0.05}, {"degree", 2}});
  FlowState ax = initial_state(sc, FlowMode::axisym, 24);
  FlowState fu = initial_state(sc, FlowMode::full_s2, 24);
  auto ga = graph_geometry(sc.ambient, ax);
  auto gf = graph_geometry(sc.ambient, fu);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 48; j += 7) CHECK(gf[i * 48 + j].H_hat == doctest::Approx(ga[i].H_hat).epsilon(1e-10));

  Scenario dip = make_scenario("hyperbolic", {{"amplitude", 0.03}, {"azimuthal_amplitude", 0.03}, {"r0", 1.5}});
  FlowState d = initial_state(dip, FlowMode::full_s2, 48);
  auto gd = graph_geometry(dip.ambient, d);
  for (int i : {5, 20, 30}) {
    for (int j : {0, 13, 50}) {
      double o = fd_shape_oracle(dip.ambient, d, i, j);
      CHECK(std::abs(gd[i * 96 + j].H_hat - o) <= 1e-3 * std::abs(o));
    }
  }
}

TEST_CASE("support identity and u monotonicity on an axisym run") {
  Scenario sc = make_scenario("hyperbolic", {{"amplitude", 0.05}});
  FlowState s0 = initial_state(sc, FlowMode::axisym, 64);
  FlowControls c;
  c.T = 0.5;
  Trajectory tr = run(sc, s0, c);
  CHECK_FALSE(tr.halt.has_value());
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    double dt = tr.records[k].t - tr.records[k - 1].t;
    CHECK(tr.records[k].u_max <= tr.records[k - 1].u_max + 1e-8 * dt);
  }
  for (const auto& g : graph_geometry(sc.ambient, tr.final_state))
    CHECK(std::abs(g.w * g.v_bar - std::exp(g.f) * g.eta_norm_bar) <= 1e-10 * g.eta_norm_bar);
}

TEST_CASE("step errors") {
  Scenario sc = make_scenario("hyperbolic", {{"amplitude", 0.05}});
  FlowState s = initial_state(sc, FlowMode::axisym, 64);
  auto geo = graph_geometry(sc.ambient, s);
  double lim = cfl_limit(sc.ambient, s, geo);
  CHECK(code_of([&] { step(sc.ambient, s, 1.5 * lim); }) == ErrorCode::cfl_violation);
  CHECK(code_of([&] { step(sc.ambient, s, 0.4 * lim); }) == ErrorCode::ok);
  CHECK(code_of([&] { step(sc.ambient, s, -1.0); }) == ErrorCode::invalid_argument);
  StepOptions high;
  high.w_floor = 10.0;
  CHECK(code_of([&] { step(sc.ambient, s, 0.4 * lim, high); }) == ErrorCode::star_shape_lost);

  FlowState dented = axisym_state(sc, 64, [](double th) { return 1.0 + 0.3 * std::exp(-40 * (th - 1.5) * (th - 1.5)); });
  CHECK(code_of([&] { graph_geometry(sc.ambient, dented); }) == ErrorCode::non_mean_convex);

  FlowControls c;
  c.T = 1.0;
  c.steps = 4;
  Trajectory tr = run(sc, s, c);
  REQUIRE(tr.halt.has_value());
  CHECK(tr.halt->code == ErrorCode::cfl_violation);
  CHECK(tr.halt->t == 0.0);
}

TEST_CASE("initial data checks") {
  CHECK(code_of([] { initial_state(make_scenario("hyperbolic", {{"amplitude", 0.3}, {"degree", 4}}),
                                   FlowMode::axisym, 64); }) == ErrorCode::star_shape_lost);
  CHECK(code_of([] { initial_state(make_scenario("hyperbolic", {{"amplitude", 0.05}}), FlowMode::rot_sym, 1); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { initial_state(make_scenario("example4"), FlowMode::rot_sym, 1); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { initial_state(make_scenario("hyperbolic", {{"n", 3}}), FlowMode::axisym, 32); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { initial_state(make_scenario("hyperbolic"), FlowMode::axisym, 8); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { initial_state(make_scenario("hyperbolic", {{"azimuthal_amplitude", 0.05}}), FlowMode::axisym,
                                   32); }) == ErrorCode::invalid_argument);
}

TEST_CASE("threaded geometry is identical") {
  Scenario sc = make_scenario("example4", {{"amplitude", 0.05}});
  FlowState s0 = initial_state(sc, FlowMode::axisym, 48);
  FlowControls c;
  c.T = 0.2;
  c.checkpoint_every = 50;
  Trajectory a = run(sc, s0, c);
  c.threads = 4;
  Trajectory b = run(sc, s0, c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].t == b.records[k].t);
    CHECK(a.records[k].H_max == b.records[k].H_max);
    CHECK(a.records[k].w_min == b.records[k].w_min);
  }
  CHECK(a.final_state.F == b.final_state.F);
  CHECK(a.checkpoints.size() == b.checkpoints.size());
  CHECK(a.checkpoints.back().t == a.final_state.t);
}
