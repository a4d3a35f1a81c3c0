#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "monitors.hpp"
#include "scenarios.hpp"

using namespace imcf;

namespace {

struct Bundle {
  Scenario sc;
  CertificateReport lte, asym;
  Trajectory traj;
};

Bundle simulate(const std::string& id, FlowMode mode, double T, int steps = 0,
                const std::map<std::string, double>& params = {}) {
  Bundle b{make_scenario(id, params), {}, {}, {}};
  SamplingPlan plan = b.sc.default_plan();
  b.lte = certify_lte(b.sc.ambient, id, b.sc.cone(), plan, b.sc.lte_options(4));
  b.asym = certify_asymptotics(b.sc.ambient, id, b.sc.spec.asym, plan, 4);
  FlowControls c;
  c.T = T;
  c.steps = steps;
  c.threads = 4;
  b.traj = run(b.sc, initial_state(b.sc, mode, 64), c);
  return b;
}

double residual(const Bundle& b) {
  return check_w_evolution_residual(b.traj, b.sc.ambient).fitted_value("residual_psi_over_H");
}

}  // namespace

TEST_CASE("hyperbolic sphere: every enabled monitor passes at once") {
  Bundle b = simulate("hyperbolic", FlowMode::rot_sym, 4.0);
  MonitorReport rep = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym);
  CHECK(rep.pass());
  int asserted = 0;
  for (const CheckResult& c : rep.checks) {
    INFO(c.id);
    CHECK(c.verdict == Verdict::pass);
    asserted += c.verdict == Verdict::pass;
    CHECK_FALSE(c.gate.empty());
  }
  CHECK(asserted == static_cast<int>(rep.checks.size()));

  // H² = 4 + C0·e^{-t} along this flow: the default rate 2/n is attained
  const CheckResult* up = rep.find("H_upper_asymptotic");
  REQUIRE(up);
  CHECK(up->fitted_value("C0") == doctest::Approx(4.0 / std::pow(std::tanh(1.0), 2) - 4.0));
  CHECK(up->fitted_value("K") == 0.0);
  CHECK(std::abs(up->margin) < 1e-6);
  CHECK(up->fitted_value("literal_rate2_margin") < -0.05);

  // u = 1/(2 cosh ρ)
  const CheckResult* u = rep.find("u_max");
  CHECK(u->fitted_value("u_max0") == doctest::Approx(0.5 / std::cosh(1.0)).epsilon(1e-12));
  CHECK(u->fitted_value("max_increase_rate") < 0.0);

  CHECK(rep.find("gradient_bound")->fitted_value("C_fit") == doctest::Approx(1.0));
  CHECK(rep.find("w_lower_envelope")->fitted_value("C9") == 0.0);
}

TEST_CASE("Euclidean sphere: LTE bounds asserted, asymptotic bounds skipped") {
  Bundle b = simulate("euclidean", FlowMode::rot_sym, 2.0, 0, {{"theta1", std::numbers::pi / 4}});
  REQUIRE(b.lte.pass);
  REQUIRE_FALSE(b.asym.pass);
  MonitorReport rep = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym);
  CHECK(rep.pass());

  const CheckResult* wf = rep.find("w_floor");
  CHECK(wf->verdict == Verdict::pass);
  CHECK(wf->margin == doctest::Approx(1.0 - std::cos(std::numbers::pi / 4)).epsilon(1e-12));
  CHECK(wf->t_worst == 0.0);
  // the margin grows like r0·e^{t/n}(1 − cos θ1)
  double tT = b.traj.records.back().t;
  CHECK(wf->margins.back() ==
        doctest::Approx(std::exp(tT / 2) - std::cos(std::numbers::pi / 4)).epsilon(1e-5));

  for (const char* id : {"eta_growth", "H_lower_first", "H_upper_first", "u_max", "w_evolution_residual"})
    CHECK(rep.find(id)->verdict == Verdict::pass);
  for (const char* id : {"H_upper_asymptotic", "H_lower_asymptotic", "w_lower_envelope", "gradient_bound"}) {
    const CheckResult* c = rep.find(id);
    CHECK(c->verdict == Verdict::skipped);
    CHECK(c->skip_reason == "hypothesis_failed");
    CHECK(std::isnan(c->margin));
  }
  // H = 2e^{-t/2} sits on the first lower envelope
  CHECK(std::abs(rep.find("H_lower_first")->margin) < 1e-6);
}

TEST_CASE("uncertified scenario: nothing asserted, run tagged") {
  Bundle b = simulate("example2_negative", FlowMode::rot_sym, 1.0);
  REQUIRE_FALSE(b.lte.pass);
  MonitorReport rep = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym);
  CHECK_FALSE(rep.pass());
  bool tagged = false, named = false;
  for (const auto& [k, v] : rep.header) {
    tagged |= k == "run_tag" && v == "uncertified";
    named |= k == "lte_failed_condition" && v == "G_cone";
  }
  CHECK(tagged);
  CHECK(named);
  for (const CheckResult& c : rep.checks) {
    if (c.id == "run_completed" || c.id == "w_evolution_residual") continue;
    INFO(c.id);
    CHECK(c.verdict == Verdict::skipped);
  }
}

TEST_CASE("envelopes flag violations in synthetic trajectories") {
  Bundle b = simulate("hyperbolic", FlowMode::rot_sym, 1.0);
  EnvelopeParams p = envelope_params(b.lte, b.asym, 2, b.traj.theta1);

  Trajectory bad = b.traj;
  bad.records[100].eta_max *= 1.0 + 1e-5;
  CheckResult eta = check_eta_growth(bad, p);
  CHECK(eta.verdict == Verdict::fail);
  CHECK(eta.t_worst == doctest::Approx(b.traj.records[100].t));
  bad = b.traj;
  bad.records[50].eta_max *= 1.0 + 1e-7;
  CHECK(check_eta_growth(bad, p).verdict == Verdict::pass);

  bad = b.traj;
  bad.records[30].u_max = bad.records[0].u_max + 2e-8;
  CheckResult u = check_u_max(bad, p);
  CHECK(u.verdict == Verdict::fail);
  CHECK(u.t_worst == doctest::Approx(b.traj.records[30].t));
  bad.records[30].u_max = bad.records[0].u_max + 5e-9;
  CHECK(check_u_max(bad, p).verdict == Verdict::pass);

  bad = b.traj;
  bad.records[70].w_min = bad.w_floor;
  CheckResult wf = check_w_floor(bad, p);
  CHECK(wf.verdict == Verdict::fail);
  CHECK(wf.margin == 0.0);

  bad = b.traj;
  bad.records[1].H_max *= 1.01;
  for (const CheckResult& c : check_H_envelopes(bad, p))
    if (c.id == "H_upper_first" || c.id == "H_upper_asymptotic") CHECK(c.verdict == Verdict::fail);

  bad = b.traj;
  bad.records.back().k_max = 11.0 * bad.records[bad.records.size() / 2].k_max;
  CHECK(check_shape_eigen_bounded(bad, p).verdict == Verdict::fail);
}

TEST_CASE("closed-form envelopes solve their comparison equations") {
  Bundle b = simulate("hyperbolic", FlowMode::rot_sym, 0.5);
  EnvelopeParams p = envelope_params(b.lte, b.asym, 2, b.traj.theta1);
  const TrajectoryRecord& r0 = b.traj.records.front();
  double D = p.alpha + p.gamma - 2 - 2 * p.delta2 - p.beta;
  double C9 = 0.7, h = 1e-5;
  for (double t : {0.0, 0.5, 2.0, 7.0}) {
    double w = w_lower_bound(p, r0, C9, t);
    double dw = (w_lower_bound(p, r0, C9, t + h) - w_lower_bound(p, r0, C9, t - h)) / (2 * h);
    CHECK(dw == doctest::Approx(w / p.n - C9 * std::exp(-(D - 1) * t / p.n)).epsilon(1e-7));
  }
  CHECK(w_lower_bound(p, r0, C9, 0.0) == doctest::Approx(r0.w_min));
  CHECK(literal_w_lower_bound(p, r0, C9, 0.0) == doctest::Approx(r0.w_min));
  CHECK(literal_w_lower_bound(p, r0, C9, 3.0) > w_lower_bound(p, r0, C9, 3.0));

  for (double t : {0.0, 1.0, 4.0}) {
    double C0 = r0.H_max * r0.H_max - 4;
    CHECK(upper_H_bound(p, r0, 0.0, t) == doctest::Approx(std::sqrt(4 + C0 * std::exp(-t))));
    // with K > 0 the bound exceeds the K = 0 one and still tends to n
    CHECK(upper_H_bound(p, r0, 3.0, t) >= upper_H_bound(p, r0, 0.0, t));
  }
  CHECK(upper_H_bound(p, r0, 3.0, 60.0) == doctest::Approx(2.0).epsilon(1e-9));

  // α = 2 limit of the upper envelope is continuous
  EnvelopeParams q = p;
  q.upper_exponent = 2.0;
  EnvelopeParams q2 = p;
  q2.upper_exponent = 2.0 + 1e-7;
  CHECK(upper_H_bound(q, r0, 1.0, 1.5) == doctest::Approx(upper_H_bound(q2, r0, 1.0, 1.5)).epsilon(1e-7));
}

TEST_CASE("monitor options") {
  Bundle b = simulate("hyperbolic", FlowMode::rot_sym, 1.0);
  MonitorOptions o;
  o.upper_exponent = "gamma";
  o.c0_rate = 2.0;
  MonitorReport rep = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym, o);
  CHECK(rep.params.upper_exponent == b.asym.fitted_value("gamma"));
  // the literal rate is too fast for this flow
  CHECK(rep.find("H_upper_asymptotic")->verdict == Verdict::fail);
  CHECK_FALSE(rep.pass());
  bool logged = false;
  for (const FittedConstant& c : rep.params.log) logged |= c.name == "c0_rate" && c.source == "user";
  CHECK(logged);
  o.upper_exponent = "delta";
  CHECK_THROWS_AS(evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym, o), Error);
}

TEST_CASE("w residual is second order in dt") {
  std::vector<double> res;
  for (int steps : {200, 400, 800}) res.push_back(residual(simulate("hyperbolic", FlowMode::rot_sym, 2.0, steps)));
  for (int k = 0; k + 1 < 3; ++k) CHECK(res[k] / res[k + 1] == doctest::Approx(4.0).epsilon(0.2));

  Bundle e = simulate("euclidean", FlowMode::rot_sym, 1.0, 100);
  CheckResult c = check_w_evolution_residual(e.traj, e.sc.ambient);
  CHECK(c.fitted_value("residual_assembly") == doctest::Approx(c.fitted_value("residual_psi_over_H")).epsilon(1e-6));
}

TEST_CASE("axisym runs: graph-only checks and the residual skip") {
  Bundle b = simulate("hyperbolic", FlowMode::axisym, 0.5, 0, {{"amplitude", 0.05}});
  MonitorReport rep = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym);
  CHECK(rep.find("w_evolution_residual")->verdict == Verdict::skipped);
  CHECK(rep.find("w_evolution_residual")->skip_reason == "not_rot_sym");
  CHECK(rep.pass());
  CHECK(rep.find("gradient_bound")->fitted_value("C_fit") > 1.0);
  MonitorReport again = evaluate_monitors(b.traj, b.sc.ambient, b.lte, b.asym);
  for (std::size_t k = 0; k < rep.checks.size(); ++k) {
    CHECK(rep.checks[k].margins == again.checks[k].margins);
    CHECK(rep.checks[k].verdict == again.checks[k].verdict);
  }
}

TEST_CASE("a halted run fails the floor at the crossing time") {
  Bundle b{make_scenario("hyperbolic", {{"amplitude", 0.05}}), {}, {}, {}};
  SamplingPlan plan = b.sc.default_plan();
  b.lte = certify_lte(b.sc.ambient, "hyperbolic", b.sc.cone(), plan, b.sc.lte_options(4));
  b.asym = certify_asymptotics(b.sc.ambient, "hyperbolic", b.sc.spec.asym, plan, 4);
  FlowState s = initial_state(b.sc, FlowMode::axisym, 32);
  FlowControls c;
  c.T = 0.2;
  b.traj = run(b.sc, s, c);
  // raise the floor past the observed minimum so the run crosses it
  Trajectory t = b.traj;
  t.w_floor = 0.5 * (t.records.front().w_min + t.records.back().w_min);
  t.halt = HaltEvent{ErrorCode::star_shape_lost, t.records.back().t, "synthetic"};
  MonitorReport rep = evaluate_monitors(t, b.sc.ambient, b.lte, b.asym);
  CHECK(rep.find("run_completed")->verdict == Verdict::fail);
  const CheckResult* wf = rep.find("w_floor");
  CHECK(wf->verdict == Verdict::fail);
  CHECK(wf->margin < 0.0);
  CHECK_FALSE(rep.pass());
}
