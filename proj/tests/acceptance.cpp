#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "app.hpp"
#include "config.hpp"
#include "io.hpp"
#include "monitors.hpp"
#include "oracle_suite.hpp"
#include "scenarios.hpp"

using namespace imcf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned worker_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// classical RK4 on dr/dt = tanh(r)/2
double rk4_tanh(double r0, double T, int steps) {
  auto f = [](double r) { return 0.5 * std::tanh(r); };
  double h = T / steps, r = r0;
  for (int k = 0; k < steps; ++k) {
    double k1 = f(r), k2 = f(r + 0.5 * h * k1), k3 = f(r + 0.5 * h * k2), k4 = f(r + h * k3);
    r += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

struct Certified {
  Scenario sc;
  CertificateReport lte, asym;
};

Certified certify(const std::string& id, const std::map<std::string, double>& params = {}) {
  Certified c{make_scenario(id, params), {}, {}};
  SamplingPlan plan = c.sc.default_plan();
  c.lte = certify_lte(c.sc.ambient, c.sc.id(), c.sc.cone(), plan, c.sc.lte_options(worker_threads()));
  c.asym = certify_asymptotics(c.sc.ambient, c.sc.id(), c.sc.spec.asym, plan, worker_threads());
  return c;
}

Outcome euclidean_closed_form() {
  Outcome o;
  auto t0 = Clock::now();
  Scenario sc = make_scenario("euclidean");
  FlowControls c;
  c.T = 2.0;
  c.steps = 512;
  Trajectory tr = run(sc, initial_state(sc, FlowMode::rot_sym, 1), c);
  double dt = seconds_since(t0);
  double fe = 0.0, he = 0.0;
  for (const TrajectoryRecord& r : tr.records) {
    double F = std::exp(r.t / 2), H = 2.0 * std::exp(-r.t / 2);
    fe = std::max({fe, std::abs(r.F_min - F) / F, std::abs(r.F_max - F) / F});
    he = std::max({he, std::abs(r.H_min - H) / H, std::abs(r.H_max - H) / H});
  }
  o.detail << "steps=" << tr.records.size() - 1 << " F_rel_err=" << g(fe) << " H_rel_err=" << g(he)
           << " runtime=" << g(dt) << "s";
  o.require(!tr.halt, "run halted");
  o.require(tr.records.size() == 513 && tr.records.back().t == 2.0, "512 steps to T=2");
  o.require(fe <= 1e-3, "F error <= 1e-3");
  o.require(he <= 1e-3, "H error <= 1e-3");
  o.require(dt < 5.0, "runtime < 5 s");
  return o;
}

Outcome hyperbolic_model() {
  Outcome o;
  auto t0 = Clock::now();
  Scenario sc = make_scenario("hyperbolic_sphere");
  FlowControls c;
  c.T = 4.0;
  Trajectory tr = run(sc, initial_state(sc, FlowMode::rot_sym, 1), c);
  double dt = seconds_since(t0);
  o.require(!tr.halt && tr.records.back().t == 4.0, "run reaches T=4");

  // reference: RK4 segment by segment with 64 substeps per record interval
  double ref = 1.0, rho_err = 0.0;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    if (k > 0) ref = rk4_tanh(ref, tr.records[k].t - tr.records[k - 1].t, 64);
    rho_err = std::max(rho_err, std::abs(tr.records[k].F_max - ref));
  }
  double closed = std::asinh(std::sinh(1.0) * std::exp(2.0));
  double ref_closed = std::abs(ref - closed);

  double H0 = tr.records.front().H_max;
  double C0 = H0 * H0 - 4.0;
  double lit = INFINITY, rate1 = INFINITY;
  bool monotone = true;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const TrajectoryRecord& r = tr.records[k];
    lit = std::min(lit, std::sqrt(4.0 + C0 * std::exp(-2.0 * r.t)) - r.H_max);
    rate1 = std::min(rate1, std::sqrt(4.0 + C0 * std::exp(-r.t)) - r.H_max);
    if (k > 0) monotone = monotone && r.H_max < tr.records[k - 1].H_max && r.H_min > 2.0;
  }
  double gap_end = tr.records.back().H_max - 2.0;
  double gap_exact = 2.0 / std::tanh(closed) - 2.0;

  o.detail << "records=" << tr.records.size() << " rho_err=" << g(rho_err) << " rk4_vs_closed=" << g(ref_closed)
           << " C0=" << g(C0) << " envelope_e^-2t_margin=" << g(lit) << " envelope_e^-t_margin=" << g(rate1)
           << " H(T)-2=" << g(gap_end) << " runtime=" << g(dt) << "s";
  o.require(ref_closed < 1e-10, "reference ODE agrees with its closed form");
  o.require(rho_err <= 1e-6, "rho within 1e-6 of the reference");
  o.require(lit >= -1e-6, "H below sqrt(4 + C0 e^{-2t}) within 1e-6");
  o.require(monotone, "H strictly decreasing and above 2");
  o.require(std::abs(gap_end - gap_exact) < 1e-6, "H(T) matches 2 coth(rho(T))");
  o.require(dt < 5.0, "runtime < 5 s");
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  auto t0 = Clock::now();
  OracleOptions opt;
  opt.threads = worker_threads();
  OracleTable t = run_oracle_suite(opt);
  double dt = seconds_since(t0);
  int curv = 0, graph = 0;
  for (const OracleRow& r : t.rows) (r.kind == "H_hat" ? graph : curv)++;
  o.detail << "curvature_rows=" << curv << " graph_rows=" << graph << " worst_ricci_hat=" << g(t.worst("ricci_hat"))
           << " worst_ricci_bar=" << g(t.worst("ricci_bar")) << " worst_scalar_hat=" << g(t.worst("scalar_hat"))
           << " worst_H_hat=" << g(t.worst("H_hat")) << " runtime=" << g(dt) << "s";
  o.require(graph == 20, "20 graph states");
  o.require(curv >= 100, "100 curvature samples");
  o.require(t.tolerance == 1e-4, "tolerance 1e-4");
  o.require(t.pass(), "all rows within 1e-4 relative");
  o.require(dt < 60.0, "runtime < 60 s");
  return o;
}

Outcome certifier_catalogue() {
  Outcome o;
  {
    Scenario sc = make_scenario("example1", {{"l", 1.0}, {"p", 0.5}, {"q", 1.0}, {"n", 2}});
    SamplingPlan plan = uniform_plan(1.0, 20.0, 96, 16, 8, 0);
    CertificateReport rep = certify_lte(sc.ambient, sc.id(), sc.cone(), plan, sc.lte_options(worker_threads()));
    double min_margin = INFINITY;
    for (const ConditionRecord& c : rep.conditions) min_margin = std::min(min_margin, c.margin);
    double scal = rep.fitted_value("hat_scalar_min");
    o.detail << "example1_min_margin=" << g(min_margin) << " example1_hat_scalar_min=" << g(scal);
    o.require(rep.pass && min_margin > 0.0, "example1 LTE strictly positive margins");
    o.require(scal >= -6.0, "example1 hat_scalar >= -6");
  }
  {
    Certified c = certify("example2_negative");
    const ConditionRecord* gc = c.lte.find("G_cone");
    o.detail << " example2_G_margin=" << g(gc ? gc->margin : NAN);
    o.require(gc && !gc->pass && gc->witness.has_value(), "example2 G FAIL with witness");
  }
  {
    Certified c = certify("euclidean");
    const ConditionRecord* gc = c.lte.find("G_cone");
    o.detail << " euclidean_G_margin=" << g(gc ? gc->margin : NAN);
    o.require(c.lte.pass && gc && gc->pass && gc->margin == 0.0, "euclidean LTE PASS with G margin exactly 0");
    o.require(!c.asym.pass, "euclidean fails asymptotics");
  }
  int checked = 0, matched = 0;
  fs::path base = fs::temp_directory_path() / "imcf_acceptance" / "catalogue";
  for (const std::string& id : catalogue_ids()) {
    ScenarioSpec spec = catalogue_spec(id, {});
    if (!spec.expect_lte) continue;
    RunConfig cfg;
    cfg.subcommand = Subcommand::certify;
    cfg.scenario = id;
    cfg.threads = static_cast<int>(worker_threads());
    std::ostringstream log;
    fs::remove_all(base / id);
    ExecResult r = execute(cfg, "", (base / id).string(), log);
    ++checked;
    bool ok = r.status == (*spec.expect_lte ? 0 : 1);
    auto lte = parse_kv_file(read_text_file((base / id / "certificate_lte.kv").string()));
    for (const std::string& cond : spec.expect_lte_failures)
      ok = ok && lte["condition." + cond + ".verdict"] == "FAIL";
    if (spec.expect_asym) {
      auto asym = parse_kv_file(read_text_file((base / id / "certificate_asymptotics.kv").string()));
      ok = ok && (asym["pass"] == "PASS") == *spec.expect_asym;
    }
    matched += ok;
    if (!ok) o.require(false, id + " exit status or verdicts differ from the catalogue");
  }
  o.detail << " catalogue_exit_status=" << matched << "/" << checked;
  o.require(checked >= 3, "catalogue has expectations");
  return o;
}

// largest excess of u over its earlier values, beyond 1e-8 per unit time
double u_increase(const Trajectory& tr) {
  double worst = -INFINITY, lowest = INFINITY;
  for (const TrajectoryRecord& r : tr.records) {
    double gk = r.u_max - 1e-8 * r.t;
    if (std::isfinite(lowest)) worst = std::max(worst, gk - lowest);
    lowest = std::min(lowest, gk);
  }
  return worst;
}

Outcome maximum_principles() {
  Outcome o;
  auto t0 = Clock::now();
  for (const char* id : {"hyperbolic", "example1"}) {
    Certified c = certify(id, {{"amplitude", 0.05}});
    FlowControls fc;
    fc.T = 3.0;
    fc.threads = worker_threads();
    Trajectory tr = run(c.sc, initial_state(c.sc, FlowMode::axisym, 128), fc);
    MonitorReport rep = evaluate_monitors(tr, c.sc.ambient, c.lte, c.asym);
    const CheckResult* floor = rep.find("w_floor");
    const CheckResult* eta = rep.find("eta_growth");
    const CheckResult* grad = rep.find("gradient_bound");
    double du = u_increase(tr);
    std::string tag = id;
    o.detail << (tag == "hyperbolic" ? "" : " ") << tag << ": lte=" << (c.lte.pass ? "PASS" : "FAIL")
             << " w_floor_margin=" << g(floor->margin) << " u_excess=" << g(du) << " eta_margin=" << g(eta->margin)
             << " gradient=" << verdict_name(grad->verdict);
    if (grad->verdict == Verdict::skipped) o.detail << "(" << grad->skip_reason << ")";
    else o.detail << " gradient_margin=" << g(grad->margin) << " C_fit=" << g(grad->fitted_value("C_fit"));
    o.require(c.lte.pass, tag + " LTE certified");
    o.require(!tr.halt && tr.records.back().t == 3.0, tag + " run reaches T=3");
    o.require(floor->verdict == Verdict::pass, tag + " w stays above cos(theta1) min|eta|");
    o.require(du <= 0.0, tag + " max u non-increasing within 1e-8 per unit time");
    o.require(eta->verdict == Verdict::pass && eta->margin >= -1e-6, tag + " |eta| inside its envelopes");
    if (c.asym.pass)
      o.require(grad->verdict == Verdict::pass, tag + " v_bar below the gradient constant");
    else
      o.require(grad->verdict == Verdict::skipped && grad->skip_reason == "hypothesis_failed",
                tag + " gradient bound must be skipped when its hypotheses fail");
  }
  double dt = seconds_since(t0);
  o.detail << " runtime=" << g(dt) << "s";
  o.require(dt < 120.0, "runtime < 120 s");
  return o;
}

Outcome residual_convergence() {
  Outcome o;
  Certified c = certify("hyperbolic");
  std::vector<double> res;
  for (int steps : {200, 400, 800}) {
    FlowControls fc;
    fc.T = 2.0;
    fc.steps = steps;
    Trajectory tr = run(c.sc, initial_state(c.sc, FlowMode::rot_sym, 1), fc);
    res.push_back(check_w_evolution_residual(tr, c.sc.ambient).fitted_value("residual_psi_over_H"));
  }
  double q1 = res[0] / res[1], q2 = res[1] / res[2];
  o.detail << "residuals=" << g(res[0]) << "," << g(res[1]) << "," << g(res[2]) << " ratios=" << g(q1) << ","
           << g(q2);
  o.require(std::abs(q1 - 4.0) <= 0.8 && std::abs(q2 - 4.0) <= 0.8, "ratios within 4 +- 20%");
  return o;
}

Outcome determinism(const std::string& binary) {
  Outcome o;
  fs::path base = fs::temp_directory_path() / "imcf_acceptance" / "determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  write_text_file((base / "run.cfg").string(),
                  "scenario = example1\nparam.amplitude = 0.05\nmode = axisym\nresolution = 64\nT = 0.5\n"
                  "threads = 4\ncheckpoint_every = 50\nseed = 11\n");
  for (const char* dir : {"a", "b"}) {
    for (const char* sub : {"run", "oracle", "report"}) {
      std::string cmd = binary + " " + sub + " -q --config " + (base / "run.cfg").string() + " --out " +
                        (base / dir).string() + " >/dev/null 2>&1";
      int rc = std::system(cmd.c_str());
      o.require(rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) <= 1, std::string(sub) + " ran to completion");
    }
  }
  int compared = 0, identical = 0;
  for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
    if (!e.is_regular_file()) continue;
    fs::path rel = fs::relative(e.path(), base / "a");
    ++compared;
    bool same = fs::exists(base / "b" / rel) &&
                read_text_file(e.path().string()) == read_text_file((base / "b" / rel).string());
    identical += same;
    if (!same) o.require(false, rel.string() + " differs");
  }
  o.detail << "files_compared=" << compared << " identical=" << identical;
  o.require(fs::exists(base / "a" / "trajectory.csv") && fs::exists(base / "a" / "report.txt"), "outputs written");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string binary = argc > 1 ? argv[1] : IMCF_LAB_BINARY;
  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
  };
  std::vector<Criterion> criteria = {
      {"euclidean_closed_form", euclidean_closed_form},
      {"hyperbolic_model", hyperbolic_model},
      {"oracle_equivalence", oracle_equivalence},
      {"certifier_catalogue", certifier_catalogue},
      {"maximum_principles_axisym", maximum_principles},
      {"w_residual_convergence", residual_convergence},
      {"determinism", [&] { return determinism(binary); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s  %s\n", i + 1, criteria[i].name, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
