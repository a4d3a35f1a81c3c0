#include "certifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "errors.hpp"
#include "parallel.hpp"

namespace imcf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

struct Worst {
  double margin = inf;
  Witness witness;
  bool set = false;

  void offer(double m, const Witness& w) {
    if (!set || m < margin) {
      margin = m;
      witness = w;
      set = true;
    }
  }
  void merge(const Worst& other) {
    if (other.set) offer(other.margin, other.witness);
  }
};

struct Extreme {
  double lo = inf, hi = -inf;
  Witness lo_w, hi_w;

  void offer(double v, const Witness& w) {
    if (v < lo) {
      lo = v;
      lo_w = w;
    }
    if (v > hi) {
      hi = v;
      hi_w = w;
    }
  }
  void merge(const Extreme& o) {
    if (o.lo < lo) {
      lo = o.lo;
      lo_w = o.lo_w;
    }
    if (o.hi > hi) {
      hi = o.hi;
      hi_w = o.hi_w;
    }
  }
};

Witness at_point(const LocalGeometry& geo) {
  Witness w;
  w.r = geo.coords()[0];
  w.angular.assign(geo.coords().begin() + 1, geo.coords().end());
  return w;
}

Witness with_vector(Witness w, const Vec& v, std::optional<double> rho = std::nullopt) {
  w.vector = v;
  w.rho = rho;
  return w;
}

struct LteEval {
  Worst lambda_prime, J, G, ricci, errors;
  Worst J_psi, G_psi;
  Extreme ratio, growth, scalar;
  Worst degenerate;
};

LteEval evaluate_lte_point(const Ambient& amb, const ConeSpec& cone, const SamplingPlan& plan, double r,
                           const Vec& site) {
  LteEval ev;
  std::optional<LocalGeometry> geo_opt;
  try {
    geo_opt.emplace(amb.profile, amb.factor, amb.n, AmbientPoint{r, site});
  } catch (const Error&) {
    Witness w;
    w.r = r;
    w.angular = site;
    ev.errors.offer(-inf, w);
    return ev;
  }
  const LocalGeometry& geo = *geo_opt;
  Witness base = at_point(geo);
  ev.lambda_prime.offer(geo.warping().d1, base);

  Vec G = geo.G();
  ev.G.offer(cone_margin(geo, G, cone.theta2), base);
  Vec P = geo.grad_psi_hat();
  ev.G_psi.offer(cone_margin(geo, P, cone.theta2), base);

  try {
    ev.ratio.offer(geo.delta_ratio(), base);
    ev.growth.offer(geo.growth_ratio(), base);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_potential) throw;
    ev.degenerate.offer(-inf, base);
  }

  Interval sc = geo.hat_scalar(amb.band);
  ev.scalar.offer(sc.low, base);

  Vec eta = geo.eta();
  for (const Vec& V : cone_vectors(geo, cone.theta1, plan.cone_samples, plan.seed)) {
    for (double rho : {amb.band.rho1, amb.band.rho2}) {
      double ric = geo.hat_ricci_at(rho, V, V);
      Vec J = G;
      for (int a = 0; a <= amb.n; ++a) J[a] += (1.0 + ric) * eta[a] / amb.n;
      ev.J.offer(cone_margin(geo, J, cone.theta2), with_vector(base, V, rho));
      Vec Jp = P;
      for (int a = 0; a <= amb.n; ++a) Jp[a] += (1.0 + ric) * eta[a] / amb.n;
      ev.J_psi.offer(cone_margin(geo, Jp, cone.theta2), with_vector(base, V, rho));
      ev.ricci.offer(ric, with_vector(base, V, rho));
    }
  }
  return ev;
}

LteEval reduce_lte(const Ambient& amb, const ConeSpec& cone, const SamplingPlan& plan, unsigned threads) {
  std::vector<Vec> sites = angular_sites(amb.n, plan.angular_samples, plan.seed, amb.factor.radial);
  std::size_t S = sites.size();
  std::vector<LteEval> evals(plan.r_grid.size() * S);
  parallel_for(evals.size(), threads, [&](std::size_t k) {
    evals[k] = evaluate_lte_point(amb, cone, plan, plan.r_grid[k / S], sites[k % S]);
  });
  LteEval total;
  for (const LteEval& e : evals) {
    total.lambda_prime.merge(e.lambda_prime);
    total.J.merge(e.J);
    total.G.merge(e.G);
    total.J_psi.merge(e.J_psi);
    total.G_psi.merge(e.G_psi);
    total.ricci.merge(e.ricci);
    total.errors.merge(e.errors);
    total.degenerate.merge(e.degenerate);
    total.ratio.merge(e.ratio);
    total.growth.merge(e.growth);
    total.scalar.merge(e.scalar);
  }
  return total;
}

ConditionRecord record(const std::string& id, double margin, bool pass, const Witness& w) {
  ConditionRecord c;
  c.id = id;
  c.margin = margin;
  c.pass = pass;
  c.witness = w;
  return c;
}

std::vector<ConditionRecord> lte_conditions(const LteEval& ev, const ConeSpec& cone, const LteOptions& opt,
                                            const SamplingPlan& plan) {
  std::vector<ConditionRecord> out;
  double angle_margin = pi / 2 - cone.theta1 - cone.theta2;
  Witness cone_w;
  cone_w.r = plan.r_grid.front();
  cone_w.vector = {cone.theta1, cone.theta2};
  out.push_back(record("angle_sum", angle_margin, angle_margin >= -1e-15, cone_w));
  if (ev.errors.set) out.push_back(record("domain", -inf, false, ev.errors.witness));
  out.push_back(record("lambda_prime", ev.lambda_prime.margin, ev.lambda_prime.margin >= 0.0,
                       ev.lambda_prime.witness));
  out.push_back(record("J_cone", ev.J.margin, ev.J.margin >= 0.0, ev.J.witness));
  out.push_back(record("G_cone", ev.G.margin, ev.G.margin >= 0.0, ev.G.witness));
  out.push_back(record("J_psi_cone", ev.J_psi.margin, ev.J_psi.margin >= 0.0, ev.J_psi.witness));
  out.push_back(record("psi_gradient_cone", ev.G_psi.margin, ev.G_psi.margin >= 0.0, ev.G_psi.witness));
  if (ev.degenerate.set) {
    out.push_back(record("delta_ratio", -inf, false, ev.degenerate.witness));
  } else {
    double lo = ev.ratio.lo - opt.delta1, hi = opt.delta2 - ev.ratio.hi;
    bool pass = ev.ratio.lo > opt.delta1 && ev.ratio.hi <= opt.delta2;
    out.push_back(record("delta_ratio", std::min(lo, hi), pass, lo <= hi ? ev.ratio.lo_w : ev.ratio.hi_w));
  }
  double ricci_margin = ev.ricci.margin + opt.ricci_C;
  out.push_back(record("ricci_lower", ricci_margin, ricci_margin >= 0.0, ev.ricci.witness));
  return out;
}

bool margins_stable(const std::vector<ConditionRecord>& a, const std::vector<ConditionRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double x = a[i].margin, y = b[i].margin;
    if (std::isinf(x) || std::isinf(y)) {
      if (x != y) return false;
      continue;
    }
    if (std::abs(x - y) > 0.01 * std::abs(x) + 1e-12) return false;
  }
  return true;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

bool ConeSpec::sum_ok() const { return theta1 + theta2 <= pi / 2 + 1e-15; }

void validate_cone(const ConeSpec& cone) {
  auto ok = [](double t) { return t >= 0.0 && t < pi / 2; };
  if (!ok(cone.theta1) || !ok(cone.theta2)) fail(ErrorCode::invalid_argument, "cone angles must lie in [0, pi/2)");
}

const ConditionRecord* CertificateReport::find(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

double CertificateReport::fitted_value(const std::string& key) const {
  for (const auto& [k, v] : fitted)
    if (k == key) return v;
  fail(ErrorCode::internal, "certificate has no fitted value " + key);
}

std::string CertificateReport::flag(const std::string& key) const {
  for (const auto& [k, v] : flags)
    if (k == key) return v;
  return "";
}

double cone_margin(const LocalGeometry& geo, const Vec& vec, double theta2) {
  Vec eta = geo.eta();
  return geo.dot(vec, eta, MetricKind::hat) - std::cos(theta2) * geo.norm(vec, MetricKind::hat) * geo.eta_norm_hat();
}

double cone_margin(const Ambient& amb, const AmbientPoint& p, const TangentVector& vec, double theta2) {
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return cone_margin(geo, components(vec, amb.n), theta2);
}

Vec eval_J(const Ambient& amb, const AmbientPoint& p, const Vec& V, double theta2) {
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  Vec j1 = geo.J(V, amb.band.rho1), j2 = geo.J(V, amb.band.rho2);
  return cone_margin(geo, j1, theta2) <= cone_margin(geo, j2, theta2) ? j1 : j2;
}

Vec eval_G(const Ambient& amb, const AmbientPoint& p) { return LocalGeometry(amb.profile, amb.factor, amb.n, p).G(); }

double delta_ratio(const Ambient& amb, const AmbientPoint& p) {
  return LocalGeometry(amb.profile, amb.factor, amb.n, p).delta_ratio();
}

std::string report_timestamp() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  return epoch && *epoch ? std::string(epoch) : std::string("unset");
}

CertificateReport certify_lte(const Ambient& amb, const std::string& scenario_id, const ConeSpec& cone,
                              const SamplingPlan& plan, const LteOptions& options) {
  validate_cone(cone);
  validate_band(amb.band);
  validate_plan(plan, amb.profile.r_min);

  LteEval ev = reduce_lte(amb, cone, plan, options.threads);
  CertificateReport rep;
  rep.kind = "lte";
  rep.scenario_id = scenario_id;
  rep.plan = plan;
  rep.timestamp = report_timestamp();
  rep.conditions = lte_conditions(ev, cone, options, plan);
  rep.pass = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& c) { return c.pass; });

  bool degenerate = ev.degenerate.set;
  rep.fitted = {{"delta1", degenerate ? -inf : ev.ratio.lo},
                {"delta2", degenerate ? inf : ev.ratio.hi},
                {"growth_delta1", degenerate ? -inf : ev.growth.lo},
                {"growth_delta2", degenerate ? inf : ev.growth.hi},
                {"ricci_C", -ev.ricci.margin},
                {"hat_scalar_min", ev.scalar.lo},
                {"lambda_prime_min", ev.lambda_prime.margin}};

  rep.converged = true;
  if (options.check_convergence) {
    LteEval fine = reduce_lte(amb, cone, refine_plan(plan), options.threads);
    rep.converged = margins_stable(rep.conditions, lte_conditions(fine, cone, options, plan));
  }
  double angle = pi / 2 - cone.theta1 - cone.theta2;
  rep.flags = {{"angle_sum_boundary", yes_no(std::abs(angle) <= 1e-12)},
               {"angle_sum_strict", yes_no(angle > 1e-12)},
               {"delta2_le_1", yes_no(!degenerate && ev.ratio.hi <= 1.0 + 1e-12)},
               {"growth_delta2_le_1", yes_no(!degenerate && ev.growth.hi <= 1.0 + 1e-12)},
               {"converged", yes_no(rep.converged)}};
  return rep;
}

namespace {

struct AsymEval {
  Worst C1, C2, C3, C4, CB, Cpsi;  // stored negated so that "worst" is the largest fit
  double f_sup = 0.0;
  Worst errors;
};

void offer_max(Worst& w, double v, const Witness& wit) { w.offer(-v, wit); }

AsymEval evaluate_asym_point(const Ambient& amb, const AsymptoticParams& par, const SamplingPlan& plan, double r,
                             const Vec& site) {
  AsymEval ev;
  std::optional<LocalGeometry> geo_opt;
  try {
    geo_opt.emplace(amb.profile, amb.factor, amb.n, AmbientPoint{r, site});
  } catch (const Error&) {
    Witness w;
    w.r = r;
    w.angular = site;
    ev.errors.offer(-inf, w);
    return ev;
  }
  const LocalGeometry& geo = *geo_opt;
  const WarpingJet& lj = geo.warping();
  const FactorJet& fj = geo.factor_jet();
  double lam = lj.value;
  Witness base = at_point(geo);
  int m = amb.n + 1;

  offer_max(ev.C1, lj.d1 / std::pow(lam, par.beta), base);
  double grad = std::sqrt(geo.grad_bar_f_sq());
  double cnorm = std::max({std::abs(fj.value), grad, geo.hessian_bar_norm()});
  offer_max(ev.C2, cnorm * std::pow(lam, par.alpha), base);
  ev.f_sup = std::abs(fj.value);
  offer_max(ev.C3, std::max(0.0, (1.0 - lj.d2 / lam) * std::pow(lam, par.gamma)), base);
  for (double rho : {amb.band.rho1, amb.band.rho2}) {
    Witness w = base;
    w.rho = rho;
    offer_max(ev.C4, std::abs(geo.defect() + rho) / (lam * lam) * std::pow(lam, par.alpha), w);
  }
  // |ν(λ f_r)| maximized over ĝ-unit ν is the ĝ-dual norm of d(λ f_r)
  double dual = 0.0;
  for (int a = 0; a < m; ++a) {
    double c = lam * fj.hess[a * m] + (a == 0 ? lj.d1 * fj.grad[0] : 0.0);
    dual += c * c / geo.hat_metric(a);
  }
  offer_max(ev.Cpsi, std::sqrt(dual) / ((1.0 + lj.d1) * std::pow(lam, -par.alpha)), base);
  for (const Vec& V : cone_vectors(geo, pi / 2, plan.cone_samples, plan.seed)) {
    for (double rho : {amb.band.rho1, amb.band.rho2}) {
      double b = std::abs(geo.hat_ricci_at(rho, V, V) + amb.n * geo.dot(V, V, MetricKind::hat)) *
                 std::pow(lam, par.alpha);
      offer_max(ev.CB, b, with_vector(base, V, rho));
    }
  }
  return ev;
}

AsymEval reduce_asym(const Ambient& amb, const AsymptoticParams& par, const SamplingPlan& plan, unsigned threads) {
  std::vector<Vec> sites = angular_sites(amb.n, plan.angular_samples, plan.seed, amb.factor.radial);
  std::size_t S = sites.size();
  std::vector<AsymEval> evals(plan.r_grid.size() * S);
  parallel_for(evals.size(), threads, [&](std::size_t k) {
    evals[k] = evaluate_asym_point(amb, par, plan, plan.r_grid[k / S], sites[k % S]);
  });
  AsymEval total;
  for (const AsymEval& e : evals) {
    total.C1.merge(e.C1);
    total.C2.merge(e.C2);
    total.C3.merge(e.C3);
    total.C4.merge(e.C4);
    total.CB.merge(e.CB);
    total.Cpsi.merge(e.Cpsi);
    total.errors.merge(e.errors);
    total.f_sup = std::max(total.f_sup, e.f_sup);
  }
  return total;
}

std::vector<ConditionRecord> asym_conditions(const AsymEval& ev, const AsymptoticParams& par, const Ambient& amb,
                                             const SamplingPlan& plan) {
  std::vector<ConditionRecord> out;
  Witness pw;
  pw.r = plan.r_grid.front();
  pw.vector = {par.alpha, par.beta, par.gamma};
  double pm = std::min({par.alpha - 2.0 - par.beta, par.gamma - 3.0, par.beta});
  out.push_back(record("params", pm, par.alpha_ok() && par.beta_ok() && par.gamma_ok(), pw));
  if (ev.errors.set) out.push_back(record("domain", -inf, false, ev.errors.witness));
  auto fit = [&](const char* id, const Worst& w, double supplied) {
    double m = supplied - (-w.margin);
    out.push_back(record(id, m, m >= 0.0, w.witness));
  };
  fit("lambda_prime_growth", ev.C1, par.C1);
  fit("f_decay", ev.C2, par.C2);
  fit("lambda_convexity", ev.C3, par.C3);
  Witness bw;
  bw.r = plan.r_grid.front();
  bw.vector = {amb.band.rho1, amb.band.rho2};
  double bm = amb.band.rho2 - amb.band.rho1;
  out.push_back(record("fiber_band", bm, bm >= 0.0, bw));
  fit("warping_defect", ev.C4, par.C4);
  return out;
}

}  // namespace

CertificateReport certify_asymptotics(const Ambient& amb, const std::string& scenario_id,
                                      const AsymptoticParams& params, const SamplingPlan& plan, unsigned threads) {
  validate_plan(plan, amb.profile.r_min);
  AsymEval ev = reduce_asym(amb, params, plan, threads);
  CertificateReport rep;
  rep.kind = "asymptotics";
  rep.scenario_id = scenario_id;
  rep.plan = plan;
  rep.timestamp = report_timestamp();
  rep.conditions = asym_conditions(ev, params, amb, plan);
  rep.pass = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](const auto& c) { return c.pass; });
  rep.fitted = {{"C1", -ev.C1.margin},   {"C2", -ev.C2.margin}, {"C3", -ev.C3.margin},
                {"C4", -ev.C4.margin},   {"CB", -ev.CB.margin}, {"Cpsi", -ev.Cpsi.margin},
                {"f_sup", ev.f_sup},     {"alpha", params.alpha}, {"beta", params.beta},
                {"gamma", params.gamma}};
  AsymEval fine = reduce_asym(amb, params, refine_plan(plan), threads);
  rep.converged = margins_stable(rep.conditions, asym_conditions(fine, params, amb, plan));
  rep.flags = {{"alpha_gt_2_plus_beta", yes_no(params.alpha_ok())},
               {"gamma_gt_3", yes_no(params.gamma_ok())},
               {"beta_gt_0", yes_no(params.beta_ok())},
               {"converged", yes_no(rep.converged)}};
  return rep;
}

}  // namespace imcf
