#include "monitors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "errors.hpp"

namespace imcf {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const char* kLte = "lte_certificate";
const char* kAsym = "asymptotics_certificate";
const char* kBoth = "lte_certificate+asymptotics_certificate";

CheckResult skipped(const std::string& id, const std::string& gate, const std::string& reason) {
  CheckResult c;
  c.id = id;
  c.gate = gate;
  c.verdict = Verdict::skipped;
  c.skip_reason = reason;
  return c;
}

double relative(double slack_side, double bound) {
  if (std::isinf(bound)) return bound > 0 ? (slack_side >= 0 ? 1.0 : -inf) : -inf;
  return slack_side / std::max(std::abs(bound), 1e-300);
}

// Fills the per-record series and the worst margin.
enum class Side { upper, lower };

void envelope(CheckResult& c, const Trajectory& traj, const std::function<double(std::size_t)>& bound,
              const std::function<double(const TrajectoryRecord&)>& observed, Side side, double slack) {
  c.margin = inf;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    double b = bound(k), o = observed(traj.records[k]);
    double m;
    if (side == Side::upper) m = std::isinf(b) && b > 0 ? 1.0 : relative(b - o, b);
    else m = std::isinf(b) && b < 0 ? 1.0 : relative(o - b, b);
    if (std::isnan(m)) m = -inf;
    c.bound.push_back(b);
    c.observed.push_back(o);
    c.margins.push_back(m);
    if (m < c.margin) {
      c.margin = m;
      c.t_worst = traj.records[k].t;
    }
  }
  c.verdict = c.margin >= -slack ? Verdict::pass : Verdict::fail;
}

// (e^{-2t/n} − e^{-et/n})/(e − 2), continuous through e = 2.
double exp_difference(double e, double t, int n) {
  if (std::abs(e - 2.0) < 1e-9) return (t / n) * std::exp(-2.0 * t / n);
  return (std::exp(-2.0 * t / n) - std::exp(-e * t / n)) / (e - 2.0);
}

double lambda_low(const EnvelopeParams& p, const TrajectoryRecord& r0, double t) {
  return r0.eta_min * std::exp(p.delta1 * t / p.n);
}

double lambda_up(const EnvelopeParams& p, const TrajectoryRecord& r0, double t) {
  return r0.eta_max * std::exp(p.delta2 * t / p.n);
}

double H_low_first(const EnvelopeParams& p, const TrajectoryRecord& r0, double t) {
  return std::exp(-p.f_sup) * r0.H_min * (r0.w_min / r0.w_max) * std::exp(-p.delta2 * t / p.n);
}

double W_up(const EnvelopeParams& p, const TrajectoryRecord& r0, double t) {
  return std::exp(p.f_sup) * lambda_up(p, r0, t);
}

double z_upper(const EnvelopeParams& p, const TrajectoryRecord& r0, double K, double t, double rate) {
  double C0 = r0.H_max * r0.H_max - p.n * p.n;
  return C0 * std::exp(-rate * t) + 2.0 * K * exp_difference(p.upper_exponent, t, p.n);
}

double horizon(const Trajectory& traj) { return traj.records.back().t - traj.records.front().t; }

double upper_K(const EnvelopeParams& p, const TrajectoryRecord& r0, double T) {
  double e = p.upper_exponent;
  return p.n * p.CB * std::pow(r0.eta_min, -e) * std::exp(e * (1.0 - p.delta1) * T / p.n);
}

double C9_fit(const Trajectory& traj, const EnvelopeParams& p, double& C7w_sup, double& C8_sup) {
  const TrajectoryRecord& r0 = traj.records.front();
  int n = p.n;
  double H0 = H_low_first(p, r0, 0.0);
  double e2F = std::exp(2.0 * p.f_sup);
  double rate = (3.0 + 2.0 * p.delta2 + p.beta - p.alpha - p.gamma) / n;
  double C9 = 0.0;
  C7w_sup = C8_sup = 0.0;
  for (const TrajectoryRecord& r : traj.records) {
    double t = r.t - r0.t;
    double ll = lambda_low(p, r0, t), lu = lambda_up(p, r0, t);
    double grow = std::exp(2.0 * p.delta2 * t / n) / (H0 * H0);
    double c = (n * e2F * p.C3 * std::pow(ll, -p.gamma) + n * (1.0 - 1.0 / e2F) + p.CB * std::pow(ll, -p.alpha)) * grow;
    double c7 = c * W_up(p, r0, t);
    double c8 = n * p.Cpsi * (1.0 + p.C1 * std::pow(lu, p.beta)) * std::pow(ll, -p.alpha) * grow;
    double scale = std::exp(-rate * t);
    C7w_sup = std::max(C7w_sup, c7 * scale);
    C8_sup = std::max(C8_sup, c8 * scale);
    C9 = std::max(C9, (c7 + c8) * scale);
  }
  return C9;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::skipped: return "SKIPPED";
  }
  return "?";
}

double CheckResult::fitted_value(const std::string& key) const {
  for (const auto& [k, v] : fitted)
    if (k == key) return v;
  fail(ErrorCode::invalid_argument, "check " + id + " has no fitted value " + key);
}

void EnvelopeParams::note(const std::string& name, double value, const std::string& source) {
  for (FittedConstant& c : log)
    if (c.name == name) {
      c.value = value;
      c.source = source;
      return;
    }
  log.push_back({name, value, source});
}

EnvelopeParams envelope_params(const CertificateReport& lte, const CertificateReport& asym, int n, double theta1,
                               const MonitorOptions& options) {
  EnvelopeParams p;
  p.n = n;
  p.theta1 = theta1;
  p.lte_certified = lte.pass;
  p.asym_certified = asym.pass;
  p.lambda_prime_positive = lte.fitted_value("lambda_prime_min") > 0.0;
  p.growth_delta2_le_1 = lte.flag("growth_delta2_le_1") == "yes";
  p.delta1 = lte.fitted_value("growth_delta1");
  p.delta2 = lte.fitted_value("growth_delta2");
  p.ricci_C = lte.fitted_value("ricci_C");
  p.alpha = asym.fitted_value("alpha");
  p.beta = asym.fitted_value("beta");
  p.gamma = asym.fitted_value("gamma");
  p.C1 = asym.fitted_value("C1");
  p.C3 = asym.fitted_value("C3");
  p.CB = asym.fitted_value("CB");
  p.Cpsi = asym.fitted_value("Cpsi");
  p.f_sup = asym.fitted_value("f_sup");
  p.note("delta1", p.delta1, "lte: inf of lambda'/psi_hat over the cone samples");
  p.note("delta2", p.delta2, "lte: sup of lambda'/psi_hat over the cone samples");
  p.note("ricci_C", p.ricci_C, "lte: -min Rc_hat(V,V) over unit cone samples");
  p.note("F_inf", p.f_sup, "asymptotics: sup |f| over the plan");
  for (const char* k : {"C1", "C3", "CB", "Cpsi"}) p.note(k, asym.fitted_value(k), "asymptotics: sampled sup");

  if (std::isnan(options.c0_rate)) {
    p.c0_rate = 2.0 / n;
    p.note("c0_rate", p.c0_rate, "default 2/n from the H^2 evolution");
  } else {
    p.c0_rate = options.c0_rate;
    p.note("c0_rate", p.c0_rate, "user");
  }
  if (options.upper_exponent == "alpha") {
    p.upper_exponent = p.alpha;
  } else if (options.upper_exponent == "gamma") {
    p.upper_exponent = p.gamma;
  } else {
    fail(ErrorCode::invalid_argument, "upper exponent must be alpha or gamma");
  }
  p.upper_exponent_source = options.upper_exponent;
  p.note("upper_exponent", p.upper_exponent, options.upper_exponent);
  return p;
}

CheckResult check_w_floor(const Trajectory& traj, const EnvelopeParams& p) {
  if (!p.lte_certified) return skipped("w_floor", kLte, "hypothesis_failed");
  CheckResult c;
  c.id = "w_floor";
  c.gate = kLte;
  c.margin = inf;
  for (const TrajectoryRecord& r : traj.records) {
    double m = r.w_min - traj.w_floor;
    c.bound.push_back(traj.w_floor);
    c.observed.push_back(r.w_min);
    c.margins.push_back(m);
    if (m < c.margin) {
      c.margin = m;
      c.t_worst = r.t;
    }
  }
  c.fitted = {{"w_floor", traj.w_floor}};
  c.verdict = c.margin > 0.0 ? Verdict::pass : Verdict::fail;
  return c;
}

CheckResult check_u_max(const Trajectory& traj, const EnvelopeParams& p, double tolerance) {
  if (!p.lte_certified) return skipped("u_max", kLte, "hypothesis_failed");
  CheckResult c;
  c.id = "u_max";
  c.gate = kLte;
  double u0 = traj.records.front().u_max;
  c.margin = inf;
  double rate = -inf;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const TrajectoryRecord& r = traj.records[k];
    double m = u0 - r.u_max;
    c.bound.push_back(u0);
    c.observed.push_back(r.u_max);
    c.margins.push_back(m);
    if (m < c.margin) {
      c.margin = m;
      c.t_worst = r.t;
    }
    if (k > 0) {
      const TrajectoryRecord& q = traj.records[k - 1];
      if (r.t > q.t) rate = std::max(rate, (r.u_max - q.u_max) / (r.t - q.t));
    }
  }
  c.fitted = {{"u_max0", u0}, {"max_increase_rate", rate}};
  c.verdict = c.margin >= -tolerance ? Verdict::pass : Verdict::fail;
  return c;
}

CheckResult check_eta_growth(const Trajectory& traj, const EnvelopeParams& p, double slack) {
  if (!p.lte_certified || !p.lambda_prime_positive) return skipped("eta_growth", kLte, "hypothesis_failed");
  const TrajectoryRecord& r0 = traj.records.front();
  CheckResult lo, hi;
  envelope(lo, traj, [&](std::size_t k) { return lambda_low(p, r0, traj.records[k].t - r0.t); },
           [](const TrajectoryRecord& r) { return r.eta_min; }, Side::lower, slack);
  envelope(hi, traj, [&](std::size_t k) { return lambda_up(p, r0, traj.records[k].t - r0.t); },
           [](const TrajectoryRecord& r) { return r.eta_max; }, Side::upper, slack);
  CheckResult c = lo.margin <= hi.margin ? lo : hi;
  c.id = "eta_growth";
  c.gate = kLte;
  c.fitted = {{"lower_margin", lo.margin}, {"upper_margin", hi.margin}, {"delta1", p.delta1}, {"delta2", p.delta2}};
  c.verdict = std::min(lo.margin, hi.margin) >= -slack ? Verdict::pass : Verdict::fail;
  return c;
}

double upper_H_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double K, double t) {
  double v = p.n * p.n + z_upper(p, r0, K, t, p.c0_rate);
  return std::sqrt(std::max(v, 0.0));
}

std::vector<CheckResult> check_H_envelopes(const Trajectory& traj, EnvelopeParams& p, double slack) {
  std::vector<CheckResult> out;
  const TrajectoryRecord& r0 = traj.records.front();
  int n = p.n;
  auto t_of = [&](std::size_t k) { return traj.records[k].t - r0.t; };

  if (p.lte_certified) {
    CheckResult lo;
    envelope(lo, traj, [&](std::size_t k) { return H_low_first(p, r0, t_of(k)); },
             [](const TrajectoryRecord& r) { return r.H_min; }, Side::lower, slack);
    lo.id = "H_lower_first";
    lo.gate = kLte;
    lo.fitted = {{"H_low0", H_low_first(p, r0, 0.0)}};
    out.push_back(lo);

    double Hup = std::max(r0.H_max, std::sqrt(std::max(p.ricci_C, 0.0) * n));
    p.note("H_upper_first", Hup, "max(max H(0), sqrt(n*max(ricci_C,0)))");
    CheckResult up;
    envelope(up, traj, [&](std::size_t) { return Hup; }, [](const TrajectoryRecord& r) { return r.H_max; },
             Side::upper, slack);
    up.id = "H_upper_first";
    up.gate = kLte;
    up.fitted = {{"H_upper", Hup}};
    out.push_back(up);
  } else {
    out.push_back(skipped("H_lower_first", kLte, "hypothesis_failed"));
    out.push_back(skipped("H_upper_first", kLte, "hypothesis_failed"));
  }

  double T = horizon(traj);
  double K = upper_K(p, r0, T);
  double C0 = r0.H_max * r0.H_max - n * n;
  if (p.asym_certified) {
    p.note("C0", C0, "(max H(0))^2 - n^2");
    p.note("K_upper", K, "n*CB*min|eta|(0)^(-e)*exp(e(1-delta1)T/n), e = upper exponent");
    CheckResult up;
    envelope(up, traj, [&](std::size_t k) { return upper_H_bound(p, r0, K, t_of(k)); },
             [](const TrajectoryRecord& r) { return r.H_max; }, Side::upper, slack);
    up.id = "H_upper_asymptotic";
    up.gate = kAsym;
    // literal rate-2 envelope, reported only
    double lit = inf;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
      double b = std::sqrt(std::max(n * n + z_upper(p, r0, K, t_of(k), 2.0), 0.0));
      lit = std::min(lit, relative(b - traj.records[k].H_max, b));
    }
    up.fitted = {{"C0", C0}, {"K", K}, {"c0_rate", p.c0_rate}, {"exponent", p.upper_exponent},
                 {"literal_rate2_margin", lit}};
    out.push_back(up);
  } else {
    out.push_back(skipped("H_upper_asymptotic", kAsym, "hypothesis_failed"));
  }

  if (p.lte_certified && p.asym_certified) {
    double e2F = std::exp(2.0 * p.f_sup);
    double u0 = r0.u_max;
    double C7 = 0.0, C6 = 0.0;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
      double t = t_of(k);
      double ll = lambda_low(p, r0, t), lu = lambda_up(p, r0, t), Hl = H_low_first(p, r0, t);
      double z = std::max(z_upper(p, r0, K, t, p.c0_rate), 0.0);
      double a = u0 * ((1.0 - 1.0 / e2F) / n + z / (e2F * n * n * n) + n * e2F * p.C3 * std::pow(ll, -p.gamma) / (Hl * Hl));
      C7 = std::max(C7, a * std::exp(p.gamma * t / n));
      double b = n * p.Cpsi * (1.0 + p.C1 * std::pow(lu, p.beta)) * std::pow(ll, -p.alpha) * u0 * u0 / Hl;
      C6 = std::max(C6, b * std::exp(-(1.0 + p.beta - p.alpha) * t / n));
    }
    double A = n * C7 / (p.gamma - 1.0), B = n * C6 / (p.alpha - p.beta - 2.0);
    p.note("C7", C7, "sup over record times of the u-equation source, weight exp(gamma t/n)");
    p.note("C6", C6, "sup over record times of the psi source, weight exp(-(1+beta-alpha)t/n)");
    auto ub = [&](double t) {
      return (u0 + A + B) * std::exp(-t / n) - A * std::exp(-p.gamma * t / n) -
             B * std::exp((1.0 + p.beta - p.alpha) * t / n);
    };
    CheckResult lo;
    envelope(lo, traj,
             [&](std::size_t k) {
               double t = t_of(k), u = ub(t);
               return u > 0.0 ? 1.0 / (W_up(p, r0, t) * u) : inf;
             },
             [](const TrajectoryRecord& r) { return r.H_min; }, Side::lower, slack);
    lo.id = "H_lower_asymptotic";
    lo.gate = kBoth;
    lo.fitted = {{"C6", C6}, {"C7", C7}, {"A", A}, {"B", B}};
    out.push_back(lo);
  } else {
    out.push_back(skipped("H_lower_asymptotic", kBoth, "hypothesis_failed"));
  }
  return out;
}

double w_lower_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double C9, double t) {
  double D = p.alpha + p.gamma - 2.0 - 2.0 * p.delta2 - p.beta;
  int n = p.n;
  return r0.w_min * std::exp(t / n) + (n * C9 / D) * (std::exp(-(D - 1.0) * t / n) - std::exp(t / n));
}

double literal_w_lower_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double C9, double t) {
  double D = p.alpha + p.gamma - 2.0 - 2.0 * p.delta2 - p.beta;
  int n = p.n;
  return r0.w_min * std::exp(t / n) + (n * C9 / D) * (std::exp(-(D - 1.0) * t / n) - 1.0);
}

CheckResult check_w_lower_envelope(const Trajectory& traj, EnvelopeParams& p, double slack) {
  if (!(p.lte_certified && p.asym_certified && p.growth_delta2_le_1))
    return skipped("w_lower_envelope", kBoth, "hypothesis_failed");
  const TrajectoryRecord& r0 = traj.records.front();
  double C7w, C8;
  double C9 = C9_fit(traj, p, C7w, C8);
  p.note("C9", C9, "sup over record times of the w-equation sources, weight exp(-(3+2delta2+beta-alpha-gamma)t/n)");
  CheckResult c;
  envelope(c, traj, [&](std::size_t k) { return w_lower_bound(p, r0, C9, traj.records[k].t - r0.t); },
           [](const TrajectoryRecord& r) { return r.w_min; }, Side::lower, slack);
  c.id = "w_lower_envelope";
  c.gate = kBoth;
  double lit = inf;
  for (const TrajectoryRecord& r : traj.records) {
    double b = literal_w_lower_bound(p, r0, C9, r.t - r0.t);
    lit = std::min(lit, relative(r.w_min - b, b));
  }
  c.fitted = {{"C9", C9}, {"C7_term", C7w}, {"C8_term", C8}, {"literal_form_margin", lit}};
  return c;
}

CheckResult check_gradient_bound(const Trajectory& traj, EnvelopeParams& p, double slack) {
  if (!(p.lte_certified && p.asym_certified && p.growth_delta2_le_1))
    return skipped("gradient_bound", kBoth, "hypothesis_failed");
  const TrajectoryRecord& r0 = traj.records.front();
  double C7w, C8;
  double C9 = C9_fit(traj, p, C7w, C8);
  CheckResult c;
  envelope(c, traj,
           [&](std::size_t k) {
             double t = traj.records[k].t - r0.t;
             double wl = w_lower_bound(p, r0, C9, t);
             return wl > 0.0 ? std::exp(p.f_sup) * lambda_up(p, r0, t) / wl : inf;
           },
           [](const TrajectoryRecord& r) { return r.v_max; }, Side::upper, slack);
  c.id = "gradient_bound";
  c.gate = kBoth;
  double C_fit = *std::max_element(c.bound.begin(), c.bound.end());
  p.note("C_gradient", C_fit, "max over record times of exp(F_inf)*lambda_up(t)/w_lower(t)");
  c.fitted = {{"C_fit", C_fit}, {"C9", C9}};
  return c;
}

CheckResult check_w_evolution_residual(const Trajectory& traj, const Ambient& amb, double threshold) {
  if (traj.mode != FlowMode::rot_sym) return skipped("w_evolution_residual", "none", "not_rot_sym");
  CheckResult c;
  c.id = "w_evolution_residual";
  c.gate = "none";
  const auto& rec = traj.records;
  int n = traj.n;
  double R1 = 0.0, R2 = 0.0;
  double worst = -1.0;
  for (std::size_t k = 1; k + 1 < rec.size(); ++k) {
    double dt_l = rec[k].t - rec[k - 1].t, dt_r = rec[k + 1].t - rec[k].t;
    // three-point derivative on a possibly uneven grid
    double dw = (rec[k + 1].w_min - rec[k].w_min) * dt_l / (dt_r * (dt_l + dt_r)) +
                (rec[k].w_min - rec[k - 1].w_min) * dt_r / (dt_l * (dt_l + dt_r));
    LocalGeometry geo(amb.profile, amb.factor, n, AmbientPoint{rec[k].F_min, {}});
    double H = rec[k].H_min, w = rec[k].w_min;
    Vec er(geo.dim(), 0.0);
    er[0] = 1.0;
    Vec nu = geo.normalize(er, MetricKind::hat);
    double rhs1 = geo.psi_hat() / H;
    double rhs2 = (H * H / n * w + geo.hat_ricci_at(amb.band.rho1, nu, nu) * w + n * geo.nu_psi_hat(nu)) / (H * H);
    double span = 0.5 * (dt_l + dt_r);
    double e1 = std::abs(dw - rhs1) * span, e2 = std::abs(dw - rhs2) * span;
    R1 += e1;
    R2 += e2;
    if (std::max(e1, e2) > worst) {
      worst = std::max(e1, e2);
      c.t_worst = rec[k].t;
    }
    c.bound.push_back(rhs1);
    c.observed.push_back(dw);
    c.margins.push_back(threshold - std::max(R1, R2));
  }
  c.margin = threshold - std::max(R1, R2);
  c.fitted = {{"residual_psi_over_H", R1}, {"residual_assembly", R2}, {"threshold", threshold}};
  c.verdict = c.margin >= 0.0 ? Verdict::pass : Verdict::fail;
  if (rec.size() < 3) {
    c.verdict = Verdict::skipped;
    c.skip_reason = "too_few_records";
  }
  return c;
}

CheckResult check_shape_eigen_bounded(const Trajectory& traj, const EnvelopeParams& p) {
  if (!p.lte_certified) return skipped("shape_eigen_bounded", kLte, "hypothesis_failed");
  const auto& rec = traj.records;
  double t_half = 0.5 * (rec.front().t + rec.back().t);
  auto half = std::lower_bound(rec.begin(), rec.end(), t_half,
                               [](const TrajectoryRecord& r, double t) { return r.t < t; });
  CheckResult c;
  c.id = "shape_eigen_bounded";
  c.gate = kLte;
  double k_half = half == rec.end() ? rec.back().k_max : half->k_max;
  double k_end = rec.back().k_max, k_sup = -inf;
  for (const TrajectoryRecord& r : rec) k_sup = std::max(k_sup, r.k_max);
  c.margin = relative(10.0 * k_half - k_end, 10.0 * k_half);
  c.t_worst = rec.back().t;
  c.fitted = {{"k_half", k_half}, {"k_end", k_end}, {"k_sup", k_sup}};
  c.verdict = k_end <= 10.0 * k_half ? Verdict::pass : Verdict::fail;
  return c;
}

bool MonitorReport::pass() const {
  for (const CheckResult& c : checks)
    if (c.verdict == Verdict::fail) return false;
  for (const auto& [k, v] : header)
    if (k == kLte && v != "PASS") return false;
  return true;
}

const CheckResult* MonitorReport::find(const std::string& id) const {
  for (const CheckResult& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

MonitorReport evaluate_monitors(const Trajectory& traj, const Ambient& amb, const CertificateReport& lte,
                                const CertificateReport& asym, const MonitorOptions& options) {
  if (traj.records.empty()) fail(ErrorCode::invalid_argument, "trajectory has no records");
  MonitorReport rep;
  EnvelopeParams p = envelope_params(lte, asym, traj.n, traj.theta1, options);
  rep.header.emplace_back("scenario", traj.scenario_id);
  rep.header.emplace_back("mode", flow_mode_name(traj.mode));
  rep.header.emplace_back(kLte, lte.pass ? "PASS" : "FAIL");
  for (const ConditionRecord& c : lte.conditions)
    if (!c.pass) rep.header.emplace_back("lte_failed_condition", c.id);
  rep.header.emplace_back(kAsym, asym.pass ? "PASS" : "FAIL");
  for (const ConditionRecord& c : asym.conditions)
    if (!c.pass) rep.header.emplace_back("asymptotics_failed_condition", c.id);
  rep.header.emplace_back("run_tag", lte.pass ? "certified" : "uncertified");
  rep.header.emplace_back("c0_rate", std::isnan(options.c0_rate) ? "default_2_over_n" : "user");
  rep.header.emplace_back("upper_exponent", p.upper_exponent_source);
  if (p.alpha != p.gamma) rep.header.emplace_back("upper_exponent_flag", "alpha_differs_from_gamma");
  if (traj.halt) {
    rep.header.emplace_back("halt", error_code_name(traj.halt->code));
    rep.header.emplace_back("halt_message", traj.halt->message);
  }

  CheckResult done;
  done.id = "run_completed";
  done.gate = "none";
  done.margin = traj.halt ? -1.0 : 0.0;
  done.t_worst = traj.halt ? traj.halt->t : traj.records.back().t;
  done.verdict = traj.halt ? Verdict::fail : Verdict::pass;
  rep.checks.push_back(done);

  rep.checks.push_back(check_w_floor(traj, p));
  rep.checks.push_back(check_u_max(traj, p, options.u_tolerance));
  rep.checks.push_back(check_eta_growth(traj, p, options.slack));
  for (CheckResult& c : check_H_envelopes(traj, p, options.slack)) rep.checks.push_back(std::move(c));
  rep.checks.push_back(check_shape_eigen_bounded(traj, p));
  rep.checks.push_back(check_w_lower_envelope(traj, p, options.slack));
  rep.checks.push_back(check_gradient_bound(traj, p, options.slack));
  rep.checks.push_back(check_w_evolution_residual(traj, amb, options.residual_threshold));
  rep.params = std::move(p);
  return rep;
}

}  // namespace imcf
