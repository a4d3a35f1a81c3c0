#include "flow_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "parallel.hpp"
#include "scenarios.hpp"

namespace imcf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

bool halting(ErrorCode c) {
  switch (c) {
    case ErrorCode::non_mean_convex:
    case ErrorCode::star_shape_lost:
    case ErrorCode::cfl_violation:
    case ErrorCode::domain:
    case ErrorCode::non_positive_warping:
    case ErrorCode::degenerate_potential:
      return true;
    default:
      return false;
  }
}

int wrap(int l, int n) { return ((l % n) + n) % n; }

// Grid value with reflective ghosts across the poles.
double ghost_value(const FlowState& s, int k, int l) {
  const Grid& g = s.grid;
  if (s.mode == FlowMode::rot_sym) return s.F[0];
  int shift = 0;
  while (k < 0 || k >= g.n_theta) {
    if (k < 0) k = -k - 1;
    else k = 2 * g.n_theta - 1 - k;
    shift += g.n_phi / 2;
  }
  if (s.mode == FlowMode::axisym) return s.F[k];
  return s.at(k, wrap(l + shift, g.n_phi));
}

std::array<double, 5> lagrange5(double x0, double h, double x) {
  std::array<double, 5> w{};
  for (int a = 0; a < 5; ++a) {
    double xa = x0 + (a - 2) * h, p = 1.0;
    for (int b = 0; b < 5; ++b)
      if (b != a) p *= (x - (x0 + (b - 2) * h)) / (xa - (x0 + (b - 2) * h));
    w[a] = p;
  }
  return w;
}

double interp_F(const FlowState& s, int i, int j, double theta, double phi) {
  if (s.mode == FlowMode::rot_sym) return s.F[0];
  const Grid& g = s.grid;
  auto wt = lagrange5(g.theta[i], g.d_theta, theta);
  if (s.mode == FlowMode::axisym) {
    double v = 0.0;
    for (int a = 0; a < 5; ++a) v += wt[a] * ghost_value(s, i + a - 2, 0);
    return v;
  }
  auto wp = lagrange5(g.phi[j], g.d_phi, phi);
  double v = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) v += wt[a] * wp[b] * ghost_value(s, i + a - 2, j + b - 2);
  return v;
}

Vec speeds(const std::vector<NodeGeometry>& geo) {
  Vec s(geo.size());
  for (std::size_t k = 0; k < geo.size(); ++k) s[k] = geo[k].v_bar * std::exp(-geo[k].f) / geo[k].H_hat;
  return s;
}

struct Advance {
  FlowState state;
  std::vector<NodeGeometry> geo;
};

Advance advance(const Ambient& amb, const FlowState& state, const std::vector<NodeGeometry>& g0, double dt,
                const StepOptions& opt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_argument, "step size must be positive");
  double limit = cfl_limit(amb, state, g0);
  if (dt > limit * (1.0 + 1e-12))
    fail(ErrorCode::cfl_violation,
         "dt=" + std::to_string(dt) + " exceeds the stability limit " + std::to_string(limit));
  Vec s0 = speeds(g0);
  FlowState mid = state;
  for (std::size_t k = 0; k < mid.F.size(); ++k) mid.F[k] += 0.5 * dt * s0[k];
  Vec s1 = speeds(graph_geometry(amb, mid, opt.threads));
  Advance out{state, {}};
  for (std::size_t k = 0; k < out.state.F.size(); ++k) out.state.F[k] += dt * s1[k];
  out.state.t = state.t + dt;
  out.geo = graph_geometry(amb, out.state, opt.threads);
  for (const NodeGeometry& g : out.geo)
    if (!(g.w > opt.w_floor))
      fail(ErrorCode::star_shape_lost,
           "support function " + std::to_string(g.w) + " reached the floor " + std::to_string(opt.w_floor));
  return out;
}

double inverse_spacing_sq(const FlowState& s, int i) {
  const Grid& g = s.grid;
  switch (s.mode) {
    case FlowMode::rot_sym:
      return 0.0;
    case FlowMode::axisym:
      return 1.0 / (g.d_theta * g.d_theta);
    case FlowMode::full_s2: {
      double sp = std::sin(g.theta[i]) * g.d_phi;
      return 1.0 / (g.d_theta * g.d_theta) + 1.0 / (sp * sp);
    }
  }
  return 0.0;
}

}  // namespace

const char* flow_mode_name(FlowMode mode) {
  switch (mode) {
    case FlowMode::rot_sym: return "rot_sym";
    case FlowMode::axisym: return "axisym";
    case FlowMode::full_s2: return "full_s2";
  }
  return "rot_sym";
}

FlowMode parse_flow_mode(const std::string& text) {
  if (text == "rot_sym") return FlowMode::rot_sym;
  if (text == "axisym") return FlowMode::axisym;
  if (text == "full_s2") return FlowMode::full_s2;
  fail(ErrorCode::invalid_argument, "unknown flow mode '" + text + "'");
}

Grid make_grid(FlowMode mode, int resolution) {
  Grid g;
  if (mode == FlowMode::rot_sym) {
    g.theta = {pi / 2};
    g.phi = {0.0};
    return g;
  }
  if (resolution < 4) fail(ErrorCode::invalid_argument, "grid resolution too small");
  g.n_theta = resolution;
  g.d_theta = pi / resolution;
  for (int i = 0; i < resolution; ++i) g.theta.push_back((i + 0.5) * g.d_theta);
  if (mode == FlowMode::axisym) {
    g.phi = {0.0};
    return g;
  }
  g.n_phi = 2 * resolution;
  g.d_phi = 2 * pi / g.n_phi;
  for (int j = 0; j < g.n_phi; ++j) g.phi.push_back(j * g.d_phi);
  return g;
}

GraphJet graph_jet(const FlowState& s, int i, int j) {
  GraphJet jet;
  const Grid& g = s.grid;
  jet.theta = g.theta[i];
  jet.phi = g.phi[j];
  jet.F = s.at(i, j);
  if (s.mode == FlowMode::rot_sym) return jet;
  double ht = g.d_theta;
  double up = ghost_value(s, i + 1, j), dn = ghost_value(s, i - 1, j);
  jet.Ft = (up - dn) / (2 * ht);
  jet.Ftt = (up - 2 * jet.F + dn) / (ht * ht);
  if (s.mode == FlowMode::full_s2) {
    double hp = g.d_phi;
    double e = ghost_value(s, i, j + 1), w = ghost_value(s, i, j - 1);
    jet.Fp = (e - w) / (2 * hp);
    jet.Fpp = (e - 2 * jet.F + w) / (hp * hp);
    jet.Ftp = (ghost_value(s, i + 1, j + 1) - ghost_value(s, i + 1, j - 1) - ghost_value(s, i - 1, j + 1) +
               ghost_value(s, i - 1, j - 1)) /
              (4 * ht * hp);
  }
  return jet;
}

NodeGeometry node_geometry(const Ambient& amb, const GraphJet& j) {
  int n = amb.n;
  WarpingJet L = eval_warping(amb.profile, j.F);
  double lam = L.value;
  NodeGeometry out;
  out.eta_norm_bar = lam;

  if (n != 2) {
    if (j.Ft != 0.0 || j.Fp != 0.0 || j.Ftt != 0.0 || j.Ftp != 0.0 || j.Fpp != 0.0)
      fail(ErrorCode::invalid_argument, "non-constant graphs need n = 2");
    Vec x = chart_coords(amb.profile, n, AmbientPoint{j.F, {}});
    FactorJet fj = amb.factor.jet(x);
    double ef = std::exp(fj.value);
    out.f = fj.value;
    out.v_bar = 1.0;
    out.H_bar = n * L.d1 / lam;
    double k_hat = (L.d1 / lam + fj.grad[0]) / ef;
    out.H_hat = n * k_hat;
    out.nu.assign(n + 1, 0.0);
    out.nu[0] = 1.0 / ef;
  } else {
    Vec x{j.F, j.theta, j.phi};
    FactorJet fj = amb.factor.jet(x);
    double ef = std::exp(fj.value);
    out.f = fj.value;
    double s = std::sin(j.theta), c = std::cos(j.theta);
    // graph φ = Φ(θ,ϕ) in the product metric dφ² + σ, dφ = dr/λ
    double Pt = j.Ft / lam, Pp = j.Fp / lam;
    double l2 = lam * lam;
    double Ptt = j.Ftt / lam - L.d1 * j.Ft * j.Ft / l2;
    double Ptp = j.Ftp / lam - L.d1 * j.Ft * j.Fp / l2;
    double Ppp = j.Fpp / lam - L.d1 * j.Fp * j.Fp / l2;
    double D11 = Ptt, D12 = Ptp - (c / s) * Pp, D22 = Ppp + s * c * Pt;
    double W = std::sqrt(1.0 + Pt * Pt + Pp * Pp / (s * s));
    double a11 = 1.0 + Pt * Pt, a12 = Pt * Pp, a22 = s * s + Pp * Pp;
    double b11 = -D11 / W, b12 = -D12 / W, b22 = -D22 / W;
    double det_a = a11 * a22 - a12 * a12;
    double s11 = (a22 * b11 - a12 * b12) / det_a, s12 = (a22 * b12 - a12 * b22) / det_a;
    double s21 = (a11 * b12 - a12 * b11) / det_a, s22 = (a11 * b22 - a12 * b12) / det_a;
    double tr = s11 + s22, det = s11 * s22 - s12 * s21;
    double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    std::array<double, 2> kp{0.5 * tr + disc, 0.5 * tr - disc};

    Vec nu_bar{1.0 / W, -j.Ft / (l2 * W), -j.Fp / (l2 * s * s * W)};
    double nubar_f = 0.0;
    for (int a = 0; a < 3; ++a) nubar_f += nu_bar[a] * fj.grad[a];
    std::array<double, 2> kb{}, kh{};
    for (int a = 0; a < 2; ++a) {
      kb[a] = (kp[a] + L.d1 / W) / lam;
      kh[a] = (kb[a] + nubar_f) / ef;
    }
    out.v_bar = W;
    out.H_bar = kb[0] + kb[1];
    out.H_hat = kh[0] + kh[1];
    out.shape_eigen_max = std::max(out.H_hat * kh[0], out.H_hat * kh[1]);
    out.nu = nu_bar;
    for (double& v : out.nu) v /= ef;
  }
  double e2f = std::exp(2.0 * out.f);
  out.eta_norm_hat = std::exp(out.f) * lam;
  out.w = e2f * lam * out.nu[0];
  if (n != 2) out.shape_eigen_max = out.H_hat * out.H_hat / n;
  if (!(out.H_hat > 0.0) || !std::isfinite(out.H_hat))
    fail(ErrorCode::non_mean_convex, "mean curvature " + std::to_string(out.H_hat) + " at r=" + std::to_string(j.F));
  out.u = 1.0 / (out.H_hat * out.w);
  return out;
}

std::vector<NodeGeometry> graph_geometry(const Ambient& amb, const FlowState& state, unsigned threads) {
  std::vector<NodeGeometry> geo(state.size());
  int np = state.grid.n_phi;
  parallel_for(geo.size(), threads, [&](std::size_t k) {
    geo[k] = node_geometry(amb, graph_jet(state, static_cast<int>(k) / np, static_cast<int>(k) % np));
  });
  return geo;
}

double cfl_limit(const Ambient& amb, const FlowState& state, const std::vector<NodeGeometry>& geo) {
  (void)amb;
  if (state.mode == FlowMode::rot_sym) return inf;
  double limit = inf;
  int np = state.grid.n_phi;
  for (std::size_t k = 0; k < geo.size(); ++k) {
    const NodeGeometry& g = geo[k];
    double lam_h = g.eta_norm_bar * g.H_hat;
    // linearized diffusion coefficient e^{-2f}/(λĤ)²
    double D = std::exp(-2.0 * g.f) / (lam_h * lam_h);
    limit = std::min(limit, 0.5 / (D * inverse_spacing_sq(state, static_cast<int>(k) / np)));
  }
  return limit;
}

FlowState step(const Ambient& amb, const FlowState& state, double dt, const StepOptions& options) {
  return advance(amb, state, graph_geometry(amb, state, options.threads), dt, options).state;
}

FlowState initial_state(const Scenario& sc, FlowMode mode, int resolution) {
  const Ambient& amb = sc.ambient;
  const InitialSurface& init = sc.init();
  if (mode == FlowMode::rot_sym) {
    if (!amb.factor.radial) fail(ErrorCode::invalid_argument, "rot_sym mode needs a radial conformal factor");
    if (init.kind != InitKind::sphere)
      fail(ErrorCode::invalid_argument, "rot_sym mode needs a coordinate-sphere initial surface");
  } else {
    if (amb.n != 2) fail(ErrorCode::invalid_argument, "axisym and full_s2 modes need n = 2");
    if (mode == FlowMode::axisym) {
      if (resolution < 16) fail(ErrorCode::invalid_argument, "axisym resolution must be at least 16");
      if (init.azimuthal_amplitude != 0.0)
        fail(ErrorCode::invalid_argument, "axisym mode cannot carry an azimuthal perturbation");
      if (amb.factor.label == "dipole")
        fail(ErrorCode::invalid_argument, "axisym mode needs an axially symmetric conformal factor");
    } else if (resolution < 8) {
      fail(ErrorCode::invalid_argument, "full_s2 resolution must be at least 8");
    }
  }
  FlowState s;
  s.mode = mode;
  s.n = amb.n;
  s.grid = make_grid(mode, resolution);
  s.scenario_id = sc.id();
  for (double th : s.grid.theta)
    for (double ph : s.grid.phi) s.F.push_back(initial_radius(init, th, ph));
  for (double F : s.F)
    if (!(F > amb.profile.r_min)) fail(ErrorCode::domain, "initial surface leaves the domain r > r_min");
  double ct = std::cos(sc.cone().theta1);
  for (const NodeGeometry& g : graph_geometry(amb, s))
    if (!(g.w > ct * g.eta_norm_hat))
      fail(ErrorCode::star_shape_lost, "initial surface is not strongly star-shaped at angle theta1");
  return s;
}

TrajectoryRecord aggregate(const FlowState& state, const std::vector<NodeGeometry>& geo) {
  TrajectoryRecord r;
  r.t = state.t;
  r.w_min = r.eta_min = r.H_min = r.F_min = r.eta_hat_min = inf;
  r.w_max = r.eta_max = r.H_max = r.u_max = r.v_max = r.k_max = r.F_max = -inf;
  for (std::size_t k = 0; k < geo.size(); ++k) {
    const NodeGeometry& g = geo[k];
    r.w_min = std::min(r.w_min, g.w);
    r.w_max = std::max(r.w_max, g.w);
    r.eta_min = std::min(r.eta_min, g.eta_norm_bar);
    r.eta_max = std::max(r.eta_max, g.eta_norm_bar);
    r.eta_hat_min = std::min(r.eta_hat_min, g.eta_norm_hat);
    r.H_min = std::min(r.H_min, g.H_hat);
    r.H_max = std::max(r.H_max, g.H_hat);
    r.u_max = std::max(r.u_max, g.u);
    r.v_max = std::max(r.v_max, g.v_bar);
    r.k_max = std::max(r.k_max, g.shape_eigen_max);
    r.F_min = std::min(r.F_min, state.F[k]);
    r.F_max = std::max(r.F_max, state.F[k]);
  }
  return r;
}

Trajectory run(const Scenario& sc, const FlowState& initial, const FlowControls& c) {
  if (!(c.T > 0.0)) fail(ErrorCode::invalid_argument, "flow horizon T must be positive");
  if (!(c.safety > 0.0 && c.safety <= 0.5)) fail(ErrorCode::invalid_argument, "dt safety must lie in (0, 0.5]");
  const Ambient& amb = sc.ambient;
  Trajectory tr;
  tr.mode = initial.mode;
  tr.n = initial.n;
  tr.scenario_id = sc.id();
  tr.theta1 = sc.cone().theta1;

  std::vector<NodeGeometry> geo = graph_geometry(amb, initial, c.threads);
  tr.records.push_back(aggregate(initial, geo));
  tr.w_floor = std::cos(tr.theta1) * tr.records.front().eta_hat_min;
  tr.checkpoints.push_back(initial);
  StepOptions opt{-inf, c.threads};

  FlowState state = initial;
  double t0 = initial.t, end = t0 + c.T;
  long k = 0;
  while (state.t < end - 1e-12 * std::max(1.0, std::abs(end))) {
    double dt;
    if (c.steps > 0) {
      dt = c.T / c.steps;
    } else {
      dt = std::min(c.dt_max, end - state.t);
      if (state.mode != FlowMode::rot_sym) dt = std::min(dt, 2.0 * c.safety * cfl_limit(amb, state, geo));
    }
    try {
      Advance next = advance(amb, state, geo, dt, opt);
      ++k;
      if (c.steps > 0) next.state.t = (k == c.steps) ? end : t0 + k * dt;
      else if (end - next.state.t < 1e-12 * std::max(1.0, std::abs(end))) next.state.t = end;
      state = std::move(next.state);
      geo = std::move(next.geo);
    } catch (const Error& e) {
      if (!halting(e.code())) throw;
      tr.halt = HaltEvent{e.code(), state.t, e.what()};
      break;
    }
    tr.records.push_back(aggregate(state, geo));
    if (c.checkpoint_every > 0 && k % c.checkpoint_every == 0) tr.checkpoints.push_back(state);
    if (!(tr.records.back().w_min > tr.w_floor)) {
      // the crossing state stays in the record so the floor check can see it
      tr.halt = HaltEvent{ErrorCode::star_shape_lost, state.t,
                          "support function " + std::to_string(tr.records.back().w_min) + " reached the floor " +
                              std::to_string(tr.w_floor)};
      break;
    }
    if (c.steps > 0 && k == c.steps) break;
  }
  if (tr.checkpoints.back().t != state.t) tr.checkpoints.push_back(state);
  tr.final_state = state;
  return tr;
}

double fd_shape_oracle(const Ambient& amb, const FlowState& s, int i, int j, double h) {
  if (amb.n != 2) fail(ErrorCode::invalid_argument, "shape oracle needs n = 2");
  if (!(h >= 1e-6 && h <= 1e-2)) fail(ErrorCode::invalid_argument, "oracle step h must lie in [1e-6, 1e-2]");
  if (s.mode != FlowMode::rot_sym && h > 0.25 * s.grid.d_theta)
    fail(ErrorCode::invalid_argument, "oracle step h is not resolved by the grid");
  double th0 = s.grid.theta[i], ph0 = s.grid.phi[j];
  Vec x0{s.at(i, j), th0, ph0};

  auto level = [&](const Vec& x) { return x[0] - interp_F(s, i, j, x[1], x[2]); };
  auto vol = [&](const Vec& x, double& e2f, double& lam) {
    double f = amb.factor.jet(x).value;
    lam = eval_warping(amb.profile, x[0]).value;
    e2f = std::exp(2 * f);
    return std::exp(3 * f) * lam * lam * std::sin(x[1]);
  };
  auto estimate = [&](double hh) {
    auto flux = [&](const Vec& y, int a) {
      std::array<double, 3> d{};
      for (int b = 0; b < 3; ++b) {
        Vec p = y, m = y;
        p[b] += hh;
        m[b] -= hh;
        d[b] = (level(p) - level(m)) / (2 * hh);
      }
      double e2f, lam;
      double sq = vol(y, e2f, lam);
      double s2 = std::sin(y[1]) * std::sin(y[1]);
      std::array<double, 3> ginv{1.0 / e2f, 1.0 / (e2f * lam * lam), 1.0 / (e2f * lam * lam * s2)};
      double norm = std::sqrt(ginv[0] * d[0] * d[0] + ginv[1] * d[1] * d[1] + ginv[2] * d[2] * d[2]);
      return sq * ginv[a] * d[a] / norm;
    };
    double div = 0.0;
    for (int a = 0; a < 3; ++a) {
      Vec p = x0, m = x0;
      p[a] += hh;
      m[a] -= hh;
      div += (flux(p, a) - flux(m, a)) / (2 * hh);
    }
    double e2f, lam;
    return div / vol(x0, e2f, lam);
  };
  double coarse = estimate(h), fine = estimate(0.5 * h);
  if (std::abs(coarse - fine) > 1e-2 * std::max(std::abs(fine), 1.0))
    fail(ErrorCode::step_too_large, "shape oracle estimates disagree between h and h/2");
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace imcf
