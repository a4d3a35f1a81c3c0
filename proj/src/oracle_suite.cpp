#include "oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "fd_oracle.hpp"
#include "flow_engine.hpp"
#include "parallel.hpp"
#include "scenarios.hpp"

namespace imcf {

namespace {

double rel_error(double a, double o) { return std::abs(a - o) / std::max(std::abs(o), 1.0); }

std::string point_text(double r, const Vec& ang) {
  char buf[96];
  if (ang.size() >= 2) std::snprintf(buf, sizeof buf, "r=%.6f theta=%.6f phi=%.6f", r, ang[0], ang[1]);
  else std::snprintf(buf, sizeof buf, "r=%.6f", r);
  return buf;
}

struct CurvatureTask {
  std::string id;
  int kind = 0;
  double r = 0.0;
  Vec ang;
  Vec x, y;
};

struct GraphTask {
  std::string id;
  double amplitude = 0.0;
  int degree = 2;
  double r0 = 2.0;
  int node = 0;
};

}  // namespace

bool OracleTable::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const OracleRow& r) { return r.pass; });
}

double OracleTable::worst(const std::string& prefix) const {
  double w = 0.0;
  for (const OracleRow& r : rows)
    if (r.kind.rfind(prefix, 0) == 0) w = std::max(w, r.rel_error);
  return w;
}

OracleTable run_oracle_suite(const OracleOptions& o) {
  const std::vector<std::string> curvature_ids{"euclidean", "hyperbolic", "example1", "example2_negative",
                                               "example3",  "example4",   "constant_f", "compact_f"};
  const std::vector<std::string> graph_ids{"hyperbolic", "example1", "example3", "example4", "constant_f",
                                           "compact_f"};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);

  std::vector<CurvatureTask> ctasks;
  for (int k = 0; k < o.curvature_samples; ++k) {
    CurvatureTask t;
    t.id = curvature_ids[rng() % curvature_ids.size()];
    t.kind = k % 3;
    Scenario sc = make_scenario(t.id);
    double lo = std::max(sc.spec.plan_r_min, sc.ambient.profile.r_min + 0.3);
    t.r = lo + 4.0 * unit(rng);
    t.ang = {0.3 + 2.5 * unit(rng), 2 * std::numbers::pi * unit(rng)};
    t.x = {sym(rng), sym(rng), sym(rng)};
    t.y = {sym(rng), sym(rng), sym(rng)};
    ctasks.push_back(std::move(t));
  }
  std::vector<GraphTask> gtasks;
  while (static_cast<int>(gtasks.size()) < o.graph_states) {
    GraphTask t;
    t.id = graph_ids[rng() % graph_ids.size()];
    t.amplitude = (0.01 + 0.07 * unit(rng)) * (rng() % 2 ? 1.0 : -1.0);
    t.degree = 1 + static_cast<int>(rng() % 4);
    t.r0 = 1.5 + 1.5 * unit(rng);
    t.node = 2 + static_cast<int>(rng() % static_cast<unsigned>(o.graph_resolution - 4));
    try {
      Scenario sc = make_scenario(t.id, {{"amplitude", t.amplitude}, {"degree", t.degree}, {"r0", t.r0}});
      graph_geometry(sc.ambient, initial_state(sc, FlowMode::axisym, o.graph_resolution));
    } catch (const Error& e) {
      // redraw states that are not admissible flow data
      if (e.code() == ErrorCode::non_mean_convex || e.code() == ErrorCode::star_shape_lost) continue;
      throw;
    }
    gtasks.push_back(t);
  }

  OracleTable table;
  table.tolerance = o.tolerance;
  table.rows.resize(ctasks.size() + gtasks.size());
  parallel_for(ctasks.size(), o.threads, [&](std::size_t k) {
    const CurvatureTask& t = ctasks[k];
    Scenario sc = make_scenario(t.id);
    const Ambient& a = sc.ambient;
    AmbientPoint p{t.r, t.ang};
    OracleRow& row = table.rows[k];
    row.scenario = t.id;
    row.where = point_text(t.r, t.ang);
    if (t.kind == 0) {
      LocalGeometry geo(a.profile, a.factor, a.n, p);
      Vec X = geo.normalize(t.x, MetricKind::hat), Y = geo.normalize(t.y, MetricKind::hat);
      row.kind = "ricci_hat";
      row.analytic = geo.hat_ricci_at(1.0, X, Y);
      row.oracle = fd_curvature_oracle(a.profile, a.factor, a.n, p, make_vector(X, MetricKind::hat),
                                       make_vector(Y, MetricKind::hat));
    } else if (t.kind == 1) {
      ConformalFactor flat = zero_factor();
      LocalGeometry geo(a.profile, flat, a.n, p);
      Vec X = geo.normalize(t.x, MetricKind::bar), Y = geo.normalize(t.y, MetricKind::bar);
      row.kind = "ricci_bar";
      row.analytic = geo.bar_ricci_at(1.0, X, Y);
      row.oracle = fd_curvature_oracle(a.profile, flat, a.n, p, make_vector(X, MetricKind::bar),
                                       make_vector(Y, MetricKind::bar));
    } else {
      LocalGeometry geo(a.profile, a.factor, a.n, p);
      row.kind = "scalar_hat";
      row.analytic = geo.hat_scalar_at(1.0);
      row.oracle = fd_scalar_oracle(a.profile, a.factor, a.n, p);
    }
  });
  parallel_for(gtasks.size(), o.threads, [&](std::size_t k) {
    const GraphTask& t = gtasks[k];
    Scenario sc = make_scenario(t.id, {{"amplitude", t.amplitude}, {"degree", t.degree}, {"r0", t.r0}});
    FlowState s = initial_state(sc, FlowMode::axisym, o.graph_resolution);
    std::vector<NodeGeometry> geo = graph_geometry(sc.ambient, s);
    OracleRow& row = table.rows[ctasks.size() + k];
    char buf[128];
    std::snprintf(buf, sizeof buf, "r0=%.6f amplitude=%.6f degree=%d node=%d", t.r0, t.amplitude, t.degree, t.node);
    row.kind = "H_hat";
    row.scenario = t.id;
    row.where = buf;
    row.analytic = geo[t.node].H_hat;
    row.oracle = fd_shape_oracle(sc.ambient, s, t.node, 0, std::min(1e-3, 0.25 * s.grid.d_theta));
  });
  for (OracleRow& row : table.rows) {
    row.rel_error = row.kind == "H_hat" ? std::abs(row.analytic - row.oracle) / std::abs(row.oracle)
                                        : rel_error(row.analytic, row.oracle);
    row.pass = row.rel_error <= o.tolerance;
  }
  return table;
}

}  // namespace imcf
