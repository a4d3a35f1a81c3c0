#include "imcf/imcf.h"

#include <cstring>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "app.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "monitors.hpp"
#include "scenarios.hpp"

struct imcf_config {
  imcf::RunConfig config;
};

struct imcf_scenario {
  imcf::Scenario scenario;
};

struct imcf_certificate {
  imcf::CertificateReport report;
};

struct imcf_trajectory {
  imcf::Trajectory traj;
};

struct imcf_monitors {
  imcf::MonitorReport report;
};

namespace {

thread_local std::string last_error;

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return IMCF_OK;
  } catch (const imcf::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return IMCF_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return IMCF_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) imcf::fail(imcf::ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* imcf_version(void) { return "0.1.0"; }

const char* imcf_error_name(int code) {
  if (code < 0 || code > IMCF_E_INTERNAL) return "UnknownError";
  return imcf::error_code_name(static_cast<imcf::ErrorCode>(code));
}

const char* imcf_last_error(void) { return last_error.c_str(); }

int imcf_config_parse(const char* text, imcf_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new imcf_config{imcf::parse_config(text)};
  });
}

int imcf_config_load(const char* path, imcf_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    std::string text = imcf::read_text_file(path);
    try {
      *out = new imcf_config{imcf::parse_config(text)};
    } catch (const imcf::Error& e) {
      imcf::fail(e.code(), std::string(path) + ": " + e.what());
    }
  });
}

int imcf_config_set_subcommand(imcf_config* c, const char* name) {
  return guarded([&] {
    require(c && name, "null argument");
    c->config.subcommand = imcf::parse_subcommand(name);
  });
}

int imcf_config_set_seed(imcf_config* c, uint64_t seed) {
  return guarded([&] {
    require(c, "null argument");
    c->config.seed = seed;
  });
}

int imcf_config_set_out(imcf_config* c, const char* dir) {
  return guarded([&] {
    require(c && dir, "null argument");
    c->config.out = dir;
  });
}

int imcf_config_serialize(const imcf_config* c, char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(c && needed, "null argument");
    std::string s = imcf::serialize_config(c->config);
    *needed = s.size();
    if (buf && capacity > s.size()) std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

void imcf_config_free(imcf_config* c) { delete c; }

int imcf_execute(const imcf_config* c, const char* base_dir, const char* out_dir, int verbose, int* exit_status) {
  return guarded([&] {
    require(c && exit_status, "null argument");
    std::string out = imcf::resolve_out_dir(c->config, out_dir ? out_dir : "");
    std::ostringstream sink;
    std::ostream& log = verbose ? std::cerr : sink;
    imcf::ExecResult r = imcf::execute(c->config, base_dir ? base_dir : "", out, log);
    *exit_status = r.status;
    if (!r.message.empty()) last_error = r.message;
  });
}

int imcf_scenario_create(const char* id, const char* params, imcf_scenario** out) {
  return guarded([&] {
    require(id && out, "null argument");
    std::map<std::string, double> p;
    if (params) {
      for (const imcf::KeyValue& kv : imcf::parse_key_values(params)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(kv.value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != kv.value.size())
          imcf::fail(imcf::ErrorCode::validation, "invalid value for '" + kv.key + "': expected a number");
        p[kv.key] = v;
      }
    }
    *out = new imcf_scenario{imcf::make_scenario(id, p)};
  });
}

int imcf_scenario_load(const char* path, imcf_scenario** out) {
  return guarded([&] {
    require(path && out, "null argument");
    imcf::RunConfig c;
    c.scenario = path;
    *out = new imcf_scenario{imcf::load_scenario(c, "")};
  });
}

int imcf_scenario_dimension(const imcf_scenario* s, int* n) {
  return guarded([&] {
    require(s && n, "null argument");
    *n = s->scenario.n();
  });
}

void imcf_scenario_free(imcf_scenario* s) { delete s; }

int imcf_hat_ricci(const imcf_scenario* s, double r, const double* angles, const double* x, const double* y,
                   double* out) {
  return guarded([&] {
    require(s && angles && x && y && out, "null argument");
    const imcf::Ambient& a = s->scenario.ambient;
    imcf::AmbientPoint p{r, imcf::Vec(angles, angles + a.n)};
    imcf::LocalGeometry geo(a.profile, a.factor, a.n, p);
    imcf::Vec X(x, x + a.n + 1), Y(y, y + a.n + 1);
    *out = geo.hat_ricci_at(a.band.rho1, X, Y);
  });
}

int imcf_hat_scalar(const imcf_scenario* s, double r, const double* angles, double* out) {
  return guarded([&] {
    require(s && angles && out, "null argument");
    const imcf::Ambient& a = s->scenario.ambient;
    imcf::LocalGeometry geo(a.profile, a.factor, a.n, imcf::AmbientPoint{r, imcf::Vec(angles, angles + a.n)});
    *out = geo.hat_scalar_at(a.band.rho1);
  });
}

int imcf_certify(const imcf_scenario* s, int kind, uint64_t seed, int threads, imcf_certificate** out) {
  return guarded([&] {
    require(s && out, "null argument");
    require(kind == IMCF_CERT_LTE || kind == IMCF_CERT_ASYMPTOTICS, "unknown certificate kind");
    require(threads >= 1, "threads must be positive");
    const imcf::Scenario& sc = s->scenario;
    imcf::SamplingPlan plan = sc.default_plan(seed);
    unsigned th = static_cast<unsigned>(threads);
    if (kind == IMCF_CERT_LTE)
      *out = new imcf_certificate{imcf::certify_lte(sc.ambient, sc.id(), sc.cone(), plan, sc.lte_options(th))};
    else
      *out = new imcf_certificate{imcf::certify_asymptotics(sc.ambient, sc.id(), sc.spec.asym, plan, th)};
  });
}

int imcf_certificate_pass(const imcf_certificate* c, int* pass) {
  return guarded([&] {
    require(c && pass, "null argument");
    *pass = c->report.pass ? 1 : 0;
  });
}

int imcf_certificate_margin(const imcf_certificate* c, const char* condition, double* margin) {
  return guarded([&] {
    require(c && condition && margin, "null argument");
    const imcf::ConditionRecord* rec = c->report.find(condition);
    if (!rec) imcf::fail(imcf::ErrorCode::invalid_argument, std::string("no condition '") + condition + "'");
    *margin = rec->margin;
  });
}

int imcf_certificate_fitted(const imcf_certificate* c, const char* key, double* value) {
  return guarded([&] {
    require(c && key && value, "null argument");
    *value = c->report.fitted_value(key);
  });
}

void imcf_certificate_free(imcf_certificate* c) { delete c; }

int imcf_flow_run(const imcf_scenario* s, const char* mode, int resolution, double T, int steps, int threads,
                  imcf_trajectory** out) {
  return guarded([&] {
    require(s && mode && out, "null argument");
    require(threads >= 1, "threads must be positive");
    require(steps >= 0, "steps must be non-negative");
    imcf::FlowState init = imcf::initial_state(s->scenario, imcf::parse_flow_mode(mode), resolution);
    imcf::FlowControls c;
    c.T = T;
    c.steps = steps;
    c.threads = static_cast<unsigned>(threads);
    *out = new imcf_trajectory{imcf::run(s->scenario, init, c)};
  });
}

int imcf_trajectory_size(const imcf_trajectory* t, size_t* count) {
  return guarded([&] {
    require(t && count, "null argument");
    *count = t->traj.records.size();
  });
}

int imcf_trajectory_record(const imcf_trajectory* t, size_t index, double* v) {
  return guarded([&] {
    require(t && v, "null argument");
    require(index < t->traj.records.size(), "record index out of range");
    const imcf::TrajectoryRecord& r = t->traj.records[index];
    const double vals[10] = {r.t, r.w_min, r.w_max, r.eta_min, r.eta_max, r.H_min, r.H_max, r.u_max, r.v_max, r.k_max};
    std::memcpy(v, vals, sizeof vals);
  });
}

int imcf_trajectory_halt(const imcf_trajectory* t, int* code, double* time) {
  return guarded([&] {
    require(t && code && time, "null argument");
    *code = t->traj.halt ? static_cast<int>(t->traj.halt->code) : IMCF_OK;
    *time = t->traj.halt ? t->traj.halt->t : t->traj.records.back().t;
  });
}

void imcf_trajectory_free(imcf_trajectory* t) { delete t; }

int imcf_monitors_evaluate(const imcf_trajectory* t, const imcf_scenario* s, const imcf_certificate* lte,
                           const imcf_certificate* asym, imcf_monitors** out) {
  return guarded([&] {
    require(t && s && lte && asym && out, "null argument");
    require(lte->report.kind == "lte" && asym->report.kind == "asymptotics", "certificate kinds are swapped");
    *out = new imcf_monitors{imcf::evaluate_monitors(t->traj, s->scenario.ambient, lte->report, asym->report)};
  });
}

int imcf_monitors_pass(const imcf_monitors* m, int* pass) {
  return guarded([&] {
    require(m && pass, "null argument");
    *pass = m->report.pass() ? 1 : 0;
  });
}

int imcf_monitors_check(const imcf_monitors* m, const char* id, int* verdict, double* margin, double* t_worst) {
  return guarded([&] {
    require(m && id && verdict && margin && t_worst, "null argument");
    const imcf::CheckResult* c = m->report.find(id);
    if (!c) imcf::fail(imcf::ErrorCode::invalid_argument, std::string("no check '") + id + "'");
    *verdict = c->verdict == imcf::Verdict::pass ? IMCF_VERDICT_PASS
               : c->verdict == imcf::Verdict::fail ? IMCF_VERDICT_FAIL
                                                   : IMCF_VERDICT_SKIPPED;
    *margin = c->margin;
    *t_worst = c->t_worst;
  });
}

void imcf_monitors_free(imcf_monitors* m) { delete m; }

}  // extern "C"
