#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "errors.hpp"

namespace imcf {

namespace {

std::string vec_text(const Vec& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out + "]";
}

std::string witness_text(const Witness& w) {
  std::string out = "r=" + format_number(w.r);
  if (!w.angular.empty()) out += ";angular=" + vec_text(w.angular);
  if (!w.vector.empty()) out += ";vector=" + vec_text(w.vector);
  if (w.rho) out += ";rho=" + format_number(*w.rho);
  return out;
}

const char* pass_fail(bool b) { return b ? "PASS" : "FAIL"; }

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "checkpoint: bad number '" + s + "' for " + what);
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string certificate_text(const CertificateReport& rep) {
  std::ostringstream o;
  o << "# certificate " << rep.kind << "\n";
  o << "# scenario " << rep.scenario_id << "\n";
  o << "# plan r_count=" << rep.plan.r_grid.size() << " r_min=" << format_number(rep.plan.r_grid.front())
    << " r_max=" << format_number(rep.plan.r_grid.back()) << " cone_samples=" << rep.plan.cone_samples
    << " angular_samples=" << rep.plan.angular_samples << " seed=" << rep.plan.seed << "\n";
  o << "# timestamp " << rep.timestamp << "\n";
  for (const ConditionRecord& c : rep.conditions) {
    o << c.id << ": margin=" << format_number(c.margin);
    o << " witness=" << (c.witness ? witness_text(*c.witness) : "none");
    o << " " << pass_fail(c.pass) << "\n";
  }
  for (const auto& [k, v] : rep.fitted) o << "fitted " << k << " = " << format_number(v) << "\n";
  for (const auto& [k, v] : rep.flags) o << "flag " << k << " = " << v << "\n";
  o << "overall: " << pass_fail(rep.pass) << "\n";
  return o.str();
}

std::string certificate_kv(const CertificateReport& rep) {
  std::ostringstream o;
  o << "kind = " << rep.kind << "\n";
  o << "scenario = " << rep.scenario_id << "\n";
  o << "timestamp = " << rep.timestamp << "\n";
  o << "pass = " << pass_fail(rep.pass) << "\n";
  o << "converged = " << (rep.converged ? "yes" : "no") << "\n";
  for (const ConditionRecord& c : rep.conditions) {
    o << "condition." << c.id << ".margin = " << format_number(c.margin) << "\n";
    o << "condition." << c.id << ".verdict = " << pass_fail(c.pass) << "\n";
    if (c.witness) o << "condition." << c.id << ".witness = " << witness_text(*c.witness) << "\n";
  }
  for (const auto& [k, v] : rep.fitted) o << "fitted." << k << " = " << format_number(v) << "\n";
  for (const auto& [k, v] : rep.flags) o << "flag." << k << " = " << v << "\n";
  return o.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream o;
  o << "t,w_min,w_max,eta_min,eta_max,H_min,H_max,u_max,v_max,k_max\n";
  for (const TrajectoryRecord& r : traj.records) {
    for (double v : {r.t, r.w_min, r.w_max, r.eta_min, r.eta_max, r.H_min, r.H_max, r.u_max, r.v_max})
      o << format_number(v) << ",";
    o << format_number(r.k_max) << "\n";
  }
  return o.str();
}

std::string checkpoint_text(const FlowState& s) {
  std::ostringstream o;
  o << "# imcf checkpoint\n";
  o << "# scenario = " << s.scenario_id << "\n";
  o << "# mode = " << flow_mode_name(s.mode) << "\n";
  o << "# n = " << s.n << "\n";
  o << "# t = " << format_number(s.t) << "\n";
  o << "# n_theta = " << s.grid.n_theta << "\n";
  o << "# n_phi = " << s.grid.n_phi << "\n";
  bool full = s.mode == FlowMode::full_s2;
  for (int i = 0; i < s.grid.n_theta; ++i)
    for (int j = 0; j < s.grid.n_phi; ++j) {
      o << format_number(s.grid.theta[i]) << " ";
      if (full) o << format_number(s.grid.phi[j]) << " ";
      o << format_number(s.at(i, j)) << "\n";
    }
  return o.str();
}

FlowState parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> head;
  FlowState s;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string k = line.substr(1, eq - 1), v = line.substr(eq + 1);
      auto trim = [](std::string x) {
        x.erase(0, x.find_first_not_of(' '));
        x.erase(x.find_last_not_of(' ') + 1);
        return x;
      };
      head[trim(k)] = trim(v);
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_number(tok, "node value"));
    rows.push_back(std::move(row));
  }
  for (const char* k : {"mode", "n", "t", "n_theta", "n_phi"})
    if (!head.count(k)) fail(ErrorCode::parse, std::string("checkpoint: missing header '") + k + "'");
  s.mode = parse_flow_mode(head["mode"]);
  s.n = static_cast<int>(parse_number(head["n"], "n"));
  s.t = parse_number(head["t"], "t");
  s.scenario_id = head.count("scenario") ? head["scenario"] : "";
  int nt = static_cast<int>(parse_number(head["n_theta"], "n_theta"));
  int np = static_cast<int>(parse_number(head["n_phi"], "n_phi"));
  s.grid = make_grid(s.mode, s.mode == FlowMode::rot_sym ? 1 : nt);
  if (s.grid.n_theta != nt || s.grid.n_phi != np) fail(ErrorCode::parse, "checkpoint: grid size does not match mode");
  std::size_t width = s.mode == FlowMode::full_s2 ? 3 : 2;
  if (rows.size() != static_cast<std::size_t>(nt) * np)
    fail(ErrorCode::parse, "checkpoint: expected " + std::to_string(nt * np) + " node lines");
  for (const auto& row : rows) {
    if (row.size() != width) fail(ErrorCode::parse, "checkpoint: malformed node line");
    s.F.push_back(row.back());
  }
  return s;
}

std::string monitors_text(const MonitorReport& rep) {
  std::ostringstream o;
  for (const auto& [k, v] : rep.header) o << "# " << k << " = " << v << "\n";
  for (const CheckResult& c : rep.checks) {
    o << c.id << ": " << verdict_name(c.verdict) << " margin=" << format_number(c.margin)
      << " t_worst=" << format_number(c.t_worst);
    if (c.verdict == Verdict::skipped) o << " reason=" << c.skip_reason;
    o << " gate=" << c.gate << "\n";
  }
  for (const FittedConstant& f : rep.params.log)
    o << "# fit " << f.name << " = " << format_number(f.value) << " (" << f.source << ")\n";
  o << "overall: " << (rep.pass() ? "PASS" : "FAIL") << "\n";
  return o.str();
}

std::string monitors_kv(const MonitorReport& rep) {
  std::ostringstream o;
  for (const auto& [k, v] : rep.header) {
    if (k == "lte_failed_condition" || k == "asymptotics_failed_condition") continue;
    o << "header." << k << " = " << v << "\n";
  }
  std::string lte_fail, asym_fail;
  for (const auto& [k, v] : rep.header) {
    if (k == "lte_failed_condition") lte_fail += (lte_fail.empty() ? "" : ",") + v;
    if (k == "asymptotics_failed_condition") asym_fail += (asym_fail.empty() ? "" : ",") + v;
  }
  if (!lte_fail.empty()) o << "header.lte_failed_conditions = " << lte_fail << "\n";
  if (!asym_fail.empty()) o << "header.asymptotics_failed_conditions = " << asym_fail << "\n";
  o << "pass = " << (rep.pass() ? "PASS" : "FAIL") << "\n";
  for (const CheckResult& c : rep.checks) {
    std::string p = "check." + c.id + ".";
    o << p << "verdict = " << verdict_name(c.verdict) << "\n";
    o << p << "margin = " << format_number(c.margin) << "\n";
    o << p << "t_worst = " << format_number(c.t_worst) << "\n";
    o << p << "gate = " << c.gate << "\n";
    if (!c.skip_reason.empty()) o << p << "reason = " << c.skip_reason << "\n";
    for (const auto& [k, v] : c.fitted) o << p << "fitted." << k << " = " << format_number(v) << "\n";
  }
  for (const FittedConstant& f : rep.params.log) {
    o << "fit." << f.name << " = " << format_number(f.value) << "\n";
    o << "fit." << f.name << ".source = " << f.source << "\n";
  }
  return o.str();
}

std::string oracle_text(const OracleTable& t) {
  std::ostringstream o;
  o << "# kind scenario analytic oracle rel_error verdict where\n";
  for (const OracleRow& r : t.rows)
    o << r.kind << " " << r.scenario << " " << format_number(r.analytic) << " " << format_number(r.oracle) << " "
      << format_number(r.rel_error) << " " << pass_fail(r.pass) << " " << r.where << "\n";
  o << "overall: " << pass_fail(t.pass()) << " tolerance=" << format_number(t.tolerance) << "\n";
  return o.str();
}

std::string oracle_kv(const OracleTable& t) {
  std::ostringstream o;
  o << "pass = " << pass_fail(t.pass()) << "\n";
  o << "tolerance = " << format_number(t.tolerance) << "\n";
  o << "rows = " << t.rows.size() << "\n";
  for (const char* k : {"ricci_hat", "ricci_bar", "scalar_hat", "H_hat"})
    o << "worst." << k << " = " << format_number(t.worst(k)) << "\n";
  return o.str();
}

std::map<std::string, std::string> parse_kv_file(const std::string& text) {
  std::map<std::string, std::string> out;
  for (const KeyValue& kv : parse_key_values(text)) out[kv.key] = kv.value;
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorCode::io, "cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) fail(ErrorCode::io, "error while writing '" + path + "'");
}

}  // namespace imcf
