#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "certifier.hpp"
#include "flow_engine.hpp"

namespace imcf {

enum class Verdict { pass, fail, skipped };

const char* verdict_name(Verdict v);

struct CheckResult {
  std::string id;
  Verdict verdict = Verdict::skipped;
  std::string skip_reason;
  double margin = std::numeric_limits<double>::quiet_NaN();
  double t_worst = std::numeric_limits<double>::quiet_NaN();
  std::string gate;  // certificate(s) the verdict depends on
  std::vector<std::pair<std::string, double>> fitted;
  std::vector<double> bound, observed, margins;  // one entry per trajectory record

  double fitted_value(const std::string& key) const;
};

struct FittedConstant {
  std::string name;
  double value = 0.0;
  std::string source;
};

// Constants for the envelopes; each carries where it came from.
struct EnvelopeParams {
  int n = 2;
  double theta1 = 0.0;
  bool lte_certified = false;
  bool asym_certified = false;
  bool lambda_prime_positive = false;
  bool growth_delta2_le_1 = false;
  double delta1 = 1.0, delta2 = 1.0;  // growth ratios λ′/ψ̂
  double ricci_C = 0.0;
  double alpha = 4.0, beta = 1.0, gamma = 3.5;
  double C1 = 0.0, C3 = 0.0, CB = 0.0, Cpsi = 0.0, f_sup = 0.0;
  double c0_rate = 1.0;          // defaults to 2/n
  double upper_exponent = 4.0;   // defaults to α
  std::string upper_exponent_source = "alpha";
  std::vector<FittedConstant> log;

  void note(const std::string& name, double value, const std::string& source);
};

struct MonitorOptions {
  double c0_rate = std::numeric_limits<double>::quiet_NaN();
  std::string upper_exponent = "alpha";
  double residual_threshold = 1e-5;
  double slack = 1e-6;
  double u_tolerance = 1e-8;
};

EnvelopeParams envelope_params(const CertificateReport& lte, const CertificateReport& asym, int n, double theta1,
                               const MonitorOptions& options = {});

CheckResult check_w_floor(const Trajectory& traj, const EnvelopeParams& p);
CheckResult check_u_max(const Trajectory& traj, const EnvelopeParams& p, double tolerance = 1e-8);
CheckResult check_eta_growth(const Trajectory& traj, const EnvelopeParams& p, double slack = 1e-6);
std::vector<CheckResult> check_H_envelopes(const Trajectory& traj, EnvelopeParams& p, double slack = 1e-6);
// No monotone blow-up: value at T at most ten times the value at T/2.
CheckResult check_shape_eigen_bounded(const Trajectory& traj, const EnvelopeParams& p);
CheckResult check_gradient_bound(const Trajectory& traj, EnvelopeParams& p, double slack = 1e-6);
CheckResult check_w_lower_envelope(const Trajectory& traj, EnvelopeParams& p, double slack = 1e-6);
CheckResult check_w_evolution_residual(const Trajectory& traj, const Ambient& amb, double threshold = 1e-5);

// Closed-form pieces shared by several envelopes.
double w_lower_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double C9, double t);
double literal_w_lower_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double C9, double t);
double upper_H_bound(const EnvelopeParams& p, const TrajectoryRecord& r0, double K, double t);

struct MonitorReport {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<CheckResult> checks;
  EnvelopeParams params;

  bool pass() const;
  const CheckResult* find(const std::string& id) const;
};

MonitorReport evaluate_monitors(const Trajectory& traj, const Ambient& amb, const CertificateReport& lte,
                                const CertificateReport& asym, const MonitorOptions& options = {});

}  // namespace imcf
