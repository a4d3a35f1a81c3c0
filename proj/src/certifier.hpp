#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metric_kernel.hpp"
#include "sampling.hpp"

namespace imcf {

struct ConeSpec {
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool sum_ok() const;
};

void validate_cone(const ConeSpec& cone);

struct Witness {
  double r = 0.0;
  Vec angular;
  Vec vector;  // coordinate components; empty when the condition is pointwise
  std::optional<double> rho;
};

struct ConditionRecord {
  std::string id;
  double margin = 0.0;
  bool pass = false;
  std::optional<Witness> witness;
};

struct CertificateReport {
  std::string kind;
  std::string scenario_id;
  SamplingPlan plan;
  std::vector<ConditionRecord> conditions;
  std::vector<std::pair<std::string, double>> fitted;
  std::vector<std::pair<std::string, std::string>> flags;
  bool pass = false;
  bool converged = false;
  std::string timestamp;

  const ConditionRecord* find(const std::string& id) const;
  double fitted_value(const std::string& key) const;
  std::string flag(const std::string& key) const;
};

struct LteOptions {
  double delta1 = 0.0;  // exclusive lower bound on the delta ratio
  double delta2 = std::numeric_limits<double>::infinity();
  double ricci_C = 1e3;
  unsigned threads = 1;
  bool check_convergence = true;
};

struct AsymptoticParams {
  double alpha = 4.0;
  double beta = 1.0;
  double gamma = 3.5;
  double C1 = 10.0, C2 = 10.0, C3 = 10.0, C4 = 10.0;
  bool alpha_ok() const { return alpha > 2.0 + beta; }
  bool beta_ok() const { return beta > 0.0; }
  bool gamma_ok() const { return gamma > 3.0; }
};

// 𝒥 with R̂c(V,V) at the band endpoint that minimizes the cone margin.
Vec eval_J(const Ambient& amb, const AmbientPoint& p, const Vec& V, double theta2);
Vec eval_G(const Ambient& amb, const AmbientPoint& p);
double cone_margin(const LocalGeometry& geo, const Vec& vec, double theta2);
double cone_margin(const Ambient& amb, const AmbientPoint& p, const TangentVector& vec, double theta2);
double delta_ratio(const Ambient& amb, const AmbientPoint& p);

CertificateReport certify_lte(const Ambient& amb, const std::string& scenario_id, const ConeSpec& cone,
                              const SamplingPlan& plan, const LteOptions& options = {});
CertificateReport certify_asymptotics(const Ambient& amb, const std::string& scenario_id,
                                      const AsymptoticParams& params, const SamplingPlan& plan,
                                      unsigned threads = 1);

std::string report_timestamp();

}  // namespace imcf
