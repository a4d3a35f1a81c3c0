#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imcf {

using Vec = std::vector<double>;

struct WarpingJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

enum class WarpingFamily { euclidean, hyperbolic, example1, custom };

struct WarpingProfile {
  std::function<WarpingJet(double)> eval;
  // r -> λλ″ − λ′², in closed form so that model-space curvature cancels exactly
  std::function<double(double)> defect;
  double r_min = 0.0;
  WarpingFamily family = WarpingFamily::custom;
  double l = 0.0, p = 0.0, q = 0.0;
  std::string label;
};

// Coordinates are (r, θ1, ..., θn); hess is row-major (n+1)x(n+1).
struct FactorJet {
  double value = 0.0;
  Vec grad;
  Vec hess;
};

struct DecayParams {
  double C2 = 0.0;
  double alpha = 0.0;
};

struct ConformalFactor {
  std::function<FactorJet(std::span<const double>)> jet;
  std::optional<double> support_radius;
  std::optional<DecayParams> decay;
  bool radial = true;
  std::string label;
};

struct AmbientPoint {
  double r = 0.0;
  Vec angular;
};

enum class MetricKind { bar, hat };

struct TangentVector {
  double v_r = 0.0;
  Vec v_ang;
  MetricKind norm_metric = MetricKind::hat;
};

struct FiberCurvatureBand {
  double rho1 = 1.0;
  double rho2 = 1.0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct Ambient {
  WarpingProfile profile;
  ConformalFactor factor;
  FiberCurvatureBand band;
  int n = 2;
};

WarpingJet eval_warping(const WarpingProfile& profile, double r);
double warping_defect(const WarpingProfile& profile, double r);

WarpingProfile euclidean_profile();
WarpingProfile hyperbolic_profile();
WarpingProfile example1_profile(double l, double p, double q, double r_min);
WarpingProfile sqrt_profile(double scale);
// λ = a·sinh(k r) + b·r + c
WarpingProfile combo_profile(double a, double k, double b, double c, double r_min);

ConformalFactor zero_factor();
ConformalFactor constant_factor(double c);
ConformalFactor log_factor();
ConformalFactor power_factor(double a, double m);
ConformalFactor separable_factor(double a, double m, double eps);
ConformalFactor dipole_factor(double a, double m, double eps);
ConformalFactor bump_factor(double a, double radius);

void validate_band(const FiberCurvatureBand& band);

// Pads angular coordinates to n entries with π/2 and checks the chart domain.
Vec chart_coords(const WarpingProfile& profile, int n, const AmbientPoint& p);
Vec components(const TangentVector& v, int n);
TangentVector make_vector(const Vec& comps, MetricKind kind);

class LocalGeometry {
 public:
  LocalGeometry(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                const AmbientPoint& p);

  int n() const { return n_; }
  int dim() const { return m_; }
  const Vec& coords() const { return x_; }
  const WarpingJet& warping() const { return lam_; }
  const FactorJet& factor_jet() const { return fj_; }
  double defect() const { return defect_; }

  double bar_metric(int a) const { return g_[a]; }
  double hat_metric(int a) const { return e2f_ * g_[a]; }
  double dot(const Vec& X, const Vec& Y, MetricKind kind) const;
  double norm(const Vec& X, MetricKind kind) const;
  Vec normalize(const Vec& X, MetricKind kind) const;

  Vec eta() const;
  double eta_norm_bar() const { return lam_.value; }
  double eta_norm_hat() const;
  double psi_hat() const;
  double directional_f(const Vec& X) const;
  Vec grad_bar_f() const;
  Vec grad_hat_f() const;
  double grad_bar_f_sq() const;
  double hessian_bar_f(const Vec& X, const Vec& Y) const;
  double hessian_hat_f(const Vec& X, const Vec& Y) const;
  double hessian_bar_norm() const;
  double laplacian_bar_f() const;

  Vec skew_T(const Vec& X) const;
  // ∇̂_X η from the Christoffel symbols of ĝ
  Vec covariant_eta(const Vec& X) const;
  // ∇̂_X ∇̂f
  Vec covariant_grad_f(const Vec& X) const;

  double bar_ricci_at(double rho, const Vec& X, const Vec& Y) const;
  double hat_ricci_at(double rho, const Vec& X, const Vec& Y) const;
  double hat_scalar_at(double rho) const;
  Interval bar_ricci(const FiberCurvatureBand& band, const Vec& X, const Vec& Y) const;
  Interval hat_ricci(const FiberCurvatureBand& band, const Vec& X, const Vec& Y) const;
  Interval hat_scalar(const FiberCurvatureBand& band) const;

  Vec G() const;
  // ĝ-gradient of ψ̂; ĝ(∇̂ψ̂, ν) = ν(ψ̂) = ĝ(𝒢 + G_correction(), ν)
  Vec grad_psi_hat() const;
  Vec G_correction() const;
  Vec J(const Vec& V, double rho) const;
  double nu_psi_hat(const Vec& nu) const;
  double delta_ratio() const;
  double growth_ratio() const;

 private:
  double gamma_bar(int c, int a, int b) const { return gb_[(c * m_ + a) * m_ + b]; }
  double gamma_hat(int c, int a, int b) const;
  double fiber_dot(const Vec& X, const Vec& Y) const;
  double conformal_ricci_terms(const Vec& X, const Vec& Y) const;

  int n_ = 0;
  int m_ = 0;
  Vec x_;
  WarpingJet lam_;
  double defect_ = 0.0;
  FactorJet fj_;
  double e2f_ = 1.0;
  Vec g_;
  Vec gb_;
};

double psi_hat(const Ambient& amb, const AmbientPoint& p);
TangentVector skew_T(const Ambient& amb, const AmbientPoint& p, const TangentVector& X);
Interval bar_ricci(const Ambient& amb, const AmbientPoint& p, const TangentVector& X,
                   const TangentVector& Y);
Interval hat_ricci(const Ambient& amb, const AmbientPoint& p, const TangentVector& X,
                   const TangentVector& Y);
Interval hat_scalar(const Ambient& amb, const AmbientPoint& p);
double nu_psi_hat(const Ambient& amb, const AmbientPoint& p, const TangentVector& nu);
TangentVector unit_vector(const Ambient& amb, const AmbientPoint& p, const TangentVector& v);

}  // namespace imcf
