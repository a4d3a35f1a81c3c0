#include "metric_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace imcf {

namespace {

bool finite(double x) { return std::isfinite(x); }

FactorJet zero_jet(std::size_t m) {
  FactorJet j;
  j.grad.assign(m, 0.0);
  j.hess.assign(m * m, 0.0);
  return j;
}

}  // namespace

WarpingJet eval_warping(const WarpingProfile& profile, double r) {
  if (!(r >= profile.r_min))
    fail(ErrorCode::domain, "radius " + std::to_string(r) + " below r_min " + std::to_string(profile.r_min));
  WarpingJet j = profile.eval(r);
  if (!finite(j.value) || !finite(j.d1) || !finite(j.d2))
    fail(ErrorCode::domain, "warping profile not finite at r=" + std::to_string(r));
  if (j.value <= 0.0)
    fail(ErrorCode::non_positive_warping, "lambda <= 0 at r=" + std::to_string(r));
  return j;
}

double warping_defect(const WarpingProfile& profile, double r) {
  if (profile.defect) return profile.defect(r);
  WarpingJet j = eval_warping(profile, r);
  return j.value * j.d2 - j.d1 * j.d1;
}

WarpingProfile euclidean_profile() {
  WarpingProfile w;
  w.eval = [](double r) { return WarpingJet{r, 1.0, 0.0}; };
  w.defect = [](double) { return -1.0; };
  w.r_min = 1e-9;
  w.family = WarpingFamily::euclidean;
  w.label = "euclidean";
  return w;
}

WarpingProfile hyperbolic_profile() {
  WarpingProfile w;
  w.eval = [](double r) { return WarpingJet{std::sinh(r), std::cosh(r), std::sinh(r)}; };
  w.defect = [](double) { return -1.0; };
  w.r_min = 1e-9;
  w.family = WarpingFamily::hyperbolic;
  w.label = "hyperbolic";
  return w;
}

WarpingProfile example1_profile(double l, double p, double q, double r_min) {
  WarpingProfile w;
  w.eval = [l, p, q](double r) {
    double s = std::sinh(l * r), c = std::cosh(l * r);
    double rp = std::pow(r, -p), e = std::exp(-q * r);
    return WarpingJet{s + rp + e, l * c - p * rp / r - q * e, l * l * s + p * (p + 1.0) * rp / (r * r) + q * q * e};
  };
  w.defect = [l, p, q](double r) {
    double s = std::sinh(l * r), c = std::cosh(l * r);
    double rp = std::pow(r, -p), e = std::exp(-q * r);
    double a = rp + e, a1 = -p * rp / r - q * e, a2 = p * (p + 1.0) * rp / (r * r) + q * q * e;
    return -l * l + s * (a2 + l * l * a) + a * a2 - 2.0 * l * c * a1 - a1 * a1;
  };
  w.r_min = r_min;
  w.family = WarpingFamily::example1;
  w.l = l;
  w.p = p;
  w.q = q;
  w.label = "example1";
  return w;
}

WarpingProfile sqrt_profile(double scale) {
  WarpingProfile w;
  w.eval = [scale](double r) {
    double s = std::sqrt(1.0 + r);
    return WarpingJet{scale * s, 0.5 * scale / s, -0.25 * scale / (s * s * s)};
  };
  w.defect = [scale](double r) { return -0.5 * scale * scale / (1.0 + r); };
  w.r_min = 0.0;
  w.label = "sqrt";
  return w;
}

WarpingProfile combo_profile(double a, double k, double b, double c, double r_min) {
  WarpingProfile w;
  w.eval = [a, k, b, c](double r) {
    double s = std::sinh(k * r), ch = std::cosh(k * r);
    return WarpingJet{a * s + b * r + c, a * k * ch + b, a * k * k * s};
  };
  w.r_min = r_min;
  w.label = "combo";
  return w;
}

ConformalFactor zero_factor() {
  ConformalFactor f;
  f.jet = [](std::span<const double> x) { return zero_jet(x.size()); };
  f.support_radius = 0.0;
  f.label = "zero";
  return f;
}

ConformalFactor constant_factor(double c) {
  ConformalFactor f;
  f.jet = [c](std::span<const double> x) {
    FactorJet j = zero_jet(x.size());
    j.value = c;
    return j;
  };
  f.label = "constant";
  return f;
}

ConformalFactor log_factor() {
  ConformalFactor f;
  f.jet = [](std::span<const double> x) {
    FactorJet j = zero_jet(x.size());
    double r = x[0];
    j.value = std::log(r);
    j.grad[0] = 1.0 / r;
    j.hess[0] = -1.0 / (r * r);
    return j;
  };
  f.label = "log";
  return f;
}

ConformalFactor power_factor(double a, double m) {
  ConformalFactor f;
  f.jet = [a, m](std::span<const double> x) {
    FactorJet j = zero_jet(x.size());
    double r = x[0], rm = a * std::pow(r, -m);
    j.value = rm;
    j.grad[0] = -m * rm / r;
    j.hess[0] = m * (m + 1.0) * rm / (r * r);
    return j;
  };
  f.decay = DecayParams{std::abs(a), m};
  f.label = "power";
  return f;
}

ConformalFactor separable_factor(double a, double m, double eps) {
  ConformalFactor f;
  f.jet = [a, m, eps](std::span<const double> x) {
    std::size_t d = x.size();
    FactorJet j = zero_jet(d);
    double r = x[0], R = a * std::pow(r, -m), R1 = -m * R / r, R2 = m * (m + 1.0) * R / (r * r);
    double th = d > 2 ? x[1] : std::numbers::pi / 2;
    double A = 1.0 + eps * std::cos(th), A1 = -eps * std::sin(th), A2 = -eps * std::cos(th);
    j.value = R * A;
    j.grad[0] = R1 * A;
    j.hess[0] = R2 * A;
    if (d > 2) {
      j.grad[1] = R * A1;
      j.hess[1] = j.hess[d] = R1 * A1;
      j.hess[d + 1] = R * A2;
    }
    return j;
  };
  f.radial = eps == 0.0;
  f.label = "separable";
  return f;
}

ConformalFactor dipole_factor(double a, double m, double eps) {
  ConformalFactor f;
  f.jet = [a, m, eps](std::span<const double> x) {
    std::size_t d = x.size();
    FactorJet j = zero_jet(d);
    double r = x[0], R = a * std::pow(r, -m), R1 = -m * R / r, R2 = m * (m + 1.0) * R / (r * r);
    if (d < 3) {
      j.value = R;
      j.grad[0] = R1;
      j.hess[0] = R2;
      return j;
    }
    double th = x[1], ph = x[2];
    double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
    double A = 1.0 + eps * st * cp;
    double At = eps * ct * cp, Ap = -eps * st * sp;
    double Att = -eps * st * cp, Atp = -eps * ct * sp, App = -eps * st * cp;
    j.value = R * A;
    j.grad[0] = R1 * A;
    j.grad[1] = R * At;
    j.grad[2] = R * Ap;
    j.hess[0] = R2 * A;
    j.hess[1] = j.hess[d] = R1 * At;
    j.hess[2] = j.hess[2 * d] = R1 * Ap;
    j.hess[d + 1] = R * Att;
    j.hess[d + 2] = j.hess[2 * d + 1] = R * Atp;
    j.hess[2 * d + 2] = R * App;
    return j;
  };
  f.radial = eps == 0.0;
  f.label = "dipole";
  return f;
}

ConformalFactor bump_factor(double a, double radius) {
  ConformalFactor f;
  f.jet = [a, radius](std::span<const double> x) {
    FactorJet j = zero_jet(x.size());
    double r = x[0];
    if (r >= radius) return j;
    double R2 = radius * radius, u = 1.0 - r * r / R2, du = -2.0 * r / R2, ddu = -2.0 / R2;
    j.value = a * u * u * u * u;
    j.grad[0] = 4.0 * a * u * u * u * du;
    j.hess[0] = a * (12.0 * u * u * du * du + 4.0 * u * u * u * ddu);
    return j;
  };
  f.support_radius = radius;
  f.label = "bump";
  return f;
}

void validate_band(const FiberCurvatureBand& band) {
  if (!finite(band.rho1) || !finite(band.rho2) || band.rho1 > band.rho2)
    fail(ErrorCode::invalid_argument, "fiber band requires rho1 <= rho2");
}

Vec chart_coords(const WarpingProfile& profile, int n, const AmbientPoint& p) {
  if (n < 1) fail(ErrorCode::invalid_argument, "fiber dimension must be >= 1");
  if (static_cast<int>(p.angular.size()) > n)
    fail(ErrorCode::domain, "too many angular coordinates for fiber dimension " + std::to_string(n));
  if (!finite(p.r) || p.r < profile.r_min)
    fail(ErrorCode::domain, "radius " + std::to_string(p.r) + " outside [r_min, inf)");
  Vec x(n + 1, std::numbers::pi / 2);
  x[0] = p.r;
  for (std::size_t i = 0; i < p.angular.size(); ++i) {
    if (!finite(p.angular[i])) fail(ErrorCode::domain, "angular coordinate not finite");
    x[i + 1] = p.angular[i];
  }
  for (int i = 1; i < n; ++i)
    if (!(x[i] > 0.0 && x[i] < std::numbers::pi))
      fail(ErrorCode::domain, "polar angle must lie in the open interval (0, pi)");
  return x;
}

Vec components(const TangentVector& v, int n) {
  if (static_cast<int>(v.v_ang.size()) > n)
    fail(ErrorCode::invalid_argument, "tangent vector has too many angular components");
  Vec c(n + 1, 0.0);
  c[0] = v.v_r;
  std::copy(v.v_ang.begin(), v.v_ang.end(), c.begin() + 1);
  for (double a : c)
    if (!finite(a)) fail(ErrorCode::invalid_argument, "tangent vector component not finite");
  return c;
}

TangentVector make_vector(const Vec& comps, MetricKind kind) {
  TangentVector v;
  v.v_r = comps.empty() ? 0.0 : comps[0];
  if (comps.size() > 1) v.v_ang.assign(comps.begin() + 1, comps.end());
  v.norm_metric = kind;
  return v;
}

LocalGeometry::LocalGeometry(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                             const AmbientPoint& p)
    : n_(n), m_(n + 1) {
  x_ = chart_coords(profile, n, p);
  lam_ = eval_warping(profile, x_[0]);
  defect_ = warping_defect(profile, x_[0]);
  fj_ = factor.jet(std::span<const double>(x_));
  if (static_cast<int>(fj_.grad.size()) != m_ || static_cast<int>(fj_.hess.size()) != m_ * m_)
    fail(ErrorCode::internal, "conformal factor jet has wrong size");
  e2f_ = std::exp(2.0 * fj_.value);

  // diagonal ḡ: g_0 = 1, g_i = λ² Π_{j<i} sin²θ_j
  g_.assign(m_, 1.0);
  Vec s(m_, 1.0);
  for (int i = 2; i < m_; ++i) s[i] = s[i - 1] * std::sin(x_[i - 1]) * std::sin(x_[i - 1]);
  for (int i = 1; i < m_; ++i) g_[i] = lam_.value * lam_.value * s[i];

  // dg[a*m+b] = ∂_b g_a
  Vec dg(m_ * m_, 0.0);
  for (int i = 1; i < m_; ++i) {
    dg[i * m_] = 2.0 * lam_.value * lam_.d1 * s[i];
    for (int j = 1; j < i; ++j) dg[i * m_ + j] = 2.0 * g_[i] * std::cos(x_[j]) / std::sin(x_[j]);
  }
  gb_.assign(m_ * m_ * m_, 0.0);
  for (int c = 0; c < m_; ++c)
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b) {
        double v = 0.0;
        if (b == c) v += dg[c * m_ + a];
        if (a == c) v += dg[c * m_ + b];
        if (a == b) v -= dg[a * m_ + c];
        gb_[(c * m_ + a) * m_ + b] = v / (2.0 * g_[c]);
      }
}

double LocalGeometry::gamma_hat(int c, int a, int b) const {
  const Vec& df = fj_.grad;
  double v = gamma_bar(c, a, b);
  if (c == a) v += df[b];
  if (c == b) v += df[a];
  if (a == b) v -= g_[a] * df[c] / g_[c];
  return v;
}

double LocalGeometry::dot(const Vec& X, const Vec& Y, MetricKind kind) const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a) s += g_[a] * X[a] * Y[a];
  return kind == MetricKind::hat ? e2f_ * s : s;
}

double LocalGeometry::norm(const Vec& X, MetricKind kind) const { return std::sqrt(dot(X, X, kind)); }

Vec LocalGeometry::normalize(const Vec& X, MetricKind kind) const {
  double nx = norm(X, kind);
  if (!(nx > 0.0)) fail(ErrorCode::invalid_argument, "cannot normalize the zero vector");
  Vec out(X);
  for (double& a : out) a /= nx;
  return out;
}

Vec LocalGeometry::eta() const {
  Vec e(m_, 0.0);
  e[0] = lam_.value;
  return e;
}

double LocalGeometry::eta_norm_hat() const { return std::sqrt(e2f_) * lam_.value; }

double LocalGeometry::psi_hat() const { return lam_.d1 + lam_.value * fj_.grad[0]; }

double LocalGeometry::directional_f(const Vec& X) const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a) s += X[a] * fj_.grad[a];
  return s;
}

Vec LocalGeometry::grad_bar_f() const {
  Vec v(m_);
  for (int a = 0; a < m_; ++a) v[a] = fj_.grad[a] / g_[a];
  return v;
}

Vec LocalGeometry::grad_hat_f() const {
  Vec v = grad_bar_f();
  for (double& a : v) a /= e2f_;
  return v;
}

double LocalGeometry::grad_bar_f_sq() const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a) s += fj_.grad[a] * fj_.grad[a] / g_[a];
  return s;
}

double LocalGeometry::hessian_bar_f(const Vec& X, const Vec& Y) const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) {
      double h = fj_.hess[a * m_ + b];
      for (int c = 0; c < m_; ++c) h -= gamma_bar(c, a, b) * fj_.grad[c];
      s += X[a] * Y[b] * h;
    }
  return s;
}

double LocalGeometry::hessian_hat_f(const Vec& X, const Vec& Y) const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) {
      double h = fj_.hess[a * m_ + b];
      for (int c = 0; c < m_; ++c) h -= gamma_hat(c, a, b) * fj_.grad[c];
      s += X[a] * Y[b] * h;
    }
  return s;
}

double LocalGeometry::hessian_bar_norm() const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a)
    for (int b = 0; b < m_; ++b) {
      double h = fj_.hess[a * m_ + b];
      for (int c = 0; c < m_; ++c) h -= gamma_bar(c, a, b) * fj_.grad[c];
      s += h * h / (g_[a] * g_[b]);
    }
  return std::sqrt(s);
}

double LocalGeometry::laplacian_bar_f() const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a) {
    double h = fj_.hess[a * m_ + a];
    for (int c = 0; c < m_; ++c) h -= gamma_bar(c, a, a) * fj_.grad[c];
    s += h / g_[a];
  }
  return s;
}

Vec LocalGeometry::skew_T(const Vec& X) const {
  double xf = directional_f(X);
  double xe = dot(X, eta(), MetricKind::hat);
  Vec gf = grad_hat_f();
  Vec t(m_);
  for (int a = 0; a < m_; ++a) t[a] = -xe * gf[a];
  t[0] += xf * lam_.value;
  return t;
}

Vec LocalGeometry::covariant_eta(const Vec& X) const {
  Vec out(m_, 0.0);
  out[0] = X[0] * lam_.d1;
  for (int c = 0; c < m_; ++c)
    for (int a = 0; a < m_; ++a) out[c] += X[a] * gamma_hat(c, a, 0) * lam_.value;
  return out;
}

Vec LocalGeometry::covariant_grad_f(const Vec& X) const {
  Vec out(m_, 0.0);
  Vec e(m_, 0.0);
  for (int b = 0; b < m_; ++b) {
    e[b] = 1.0;
    out[b] = hessian_hat_f(X, e) / hat_metric(b);
    e[b] = 0.0;
  }
  return out;
}

double LocalGeometry::fiber_dot(const Vec& X, const Vec& Y) const {
  double s = 0.0;
  for (int a = 1; a < m_; ++a) s += g_[a] * X[a] * Y[a];
  return s;
}

double LocalGeometry::bar_ricci_at(double rho, const Vec& X, const Vec& Y) const {
  double lam = lam_.value;
  return (n_ - 1) * (rho + defect_) / (lam * lam) * fiber_dot(X, Y) -
         n_ * (lam_.d2 / lam) * dot(X, Y, MetricKind::bar);
}

double LocalGeometry::conformal_ricci_terms(const Vec& X, const Vec& Y) const {
  double k = n_ - 1;
  double gxy = dot(X, Y, MetricKind::bar);
  return -k * hessian_bar_f(X, Y) + k * directional_f(X) * directional_f(Y) - laplacian_bar_f() * gxy -
         k * grad_bar_f_sq() * gxy;
}

double LocalGeometry::hat_ricci_at(double rho, const Vec& X, const Vec& Y) const {
  return bar_ricci_at(rho, X, Y) + conformal_ricci_terms(X, Y);
}

double LocalGeometry::hat_scalar_at(double rho) const {
  double lam = lam_.value;
  double bar = n_ * (n_ - 1) * (rho + defect_) / (lam * lam) - n_ * (n_ + 1) * lam_.d2 / lam;
  return (bar - 2.0 * n_ * laplacian_bar_f() - n_ * (n_ - 1) * grad_bar_f_sq()) / e2f_;
}

namespace {
Interval ordered(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }
}  // namespace

Interval LocalGeometry::bar_ricci(const FiberCurvatureBand& band, const Vec& X, const Vec& Y) const {
  return ordered(bar_ricci_at(band.rho1, X, Y), bar_ricci_at(band.rho2, X, Y));
}

Interval LocalGeometry::hat_ricci(const FiberCurvatureBand& band, const Vec& X, const Vec& Y) const {
  return ordered(hat_ricci_at(band.rho1, X, Y), hat_ricci_at(band.rho2, X, Y));
}

Interval LocalGeometry::hat_scalar(const FiberCurvatureBand& band) const {
  return ordered(hat_scalar_at(band.rho1), hat_scalar_at(band.rho2));
}

Vec LocalGeometry::G() const {
  Vec out = covariant_grad_f(eta());
  Vec gf = grad_hat_f();
  double gf2 = grad_bar_f_sq() / e2f_;
  for (int a = 0; a < m_; ++a) out[a] += lam_.d1 * gf[a];
  out[0] += lam_.d2 / e2f_ + gf2 * lam_.value;
  return out;
}

Vec LocalGeometry::J(const Vec& V, double rho) const {
  Vec out = G();
  out[0] += (1.0 + hat_ricci_at(rho, V, V)) * lam_.value / n_;
  return out;
}

Vec LocalGeometry::grad_psi_hat() const {
  Vec d(m_);
  d[0] = lam_.d2 + lam_.d1 * fj_.grad[0] + lam_.value * fj_.hess[0];
  for (int a = 1; a < m_; ++a) d[a] = lam_.value * fj_.hess[a * m_];
  for (int a = 0; a < m_; ++a) d[a] /= hat_metric(a);
  return d;
}

Vec LocalGeometry::G_correction() const {
  // 2η(f)∇̂f − 2|∇̂f|²η; vanishes when f is radial
  Vec out = grad_hat_f();
  double ef = lam_.value * fj_.grad[0];
  for (double& c : out) c *= 2.0 * ef;
  out[0] -= 2.0 * grad_bar_f_sq() / e2f_ * lam_.value;
  return out;
}

double LocalGeometry::nu_psi_hat(const Vec& nu) const {
  double corr = dot(G_correction(), nu, MetricKind::hat);
  double a_form = dot(G(), nu, MetricKind::hat) + corr;
  // ν(λ f_r) + e^{-2f}(λ″/λ) ĝ(η, ν)
  double lf = lam_.d1 * fj_.grad[0] * nu[0];
  double scale_terms = std::abs(lf);
  for (int a = 0; a < m_; ++a) {
    double t = lam_.value * fj_.hess[a * m_] * nu[a];
    lf += t;
    scale_terms += std::abs(t);
  }
  double w = dot(eta(), nu, MetricKind::hat);
  double lam_term = (lam_.d2 / lam_.value) * w / e2f_;
  double b_form = lf + lam_term;
  double scale = 1.0 + std::abs(a_form) + std::abs(b_form) + std::abs(lam_term) + std::abs(corr) + scale_terms;
  if (!(std::abs(a_form - b_form) <= 1e-9 * scale))
    fail(ErrorCode::inconsistency, "nu(psi_hat) assembly forms disagree: " + std::to_string(a_form) + " vs " +
                                       std::to_string(b_form));
  return b_form;
}

double LocalGeometry::delta_ratio() const {
  double psi = psi_hat();
  double scale = std::abs(lam_.d1) + std::abs(lam_.value * fj_.grad[0]);
  if (psi == 0.0 || std::abs(psi) <= 1e-14 * scale)
    fail(ErrorCode::degenerate_potential, "psi_hat vanishes at r=" + std::to_string(x_[0]));
  return std::exp(fj_.value) * lam_.d1 / psi;
}

double LocalGeometry::growth_ratio() const {
  double psi = psi_hat();
  double scale = std::abs(lam_.d1) + std::abs(lam_.value * fj_.grad[0]);
  if (psi == 0.0 || std::abs(psi) <= 1e-14 * scale)
    fail(ErrorCode::degenerate_potential, "psi_hat vanishes at r=" + std::to_string(x_[0]));
  return lam_.d1 / psi;
}

double psi_hat(const Ambient& amb, const AmbientPoint& p) {
  return LocalGeometry(amb.profile, amb.factor, amb.n, p).psi_hat();
}

TangentVector skew_T(const Ambient& amb, const AmbientPoint& p, const TangentVector& X) {
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return make_vector(geo.skew_T(components(X, amb.n)), X.norm_metric);
}

Interval bar_ricci(const Ambient& amb, const AmbientPoint& p, const TangentVector& X, const TangentVector& Y) {
  validate_band(amb.band);
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return geo.bar_ricci(amb.band, components(X, amb.n), components(Y, amb.n));
}

Interval hat_ricci(const Ambient& amb, const AmbientPoint& p, const TangentVector& X, const TangentVector& Y) {
  validate_band(amb.band);
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return geo.hat_ricci(amb.band, components(X, amb.n), components(Y, amb.n));
}

Interval hat_scalar(const Ambient& amb, const AmbientPoint& p) {
  validate_band(amb.band);
  return LocalGeometry(amb.profile, amb.factor, amb.n, p).hat_scalar(amb.band);
}

double nu_psi_hat(const Ambient& amb, const AmbientPoint& p, const TangentVector& nu) {
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return geo.nu_psi_hat(components(nu, amb.n));
}

TangentVector unit_vector(const Ambient& amb, const AmbientPoint& p, const TangentVector& v) {
  LocalGeometry geo(amb.profile, amb.factor, amb.n, p);
  return make_vector(geo.normalize(components(v, amb.n), v.norm_metric), v.norm_metric);
}

}  // namespace imcf
