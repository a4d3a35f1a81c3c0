#include "fd_oracle.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace imcf {

namespace {

struct Chart {
  const WarpingProfile& profile;
  const ConformalFactor& factor;
  int m;

  // full coordinate matrix of ĝ
  Vec metric(const Vec& x) const {
    Vec g(m * m, 0.0);
    double lam = profile.eval(x[0]).value;
    double e2f = std::exp(2.0 * factor.jet(std::span<const double>(x)).value);
    double s = 1.0;
    g[0] = e2f;
    for (int i = 1; i < m; ++i) {
      if (i >= 2) s *= std::sin(x[i - 1]) * std::sin(x[i - 1]);
      g[i * m + i] = e2f * lam * lam * s;
    }
    return g;
  }

  Vec inverse(Vec a) const {
    Vec inv(m * m, 0.0);
    for (int i = 0; i < m; ++i) inv[i * m + i] = 1.0;
    for (int c = 0; c < m; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
      if (a[piv * m + c] == 0.0) fail(ErrorCode::internal, "singular metric in oracle");
      for (int k = 0; k < m; ++k) {
        std::swap(a[c * m + k], a[piv * m + k]);
        std::swap(inv[c * m + k], inv[piv * m + k]);
      }
      double d = a[c * m + c];
      for (int k = 0; k < m; ++k) {
        a[c * m + k] /= d;
        inv[c * m + k] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        double f = a[r * m + c];
        for (int k = 0; k < m; ++k) {
          a[r * m + k] -= f * a[c * m + k];
          inv[r * m + k] -= f * inv[c * m + k];
        }
      }
    }
    return inv;
  }

  // Γ^k_ij stored at (k*m+i)*m+j
  Vec christoffel(const Vec& x, double h) const {
    Vec dg(m * m * m);
    for (int c = 0; c < m; ++c) {
      Vec xp(x), xm(x);
      xp[c] += h;
      xm[c] -= h;
      Vec gp = metric(xp), gm = metric(xm);
      for (int k = 0; k < m * m; ++k) dg[c * m * m + k] = (gp[k] - gm[k]) / (2.0 * h);
    }
    Vec ginv = inverse(metric(x));
    auto d = [&](int c, int a, int b) { return dg[(c * m + a) * m + b]; };
    Vec gam(m * m * m, 0.0);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) s += ginv[k * m + l] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
          gam[(k * m + i) * m + j] = 0.5 * s;
        }
    return gam;
  }

  Vec ricci(const Vec& x, double h) const {
    Vec gam = christoffel(x, h);
    Vec dgam(m * m * m * m);
    for (int c = 0; c < m; ++c) {
      Vec xp(x), xm(x);
      xp[c] += h;
      xm[c] -= h;
      Vec gp = christoffel(xp, h), gm = christoffel(xm, h);
      for (int k = 0; k < m * m * m; ++k) dgam[c * m * m * m + k] = (gp[k] - gm[k]) / (2.0 * h);
    }
    auto G = [&](int k, int i, int j) { return gam[(k * m + i) * m + j]; };
    auto dG = [&](int c, int k, int i, int j) { return dgam[((c * m + k) * m + i) * m + j]; };
    Vec ric(m * m, 0.0);
    for (int b = 0; b < m; ++b)
      for (int d = 0; d < m; ++d) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) {
          s += dG(c, c, b, d) - dG(d, c, b, c);
          for (int e = 0; e < m; ++e) s += G(c, c, e) * G(e, b, d) - G(c, d, e) * G(e, b, c);
        }
        ric[b * m + d] = s;
      }
    return ric;
  }
};

void check_step(const WarpingProfile& profile, int n, const Vec& x, double h) {
  if (!(h >= 1e-6 && h <= 1e-2)) fail(ErrorCode::invalid_argument, "oracle step must lie in [1e-6, 1e-2]");
  if (x[0] - 2.0 * h <= profile.r_min) fail(ErrorCode::domain, "oracle point too close to r_min");
  for (int i = 1; i < n; ++i)
    if (x[i] - 2.0 * h <= 0.0 || x[i] + 2.0 * h >= std::numbers::pi)
      fail(ErrorCode::domain, "oracle point too close to a pole");
}

double contract(const Vec& ric, int m, const Vec& X, const Vec& Y) {
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) s += ric[a * m + b] * X[a] * Y[b];
  return s;
}

double richardson(double coarse, double fine) {
  if (std::abs(coarse - fine) > 1e-2 * std::max(std::abs(fine), 1.0))
    fail(ErrorCode::step_too_large, "finite-difference estimates at h and h/2 disagree");
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

Vec fd_ricci_matrix(const WarpingProfile& profile, const ConformalFactor& factor, int n, const AmbientPoint& p,
                    double h) {
  Vec x = chart_coords(profile, n, p);
  check_step(profile, n, x, h);
  Chart chart{profile, factor, n + 1};
  Vec coarse = chart.ricci(x, h), fine = chart.ricci(x, h / 2);
  Vec out(coarse.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  return out;
}

double fd_curvature_oracle(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                           const AmbientPoint& p, const TangentVector& X, const TangentVector& Y, double h) {
  Vec x = chart_coords(profile, n, p);
  check_step(profile, n, x, h);
  Chart chart{profile, factor, n + 1};
  Vec xc = components(X, n), yc = components(Y, n);
  double coarse = contract(chart.ricci(x, h), n + 1, xc, yc);
  double fine = contract(chart.ricci(x, h / 2), n + 1, xc, yc);
  return richardson(coarse, fine);
}

double fd_scalar_oracle(const WarpingProfile& profile, const ConformalFactor& factor, int n, const AmbientPoint& p,
                        double h) {
  Vec x = chart_coords(profile, n, p);
  check_step(profile, n, x, h);
  int m = n + 1;
  Chart chart{profile, factor, m};
  Vec ginv = chart.inverse(chart.metric(x));
  auto trace = [&](const Vec& ric) {
    double s = 0.0;
    for (int k = 0; k < m * m; ++k) s += ginv[k] * ric[k];
    return s;
  };
  return richardson(trace(chart.ricci(x, h)), trace(chart.ricci(x, h / 2)));
}

}  // namespace imcf
