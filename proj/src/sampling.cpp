#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "errors.hpp"

namespace imcf {

namespace {

constexpr double pi = std::numbers::pi;

// the plastic-number family: φ_d is the real root of x^{d+1} = x + 1
double generalized_golden(int d) {
  double x = 2.0;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

LowDiscrepancy::LowDiscrepancy(int dims, std::uint64_t seed, std::uint64_t stream) {
  double phi = generalized_golden(dims);
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + stream);
  for (int j = 0; j < dims; ++j) {
    alpha_.push_back(std::fmod(std::pow(1.0 / phi, j + 1), 1.0));
    offset_.push_back(seed == 0 ? 0.5 : unit_double(rng()));
  }
}

double LowDiscrepancy::at(std::uint64_t k, int dim) const {
  double v = offset_[dim] + static_cast<double>(k) * alpha_[dim];
  return v - std::floor(v);
}

SamplingPlan uniform_plan(double r_lo, double r_hi, int count, int cone_samples, int angular_samples,
                          std::uint64_t seed) {
  if (count < 2 || !(r_hi > r_lo)) fail(ErrorCode::invalid_argument, "r-grid needs count >= 2 and r_max > r_min");
  SamplingPlan plan;
  for (int i = 0; i < count; ++i) plan.r_grid.push_back(r_lo + (r_hi - r_lo) * i / (count - 1));
  plan.r_grid.back() = r_hi;
  plan.cone_samples = cone_samples;
  plan.angular_samples = angular_samples;
  plan.seed = seed;
  return plan;
}

void validate_plan(const SamplingPlan& plan, double r_min) {
  if (plan.r_grid.empty()) fail(ErrorCode::invalid_argument, "empty r-grid");
  if (plan.cone_samples < 8) fail(ErrorCode::invalid_argument, "cone_samples must be >= 8");
  if (plan.angular_samples < 1) fail(ErrorCode::invalid_argument, "angular_samples must be >= 1");
  for (std::size_t i = 0; i < plan.r_grid.size(); ++i) {
    if (!(plan.r_grid[i] >= r_min)) fail(ErrorCode::invalid_argument, "r-grid point below r_min");
    if (i > 0 && !(plan.r_grid[i] > plan.r_grid[i - 1]))
      fail(ErrorCode::invalid_argument, "r-grid must be strictly increasing");
  }
}

SamplingPlan refine_plan(const SamplingPlan& plan) {
  SamplingPlan out = plan;
  out.r_grid.clear();
  for (std::size_t i = 0; i < plan.r_grid.size(); ++i) {
    if (i > 0) out.r_grid.push_back(0.5 * (plan.r_grid[i - 1] + plan.r_grid[i]));
    out.r_grid.push_back(plan.r_grid[i]);
  }
  out.cone_samples *= 2;
  out.angular_samples *= 2;
  return out;
}

std::vector<Vec> angular_sites(int n, int count, std::uint64_t seed, bool radial) {
  if (radial || n == 0) return {Vec(n, pi / 2)};
  LowDiscrepancy seq(n, seed, 1);
  std::vector<Vec> sites;
  for (int k = 0; k < count; ++k) {
    Vec a(n);
    for (int j = 0; j < n - 1; ++j) {
      double th = std::acos(1.0 - 2.0 * seq.at(k, j));
      a[j] = std::clamp(th, 1e-6, pi - 1e-6);
    }
    a[n - 1] = 2.0 * pi * seq.at(k, n - 1);
    sites.push_back(std::move(a));
  }
  return sites;
}

std::vector<Vec> cone_vectors(const LocalGeometry& geo, double theta, int count, std::uint64_t seed) {
  int n = geo.n();
  LowDiscrepancy seq(std::max(n, 1), seed, 2);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    double a = k == 0 ? 0.0 : k == 1 ? theta : theta * seq.at(k, 0);
    Vec u(n, 0.0);
    if (n == 1) {
      u[0] = seq.at(k, 0) < 0.5 ? 1.0 : -1.0;
    } else {
      // hyperspherical direction on S^{n-1}
      double s = 1.0;
      for (int j = 0; j < n - 1; ++j) {
        double ang = (j == n - 2 ? 2.0 * pi : pi) * seq.at(k, std::min(j + 1, n - 1));
        u[j] = s * std::cos(ang);
        s *= std::sin(ang);
      }
      u[n - 1] = s;
    }
    Vec v(n + 1);
    v[0] = std::cos(a) / std::sqrt(geo.hat_metric(0));
    for (int i = 0; i < n; ++i) v[i + 1] = std::sin(a) * u[i] / std::sqrt(geo.hat_metric(i + 1));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace imcf
