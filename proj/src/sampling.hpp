#pragma once

#include <cstdint>
#include <vector>

#include "metric_kernel.hpp"

namespace imcf {

struct SamplingPlan {
  Vec r_grid;
  int cone_samples = 16;
  int angular_samples = 8;
  std::uint64_t seed = 0;
};

SamplingPlan uniform_plan(double r_lo, double r_hi, int count, int cone_samples, int angular_samples,
                          std::uint64_t seed);
void validate_plan(const SamplingPlan& plan, double r_min);
// Superset plan: r-grid midpoints inserted, cone and angular counts doubled.
SamplingPlan refine_plan(const SamplingPlan& plan);

// Additive recurrence x_k = frac(offset + k·a) with irrational a; prefixes are nested.
class LowDiscrepancy {
 public:
  LowDiscrepancy(int dims, std::uint64_t seed, std::uint64_t stream);
  double at(std::uint64_t k, int dim) const;

 private:
  Vec alpha_;
  Vec offset_;
};

// Angular sample sites (each of size n); a single equatorial site when the factor is radial.
std::vector<Vec> angular_sites(int n, int count, std::uint64_t seed, bool radial);

// ĝ-unit vectors V = cos a·e_0 + sin a·u with a in [0, theta] and u a unit fiber direction.
// The first two samples are a = 0 and a = theta.
std::vector<Vec> cone_vectors(const LocalGeometry& geo, double theta, int count, std::uint64_t seed);

}  // namespace imcf
