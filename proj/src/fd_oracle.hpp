#pragma once

#include "metric_kernel.hpp"

namespace imcf {

// Brute-force Ricci tensor of ĝ at p: the coordinate metric is built from the values of λ
// and f only, and Christoffel symbols and their derivatives come from central differences.
// Returns the Richardson combination of steps h and h/2.
Vec fd_ricci_matrix(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                    const AmbientPoint& p, double h);

double fd_curvature_oracle(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                           const AmbientPoint& p, const TangentVector& X, const TangentVector& Y,
                           double h = 1e-3);
double fd_scalar_oracle(const WarpingProfile& profile, const ConformalFactor& factor, int n,
                        const AmbientPoint& p, double h = 1e-3);

}  // namespace imcf
