#pragma once

#include "hkreg/manifold.hpp"
#include "hkreg/random.hpp"

namespace hkreg {

// Heat kernels use the generator Delta/2: at time t the flat-space kernel is
// a Gaussian with variance t per coordinate. Densities are with respect to
// the Riemannian measure of the manifold.

/// p_t(x, y). Throws InvalidTime for t <= 0.
double heat_kernel(const Manifold& m, double t, const ManifoldPoint& x,
                   const ManifoldPoint& y);

/// log p_t(x, y), evaluated in log space where the series allows it so that
/// far-apart pairs at small t stay finite.
double log_heat_kernel(const Manifold& m, double t, const ManifoldPoint& x,
                       const ManifoldPoint& y);

/// Draw from p_t(x, .). Throws InvalidTime for t <= 0.
ManifoldPoint sample_heat_kernel(const Manifold& m, double t,
                                 const ManifoldPoint& x, Rng& rng);

/// Draw from the normalized Riemannian measure.
ManifoldPoint sample_uniform(const Manifold& m, Rng& rng);

namespace circle_kernel {

/// Image sum (1/sqrt(2 pi t)) sum_k exp(-(delta + 2 pi k)^2 / (2t)).
double wrapped(double t, double delta, const HeatKernelConfig& config);
/// Log of the image sum, stable for any delta.
double log_wrapped(double t, double delta, const HeatKernelConfig& config);
/// Eigen sum (1/2pi)(1 + 2 sum_m exp(-m^2 t / 2) cos(m delta)).
double eigen(double t, double delta, const HeatKernelConfig& config);
/// Representation chosen by config.representation_switch_time.
double density(double t, double delta, const HeatKernelConfig& config);
double log_density(double t, double delta, const HeatKernelConfig& config);

}  // namespace circle_kernel

namespace sphere_kernel {

/// Legendre series in cos(gamma). Falls back to the flat Gaussian in the
/// geodesic distance when the series cannot resolve the value (t too small
/// for the truncation cap, or the sum sits below its own rounding error).
double density(double t, double gamma, const HeatKernelConfig& config);
double log_density(double t, double gamma, const HeatKernelConfig& config);

/// Raw truncated series, no fallback. `converged` reports whether the
/// tolerance was reached before the truncation cap.
double series(double t, double cos_gamma, const HeatKernelConfig& config,
              bool* converged = nullptr);

}  // namespace sphere_kernel

}  // namespace hkreg
