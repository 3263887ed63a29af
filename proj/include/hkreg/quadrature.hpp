#pragma once

#include <cstddef>
#include <vector>

namespace hkreg {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Closed trapezoid rule with n >= 2 equally spaced nodes on [a, b].
QuadratureRule trapezoid(std::size_t n, double a, double b);

/// Periodic trapezoid rule: n nodes on [a, a + period), equal weights.
QuadratureRule periodic_trapezoid(std::size_t n, double a, double period);

}  // namespace hkreg

#include "hkreg/manifold.hpp"

namespace hkreg {

/// Product quadrature for integrals over a whole manifold against mu.
/// Circle: periodic trapezoid with `resolution` nodes. Sphere: Gauss-Legendre
/// in the cosine of the polar angle (`resolution` nodes) times a periodic
/// trapezoid in azimuth (2 * resolution nodes), polar axis along `pole`.
/// Torus: periodic trapezoid with `resolution` nodes per factor.
struct ManifoldQuadrature {
  std::vector<ManifoldPoint> points;
  std::vector<double> weights;
};

ManifoldQuadrature manifold_quadrature(const Manifold& m, std::size_t resolution,
                                       const UnitVector3& pole = {0.0, 0.0, 1.0});

}  // namespace hkreg
