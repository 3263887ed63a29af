#include "hkreg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hkreg/error.hpp"

namespace hkreg {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule trapezoid(std::size_t n, double a, double b) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "trapezoid needs n >= 2");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, (b - a) / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = (i + 1 == n)
                        ? b
                        : a + (b - a) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
  }
  rule.weights.front() *= 0.5;
  rule.weights.back() *= 0.5;
  return rule;
}

QuadratureRule periodic_trapezoid(std::size_t n, double a, double period) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, period / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = a + period * static_cast<double>(i) / static_cast<double>(n);
  }
  return rule;
}

}  // namespace hkreg

namespace hkreg {

ManifoldQuadrature manifold_quadrature(const Manifold& m, std::size_t resolution,
                                       const UnitVector3& pole) {
  ManifoldQuadrature q;
  switch (m.kind()) {
    case ManifoldKind::Circle: {
      const auto rule = periodic_trapezoid(resolution, 0.0, kTwoPi);
      for (std::size_t i = 0; i < resolution; ++i) {
        q.points.emplace_back(Angle(rule.nodes[i]));
        q.weights.push_back(rule.weights[i]);
      }
      break;
    }
    case ManifoldKind::Torus: {
      const auto rule = periodic_trapezoid(resolution, 0.0, kTwoPi);
      for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
          q.points.emplace_back(
              TorusPoint{Angle(rule.nodes[i]), Angle(rule.nodes[j])});
          q.weights.push_back(rule.weights[i] * rule.weights[j]);
        }
      }
      break;
    }
    case ManifoldKind::Sphere: {
      const auto polar = gauss_legendre(resolution, -1.0, 1.0);
      const auto azimuth = periodic_trapezoid(2 * resolution, 0.0, kTwoPi);
      const auto& z = pole.coords();
      std::array<double, 3> e{0.0, 0.0, 0.0};
      e[std::abs(z[0]) < 0.9 ? 0 : 1] = 1.0;
      const double c = e[0] * z[0] + e[1] * z[1] + e[2] * z[2];
      std::array<double, 3> e1{e[0] - c * z[0], e[1] - c * z[1], e[2] - c * z[2]};
      const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      for (auto& v : e1) v /= n1;
      const std::array<double, 3> e2{z[1] * e1[2] - z[2] * e1[1],
                                     z[2] * e1[0] - z[0] * e1[2],
                                     z[0] * e1[1] - z[1] * e1[0]};
      for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
        const double u = polar.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (std::size_t j = 0; j < azimuth.nodes.size(); ++j) {
          const double cp = std::cos(azimuth.nodes[j]);
          const double sp = std::sin(azimuth.nodes[j]);
          q.points.emplace_back(UnitVector3(u * z[0] + s * (cp * e1[0] + sp * e2[0]),
                                            u * z[1] + s * (cp * e1[1] + sp * e2[1]),
                                            u * z[2] + s * (cp * e1[2] + sp * e2[2])));
          q.weights.push_back(polar.weights[i] * azimuth.weights[j]);
        }
      }
      break;
    }
  }
  return q;
}

}  // namespace hkreg
