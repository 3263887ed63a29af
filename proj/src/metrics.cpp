#include "hkreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hkreg/error.hpp"
#include "hkreg/heat_kernel.hpp"
#include "hkreg/quadrature.hpp"

namespace hkreg {

Curve as_curve(const Manifold& m, const PiecewiseGeodesicPath& f) {
  return [m, f](double t) { return pgf_eval(m, f, t); };
}

void QuadratureGrid::validate() const {
  if (nodes < 32) {
    throw Error(ErrorCode::InvalidArgument, "quadrature grid needs >= 32 nodes");
  }
}

double dq_distance(const Manifold& m, const Curve& f, const Curve& g, double q,
                   const PredictorDensity& p, QuadratureGrid grid) {
  if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "d_q needs q >= 1");
  grid.validate();
  const auto rule = trapezoid(grid.nodes, 0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double w = p.weight(t);
    if (w == 0.0) continue;
    const double d = geodesic_distance(m, f(t), g(t));
    total += rule.weights[i] * w * std::pow(d, q);
  }
  return std::pow(total, 1.0 / q);
}

double dinf_distance(const Manifold& m, const Curve& f, const Curve& g,
                     QuadratureGrid grid, std::span<const double> extra_times) {
  grid.validate();
  const auto rule = trapezoid(grid.nodes, 0.0, 1.0);
  double worst = 0.0;
  for (double t : rule.nodes) {
    worst = std::max(worst, geodesic_distance(m, f(t), g(t)));
  }
  for (double t : extra_times) {
    worst = std::max(worst, geodesic_distance(m, f(t), g(t)));
  }
  return worst;
}

double dinf_distance(const Manifold& m, const PiecewiseGeodesicPath& f,
                     const PiecewiseGeodesicPath& g, QuadratureGrid grid) {
  std::vector<double> knots;
  for (std::size_t k = 0; k <= f.intervals(); ++k) knots.push_back(f.knot_time(k));
  for (std::size_t k = 0; k <= g.intervals(); ++k) knots.push_back(g.knot_time(k));
  return dinf_distance(m, as_curve(m, f), as_curve(m, g), grid, knots);
}

double density_distance(const Manifold& m, const Curve& f, const Curve& g,
                        double q, double sigma2, const PredictorDensity& p,
                        DensityGrids grids) {
  if (!(q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "d_q needs q >= 1");
  grids.time.validate();
  const auto times = trapezoid(grids.time.nodes, 0.0, 1.0);
  const auto space = manifold_quadrature(m, grids.space_resolution);
  double total = 0.0;
  for (std::size_t i = 0; i < times.nodes.size(); ++i) {
    const double t = times.nodes[i];
    const double w = p.weight(t);
    if (w == 0.0) continue;
    const auto a = f(t);
    const auto b = g(t);
    double inner = 0.0;
    for (std::size_t j = 0; j < space.points.size(); ++j) {
      const double diff = heat_kernel(m, sigma2, a, space.points[j]) -
                          heat_kernel(m, sigma2, b, space.points[j]);
      inner += space.weights[j] * std::pow(std::abs(diff), q);
    }
    total += times.weights[i] * std::pow(w, q) * inner;
  }
  return 0.5 * std::pow(total, 1.0 / q);
}

double kernel_lipschitz_estimate(const Manifold& m, double sigma2) {
  if (m.kind() == ManifoldKind::Sphere) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel Lipschitz estimate is implemented for flat manifolds");
  }
  const auto& cfg = m.config();
  constexpr int kOffsets = 8192;
  constexpr double kStep = 1e-6;
  double slope = 0.0;
  double peak = 0.0;
  for (int i = 0; i <= kOffsets; ++i) {
    const double delta = kPi * static_cast<double>(i) / kOffsets;
    const double here = circle_kernel::density(sigma2, delta, cfg);
    const double next = circle_kernel::density(sigma2, delta + kStep, cfg);
    slope = std::max(slope, std::abs(next - here) / kStep);
    peak = std::max(peak, here);
  }
  if (m.kind() == ManifoldKind::Circle) return slope;
  // Torus: |grad_x (p1 p2)| <= sqrt(|p1'|^2 p2^2 + p1^2 |p2'|^2).
  return std::sqrt(2.0) * slope * peak;
}

double density_sandwich_constant(const Manifold& m, double sigma2,
                                 const PredictorDensity& p) {
  double p_max = 0.0;
  for (int i = 0; i <= 4096; ++i) p_max = std::max(p_max, p.density(i / 4096.0));
  return kernel_lipschitz_estimate(m, sigma2) * m.volume() * p_max;
}

Dataset generate_dataset(const Manifold& m, const Curve& f0, std::size_t n,
                         double sigma2, const PredictorDensity& p, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  Dataset data{m.kind(), {}};
  data.observations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = p.sample(rng);
    data.observations.push_back({t, sample_heat_kernel(m, sigma2, f0(t), rng)});
  }
  return data;
}

double l1_error(const Manifold& m, const Curve& fit, const Curve& f0,
                QuadratureGrid grid) {
  return dq_distance(m, fit, f0, 1.0, PredictorDensity::uniform(), grid);
}

RateSidelength theorem_rate_sidelength(std::size_t n, double epsilon) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "rate rule needs n >= 2");
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1/4)");
  }
  const double raw = std::pow(static_cast<double>(n), 0.5 - 2.0 * epsilon);
  const auto K = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(raw)));
  return {K, 1.0 / static_cast<double>(K)};
}

Curve benchmark_truth(const Manifold& m) {
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return [](double t) -> ManifoldPoint { return Angle((t + 0.5) * (t + 0.5)); };
    case ManifoldKind::Sphere:
      return [](double t) -> ManifoldPoint {
        const double a = (t + 0.5) * (t + 0.5);
        return UnitVector3(std::cos(a), std::sin(a), 0.0);
      };
    case ManifoldKind::Torus:
      return [](double t) -> ManifoldPoint {
        const double a = (t + 0.5) * (t + 0.5);
        return TorusPoint{Angle(a), Angle(2.5 - a)};
      };
  }
  return {};
}

}  // namespace hkreg
