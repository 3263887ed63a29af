#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hkreg/manifold.hpp"
#include "hkreg/path.hpp"
#include "hkreg/posterior.hpp"
#include "hkreg/predictor_density.hpp"
#include "hkreg/random.hpp"

namespace hkreg {

/// A manifold-valued function on [0, 1].
using Curve = std::function<ManifoldPoint(double)>;

Curve as_curve(const Manifold& m, const PiecewiseGeodesicPath& f);

/// Trapezoid grid on [0, 1].
struct QuadratureGrid {
  std::size_t nodes = 512;

  void validate() const;
};

/// (int d(f(t), g(t))^q w(t) dt)^(1/q) with w the (restricted) predictor
/// density, by the trapezoid rule on `grid`.
double dq_distance(const Manifold& m, const Curve& f, const Curve& g, double q,
                   const PredictorDensity& p, QuadratureGrid grid = {});

/// max_t d(f(t), g(t)) over the grid nodes and any `extra_times`.
double dinf_distance(const Manifold& m, const Curve& f, const Curve& g,
                     QuadratureGrid grid = {},
                     std::span<const double> extra_times = {});

/// Path overload: also evaluates at the knot times of both paths.
double dinf_distance(const Manifold& m, const PiecewiseGeodesicPath& f,
                     const PiecewiseGeodesicPath& g, QuadratureGrid grid = {});

struct DensityGrids {
  QuadratureGrid time{};
  std::size_t space_resolution = 256;
};

/// Half the L_q distance between the joint densities p(t) p_s(f(t), y) and
/// p(t) p_s(g(t), y) of (t, y), with s = sigma2:
/// 0.5 (int int |p_s(f(t), y) - p_s(g(t), y)|^q p(t)^q dmu(y) dt)^(1/q).
double density_distance(const Manifold& m, const Curve& f, const Curve& g,
                        double q, double sigma2, const PredictorDensity& p,
                        DensityGrids grids = {});

/// Lipschitz constant of x -> p_s(x, y), uniform in y, estimated as the
/// largest difference quotient over a fine grid of offsets. Circle and torus
/// only (the torus bound is the circle bound times the circle's peak value,
/// times sqrt 2).
double kernel_lipschitz_estimate(const Manifold& m, double sigma2);

/// Upper-sandwich constant C with density_distance(q = 1) <= C d_inf:
/// Lipschitz estimate times vol(M), times max p(t).
double density_sandwich_constant(const Manifold& m, double sigma2,
                                 const PredictorDensity& p);

/// t_i ~ p by inverse CDF, x_i ~ p_{sigma2}(f0(t_i), .).
Dataset generate_dataset(const Manifold& m, const Curve& f0, std::size_t n,
                         double sigma2, const PredictorDensity& p, Rng& rng);

/// d_1 with a uniform predictor density.
double l1_error(const Manifold& m, const Curve& fit, const Curve& f0,
                QuadratureGrid grid = {});

struct RateSidelength {
  std::size_t intervals;
  double sidelength;
};

/// K = round(n^(1/2 - 2 eps)), at least 1; h = 1/K.
RateSidelength theorem_rate_sidelength(std::size_t n, double epsilon);

/// Benchmark regression function: the angle a(t) = (t + 0.5)^2 on the circle,
/// the equator point at longitude a(t) on the sphere, and (a(t), 2.5 - a(t))
/// on the torus.
Curve benchmark_truth(const Manifold& m);

}  // namespace hkreg
