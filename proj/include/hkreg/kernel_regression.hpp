#pragma once

#include <span>
#include <vector>

#include "hkreg/manifold.hpp"
#include "hkreg/posterior.hpp"

namespace hkreg {

/// Rule-of-thumb bandwidth sigma_hat * (4 / (3n))^(1/5) with the robust
/// scale sigma_hat = 1.4826 * MAD. Falls back to the sample standard
/// deviation when the MAD vanishes but the predictors are not all equal.
double bandwidth_rule(std::span<const double> ts);

struct FrechetOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;
};

/// Minimizer of sum_i w_i d(., x_i)^2 by tangent-space averaging: start at
/// the heaviest point, map the points to the tangent space with log, step
/// along the weighted mean tangent with exp. Throws NoConvergence when the
/// step does not settle within the iteration budget.
ManifoldPoint frechet_mean_weighted(const Manifold& m,
                                    std::span<const ManifoldPoint> points,
                                    std::span<const double> weights,
                                    FrechetOptions options = {});

/// sum_i w_i d(y, x_i)^2.
double frechet_objective(const Manifold& m, const ManifoldPoint& y,
                         std::span<const ManifoldPoint> points,
                         std::span<const double> weights);

/// Nadaraya-Watson estimate at t: the Frechet mean of the responses under
/// Gaussian weights exp(-(t - t_i)^2 / (2 h^2)).
ManifoldPoint kernel_regress(const Dataset& data, double t, double bandwidth,
                             const Manifold& m);

class KernelFit {
 public:
  KernelFit(Manifold m, Dataset data, double bandwidth);
  /// Bandwidth from bandwidth_rule on the data's predictors.
  static KernelFit with_rule_bandwidth(Manifold m, Dataset data);

  double bandwidth() const noexcept { return bandwidth_; }
  ManifoldPoint operator()(double t) const;

 private:
  Manifold manifold_;
  Dataset data_;
  double bandwidth_;
};

}  // namespace hkreg
