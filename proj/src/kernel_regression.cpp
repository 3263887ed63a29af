#include "hkreg/kernel_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hkreg/error.hpp"

namespace hkreg {

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double bandwidth_rule(std::span<const double> ts) {
  if (ts.size() < 2) {
    throw Error(ErrorCode::DegeneratePredictors,
                "bandwidth rule needs at least two predictors");
  }
  const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
  if (*lo == *hi) {
    throw Error(ErrorCode::DegeneratePredictors, "all predictors are equal");
  }
  const std::vector<double> values(ts.begin(), ts.end());
  const double center = median(values);
  std::vector<double> deviations(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    deviations[i] = std::abs(values[i] - center);
  }
  double scale = 1.4826 * median(deviations);
  if (!(scale > 0.0)) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    scale = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  const double n = static_cast<double>(values.size());
  return scale * std::pow(4.0 / (3.0 * n), 0.2);
}

double frechet_objective(const Manifold& m, const ManifoldPoint& y,
                         std::span<const ManifoldPoint> points,
                         std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = geodesic_distance(m, y, points[i]);
    total += weights[i] * d * d;
  }
  return total;
}

ManifoldPoint frechet_mean_weighted(const Manifold& m,
                                    std::span<const ManifoldPoint> points,
                                    std::span<const double> weights,
                                    FrechetOptions options) {
  if (points.empty() || points.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "Frechet mean needs matching, nonempty points and weights");
  }
  double total = 0.0;
  std::size_t heaviest = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "Frechet weights must be finite and >= 0");
    }
    total += weights[i];
    if (weights[i] > weights[heaviest]) heaviest = i;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "Frechet mean needs a positive weight");
  }
  ManifoldPoint estimate = points[heaviest];
  for (int it = 0; it < options.max_iterations; ++it) {
    Tangent step{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const Tangent v = log_map(m, estimate, points[i]);
      for (int c = 0; c < 3; ++c) step[c] += weights[i] * v[c];
    }
    for (auto& c : step) c /= total;
    const double length =
        std::sqrt(step[0] * step[0] + step[1] * step[1] + step[2] * step[2]);
    estimate = exp_map(m, estimate, step);
    if (length <= options.tolerance) return estimate;
  }
  throw Error(ErrorCode::NoConvergence,
              "Frechet mean did not converge; the weighted points may be "
              "spread too evenly for a unique mean");
}

ManifoldPoint kernel_regress(const Dataset& data, double t, double bandwidth,
                             const Manifold& m) {
  if (data.empty()) {
    throw Error(ErrorCode::EmptyDataset, "kernel regression needs observations");
  }
  if (!(bandwidth > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  }
  // Exponents are shifted by the smallest squared offset; the weights are
  // only defined up to scale and this keeps at least one of them at 1.
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& obs : data.observations) {
    nearest = std::min(nearest, (t - obs.t) * (t - obs.t));
  }
  std::vector<ManifoldPoint> points;
  std::vector<double> weights;
  points.reserve(data.size());
  weights.reserve(data.size());
  for (const auto& obs : data.observations) {
    const double d2 = (t - obs.t) * (t - obs.t) - nearest;
    points.push_back(obs.x);
    weights.push_back(std::exp(-d2 / (2.0 * bandwidth * bandwidth)));
  }
  return frechet_mean_weighted(m, points, weights);
}

KernelFit::KernelFit(Manifold m, Dataset data, double bandwidth)
    : manifold_(m), data_(std::move(data)), bandwidth_(bandwidth) {
  if (data_.empty()) {
    throw Error(ErrorCode::EmptyDataset, "kernel regression needs observations");
  }
  if (!(bandwidth_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  }
}

KernelFit KernelFit::with_rule_bandwidth(Manifold m, Dataset data) {
  std::vector<double> ts;
  ts.reserve(data.size());
  for (const auto& obs : data.observations) ts.push_back(obs.t);
  const double h = bandwidth_rule(ts);
  return {m, std::move(data), h};
}

ManifoldPoint KernelFit::operator()(double t) const {
  return kernel_regress(data_, t, bandwidth_, manifold_);
}

}  // namespace hkreg
