#include "hkreg/predictor_density.hpp"

#include <algorithm>
#include <cmath>

#include "hkreg/error.hpp"

namespace hkreg {

PredictorDensity PredictorDensity::uniform() { return PredictorDensity(); }

PredictorDensity PredictorDensity::tabulated(std::vector<double> nodes,
                                             std::vector<double> values) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "tabulated density needs matching node/value lists (>= 2)");
  }
  if (nodes.front() != 0.0 || nodes.back() != 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "tabulated density nodes must span [0, 1]");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "tabulated density nodes must increase");
    }
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument,
                  "tabulated density values must be finite and >= 0");
    }
  }
  PredictorDensity p;
  p.nodes_ = std::move(nodes);
  p.values_ = std::move(values);
  p.cumulative_.assign(p.nodes_.size(), 0.0);
  for (std::size_t i = 1; i < p.nodes_.size(); ++i) {
    p.cumulative_[i] = p.cumulative_[i - 1] +
                       0.5 * (p.values_[i] + p.values_[i - 1]) *
                           (p.nodes_[i] - p.nodes_[i - 1]);
  }
  const double total = p.cumulative_.back();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tabulated density has zero mass");
  }
  for (auto& v : p.values_) v /= total;
  for (auto& c : p.cumulative_) c /= total;
  return p;
}

PredictorDensity PredictorDensity::with_restriction(double r) const {
  if (!(r >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "restriction must be >= 0");
  }
  PredictorDensity p = *this;
  p.restriction_ = r;
  return p;
}

double PredictorDensity::density(double t) const {
  if (t < 0.0 || t > 1.0) return 0.0;
  if (is_uniform()) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.end()) return values_.back();
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  const double w = (t - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
  return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double PredictorDensity::weight(double t) const {
  const double p = density(t);
  return p >= restriction_ ? p : 0.0;
}

double PredictorDensity::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (is_uniform()) return t;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  const double dt = t - nodes_[i - 1];
  return cumulative_[i - 1] + 0.5 * (values_[i - 1] + density(t)) * dt;
}

double PredictorDensity::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (is_uniform()) return u;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return 1.0;
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  // Within [nodes[i-1], nodes[i]] the cdf is quadratic in dt:
  // c0 + a dt + 0.5 slope dt^2 = u.
  const double a = values_[i - 1];
  const double width = nodes_[i] - nodes_[i - 1];
  const double slope = (values_[i] - a) / width;
  const double target = u - cumulative_[i - 1];
  double dt;
  if (target <= 0.0) {
    dt = 0.0;
  } else if (std::abs(slope) < 1e-14) {
    dt = a > 0.0 ? target / a : 0.0;
  } else {
    const double disc = std::max(0.0, a * a + 2.0 * slope * target);
    dt = 2.0 * target / (a + std::sqrt(disc));
  }
  return std::clamp(nodes_[i - 1] + dt, nodes_[i - 1], nodes_[i]);
}

double PredictorDensity::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return quantile(unit(rng));
}

}  // namespace hkreg
