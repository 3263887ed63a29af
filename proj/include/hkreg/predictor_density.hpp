#pragma once

#include <vector>

#include "hkreg/random.hpp"

namespace hkreg {

/// Density of the predictor t on [0, 1]: uniform or piecewise linear through
/// tabulated (t, value) nodes. Tabulated values are rescaled to integrate to
/// one. An optional threshold r restricts integration weights to
/// {t : p(t) >= r}.
class PredictorDensity {
 public:
  static PredictorDensity uniform();
  /// Nodes must start at 0, end at 1, increase strictly; values >= 0.
  static PredictorDensity tabulated(std::vector<double> nodes,
                                    std::vector<double> values);

  PredictorDensity with_restriction(double r) const;

  bool is_uniform() const noexcept { return nodes_.empty(); }
  double restriction() const noexcept { return restriction_; }

  double density(double t) const;
  /// density(t) if it reaches the restriction threshold, else 0.
  double weight(double t) const;
  double cdf(double t) const;
  double quantile(double u) const;
  double sample(Rng& rng) const;

 private:
  PredictorDensity() = default;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
  double restriction_ = 0.0;
};

}  // namespace hkreg
