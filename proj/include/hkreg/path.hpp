#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hkreg/manifold.hpp"
#include "hkreg/random.hpp"

namespace hkreg {

/// Piecewise geodesic function on [0, 1] with K equal pieces: the knots are
/// the values at times k/K, k = 0..K, and each piece is the minimizing
/// geodesic between consecutive knots.
class PiecewiseGeodesicPath {
 public:
  PiecewiseGeodesicPath(ManifoldKind kind, std::vector<ManifoldPoint> knots);
  static PiecewiseGeodesicPath constant(ManifoldKind kind, std::size_t intervals,
                                        const ManifoldPoint& value);

  ManifoldKind kind() const noexcept { return kind_; }
  std::size_t intervals() const noexcept { return knots_.size() - 1; }
  double sidelength() const noexcept {
    return 1.0 / static_cast<double>(intervals());
  }
  double knot_time(std::size_t k) const noexcept {
    return static_cast<double>(k) / static_cast<double>(intervals());
  }
  const std::vector<ManifoldPoint>& knots() const noexcept { return knots_; }
  const ManifoldPoint& knot(std::size_t k) const { return knots_.at(k); }
  void set_knot(std::size_t k, const ManifoldPoint& value);

 private:
  ManifoldKind kind_;
  std::vector<ManifoldPoint> knots_;
};

/// Index of the piece containing t; the last piece is closed at t = 1.
std::size_t interval_index(std::size_t intervals, double t);

/// Discretized Brownian-motion prior: uniform initial knot, heat-kernel
/// increments of time scale / intervals.
struct PriorSpec {
  std::size_t intervals = 40;
  double scale = 1.0;

  double sidelength() const noexcept {
    return 1.0 / static_cast<double>(intervals);
  }
  double step_time() const noexcept { return scale * sidelength(); }
  void validate() const;
};

ManifoldPoint pgf_eval(const Manifold& m, const PiecewiseGeodesicPath& f,
                       double t);

/// log pi_h(f) = -log vol(M) + sum_k log p_{c h}(f((k-1)h), f(kh)).
double log_prior(const PiecewiseGeodesicPath& f, const PriorSpec& spec,
                 const Manifold& m);

/// One term of log_prior: the increment into knot k (k >= 1).
double log_prior_increment(const PiecewiseGeodesicPath& f, std::size_t k,
                           const PriorSpec& spec, const Manifold& m);

PiecewiseGeodesicPath sample_prior_path(const PriorSpec& spec,
                                        const Manifold& m, Rng& rng);

/// Sum of geodesic lengths between consecutive knots.
double knot_total_variation(const Manifold& m, const PiecewiseGeodesicPath& f);

// {"manifold": "circle", "K": 2, "knots": [...]}, knots in intrinsic
// coordinates (a number on the circle, an array otherwise).
nlohmann::json path_to_json(const Manifold& m, const PiecewiseGeodesicPath& f);
PiecewiseGeodesicPath path_from_json(const nlohmann::json& j);

}  // namespace hkreg
