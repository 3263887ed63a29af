#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "hkreg/manifold.hpp"
#include "hkreg/path.hpp"
#include "hkreg/predictor_density.hpp"

namespace hkreg {

struct Observation {
  double t = 0.0;
  ManifoldPoint x;
};

struct Dataset {
  ManifoldKind kind = ManifoldKind::Circle;
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  bool empty() const noexcept { return observations.empty(); }
  /// Checks t in [0, 1] and that every point lives on `kind`.
  void validate() const;
};

struct KnownVariance {
  double sigma2 = 0.1;
};

/// sigma^2 marginalized under a uniform prior on [1/A, A], integrated with
/// an n-node Gauss-Legendre rule.
struct MarginalVariance {
  double A = 2.0;
  int nodes = 16;
};

using SigmaMode = std::variant<KnownVariance, MarginalVariance>;

void validate(const SigmaMode& sigma);

/// log of the noise density of x around fx (the p(t) factor is omitted).
double log_observation_density(const Manifold& m, const SigmaMode& sigma,
                               const ManifoldPoint& fx, const ManifoldPoint& x);

double log_likelihood(const PiecewiseGeodesicPath& f, const Dataset& data,
                      const SigmaMode& sigma, const Manifold& m);

double log_posterior(const PiecewiseGeodesicPath& f, const Dataset& data,
                     const SigmaMode& sigma, const PriorSpec& spec,
                     const Manifold& m);

/// p(t) where p(t) >= r, zero elsewhere.
double restricted_weight(double t, const PredictorDensity& p, double r);

/// Log-posterior of a path under single-knot edits. Keeps one cached term per
/// prior increment and per observation; changing knot k recomputes only the
/// terms that touch the two pieces adjacent to it. value() sums the cached
/// terms in the same order as log_posterior, so the two agree bit for bit.
class PathPosterior {
 public:
  /// With `include_likelihood` false the target is the prior alone and the
  /// dataset may be empty.
  PathPosterior(Manifold m, Dataset data, SigmaMode sigma, PriorSpec spec,
                PiecewiseGeodesicPath initial, bool include_likelihood = true);

  double value() const noexcept { return value_; }
  const PiecewiseGeodesicPath& path() const noexcept { return path_; }
  const Manifold& manifold() const noexcept { return manifold_; }
  const PriorSpec& prior() const noexcept { return spec_; }

  /// Change in value() if knot k were replaced by `candidate`. The candidate
  /// stays pending until accept() or the next propose().
  double propose(std::size_t k, const ManifoldPoint& candidate);
  void accept();

 private:
  void recompute_total();

  Manifold manifold_;
  Dataset data_;
  SigmaMode sigma_;
  PriorSpec spec_;
  PiecewiseGeodesicPath path_;
  bool include_likelihood_;

  std::vector<double> prior_terms_;  // index k: increment into knot k
  std::vector<double> obs_terms_;
  std::vector<std::vector<std::size_t>> obs_by_piece_;
  double value_ = 0.0;

  struct Pending {
    std::size_t knot = 0;
    ManifoldPoint candidate;
    std::vector<std::pair<std::size_t, double>> prior;
    std::vector<std::pair<std::size_t, double>> obs;
    bool active = false;
  } pending_;
};

}  // namespace hkreg
