#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hkreg/manifold.hpp"
#include "hkreg/path.hpp"
#include "hkreg/posterior.hpp"
#include "hkreg/random.hpp"

namespace hkreg {

/// Grid used for the continuous-BM estimator.
inline constexpr std::size_t kFineIntervals = 200;

/// Half-width of the predictor window used by init_state.
inline constexpr double kInitWindow = 0.05;

struct AnnealConfig {
  double initial_temperature = 1.0;
  double cooling_factor = 0.95;
  int steps_per_temperature = 200;
  double temperature_floor = 1e-3;
  // Heat-kernel time of a knot proposal at the initial temperature; it
  // shrinks in proportion to the temperature.
  double proposal_time = 0.05;

  void validate() const;
};

struct McmcConfig {
  int iterations = 20000;
  int burn_in = 5000;
  int thinning = 10;
  double proposal_time = 0.05;

  void validate() const;
};

struct TracePoint {
  long iteration = 0;
  double log_posterior = 0.0;
};

struct FitResult {
  PiecewiseGeodesicPath path;
  double best_log_posterior = 0.0;
  std::vector<TracePoint> trace;
  double acceptance_rate = 0.0;
};

struct McmcRun {
  std::vector<PiecewiseGeodesicPath> samples;
  double acceptance_rate = 0.0;
};

/// Window-mode initializer: knot k is the observed value in
/// {i : |t_i - k/K| <= 0.05} with the largest kernel-density score
/// sum_l p_0.05(x_j, x_l) over that window. Empty windows copy the nearest
/// nonempty window (ties toward the smaller index); if every window is empty
/// all knots take the mode of the whole dataset.
PiecewiseGeodesicPath init_state(const Dataset& data, std::size_t intervals,
                                 const Manifold& m);

/// Simulated-annealing MAP estimate over the knots of a PGF(1/K) path.
FitResult anneal_map(const Dataset& data, const SigmaMode& sigma,
                     const PriorSpec& spec, const AnnealConfig& cfg,
                     const Manifold& m, Rng& rng);

/// Continuous-BM MAP, approximated on the fine grid K = kFineIntervals.
FitResult fit_cbm(const Dataset& data, const SigmaMode& sigma, double scale,
                  const AnnealConfig& cfg, const Manifold& m, Rng& rng);

enum class McmcTarget { Posterior, PriorOnly };

/// Random-scan Metropolis over knots with heat-kernel proposals. The
/// posterior target starts at init_state; the prior-only target starts at a
/// prior draw and ignores the data.
McmcRun mh_sample(const Dataset& data, const SigmaMode& sigma,
                  const PriorSpec& spec, const McmcConfig& cfg,
                  const Manifold& m, Rng& rng,
                  McmcTarget target = McmcTarget::Posterior);

/// Density of the single-knot proposal from `from` to `to`.
double knot_proposal_density(const Manifold& m, double time,
                             const ManifoldPoint& from, const ManifoldPoint& to);

/// {path, best_log_posterior, acceptance_rate, trace_subsampled}; the trace
/// is thinned to at most `max_trace` entries and always keeps the best one.
nlohmann::json fit_to_json(const Manifold& m, const FitResult& fit,
                           std::size_t max_trace = 256);

}  // namespace hkreg
