#include "hkreg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hkreg/error.hpp"
#include "hkreg/heat_kernel.hpp"

namespace hkreg {

void AnnealConfig::validate() const {
  if (!(initial_temperature > 0.0) || !(temperature_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperatures must be positive");
  }
  if (temperature_floor > initial_temperature) {
    throw Error(ErrorCode::InvalidArgument,
                "temperature floor exceeds the initial temperature");
  }
  if (!(cooling_factor > 0.0 && cooling_factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "cooling factor must be in (0, 1)");
  }
  if (steps_per_temperature < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "steps per temperature must be >= 0");
  }
  if (!(proposal_time > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "proposal time must be positive");
  }
}

void McmcConfig::validate() const {
  if (iterations <= 0 || burn_in < 0 || thinning <= 0) {
    throw Error(ErrorCode::InvalidArgument,
                "MCMC iterations and thinning must be positive");
  }
  if (burn_in >= iterations) {
    throw Error(ErrorCode::InvalidArgument,
                "burn-in must be shorter than the chain");
  }
  if (!(proposal_time > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "proposal time must be positive");
  }
}

namespace {

// Candidate-restricted mode: the member of `members` with the largest
// kernel-density score against the other members.
std::size_t window_mode(const Dataset& data,
                        const std::vector<std::size_t>& members,
                        const Manifold& m) {
  std::size_t best = members.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j : members) {
    double score = 0.0;
    for (std::size_t l : members) {
      score += heat_kernel(m, kInitWindow, data.observations[j].x,
                           data.observations[l].x);
    }
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

}  // namespace

PiecewiseGeodesicPath init_state(const Dataset& data, std::size_t intervals,
                                 const Manifold& m) {
  if (data.empty()) {
    throw Error(ErrorCode::EmptyDataset, "init_state needs observations");
  }
  if (intervals == 0) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  const std::size_t knots = intervals + 1;
  std::vector<std::ptrdiff_t> mode(knots, -1);
  for (std::size_t k = 0; k < knots; ++k) {
    const double tk = static_cast<double>(k) / static_cast<double>(intervals);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (std::abs(data.observations[i].t - tk) <= kInitWindow + 1e-12) {
        members.push_back(i);
      }
    }
    if (!members.empty()) {
      mode[k] = static_cast<std::ptrdiff_t>(window_mode(data, members, m));
    }
  }
  const bool any = std::any_of(mode.begin(), mode.end(),
                               [](std::ptrdiff_t v) { return v >= 0; });
  std::vector<ManifoldPoint> values(knots);
  if (!any) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto& x = data.observations[window_mode(data, all, m)].x;
    std::fill(values.begin(), values.end(), x);
    return {m.kind(), std::move(values)};
  }
  for (std::size_t k = 0; k < knots; ++k) {
    std::ptrdiff_t source = mode[k];
    // Scan outward; checking k - d before k + d breaks ties downward.
    for (std::size_t d = 1; source < 0; ++d) {
      if (d <= k && mode[k - d] >= 0) {
        source = mode[k - d];
      } else if (k + d < knots && mode[k + d] >= 0) {
        source = mode[k + d];
      }
    }
    values[k] = data.observations[static_cast<std::size_t>(source)].x;
  }
  return {m.kind(), std::move(values)};
}

FitResult anneal_map(const Dataset& data, const SigmaMode& sigma,
                     const PriorSpec& spec, const AnnealConfig& cfg,
                     const Manifold& m, Rng& rng) {
  cfg.validate();
  spec.validate();
  PathPosterior posterior(m, data, sigma, spec,
                          init_state(data, spec.intervals, m));
  FitResult result{posterior.path(), posterior.value(), {}, 0.0};
  result.trace.push_back({0, posterior.value()});

  std::uniform_int_distribution<std::size_t> pick(0, spec.intervals);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long iteration = 0;
  long accepted = 0;
  for (double temperature = cfg.initial_temperature;
       temperature > cfg.temperature_floor;
       temperature *= cfg.cooling_factor) {
    const double step_time =
        cfg.proposal_time * temperature / cfg.initial_temperature;
    for (int s = 0; s < cfg.steps_per_temperature; ++s) {
      ++iteration;
      const std::size_t k = pick(rng);
      const auto candidate =
          sample_heat_kernel(m, step_time, posterior.path().knot(k), rng);
      const double delta = posterior.propose(k, candidate);
      const double u = unit(rng);
      if (delta >= 0.0 || std::log(u) < delta / temperature) {
        posterior.accept();
        ++accepted;
        if (posterior.value() > result.best_log_posterior) {
          result.best_log_posterior = posterior.value();
          result.path = posterior.path();
          result.trace.push_back({iteration, posterior.value()});
        }
      }
    }
    if (cfg.steps_per_temperature > 0) {
      result.trace.push_back({iteration, posterior.value()});
    }
  }
  result.acceptance_rate =
      iteration > 0 ? static_cast<double>(accepted) / iteration : 0.0;
  return result;
}

FitResult fit_cbm(const Dataset& data, const SigmaMode& sigma, double scale,
                  const AnnealConfig& cfg, const Manifold& m, Rng& rng) {
  return anneal_map(data, sigma, PriorSpec{kFineIntervals, scale}, cfg, m, rng);
}

McmcRun mh_sample(const Dataset& data, const SigmaMode& sigma,
                  const PriorSpec& spec, const McmcConfig& cfg,
                  const Manifold& m, Rng& rng, McmcTarget target) {
  cfg.validate();
  spec.validate();
  const bool with_data = target == McmcTarget::Posterior;
  auto initial = with_data ? init_state(data, spec.intervals, m)
                           : sample_prior_path(spec, m, rng);
  PathPosterior posterior(m, with_data ? data : Dataset{m.kind(), {}}, sigma,
                          spec, std::move(initial), with_data);

  McmcRun run;
  run.samples.reserve(
      static_cast<std::size_t>((cfg.iterations - cfg.burn_in) / cfg.thinning));
  std::uniform_int_distribution<std::size_t> pick(0, spec.intervals);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long accepted = 0;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const std::size_t k = pick(rng);
    const auto candidate =
        sample_heat_kernel(m, cfg.proposal_time, posterior.path().knot(k), rng);
    const double delta = posterior.propose(k, candidate);
    if (delta >= 0.0 || std::log(unit(rng)) < delta) {
      posterior.accept();
      ++accepted;
    }
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thinning == 0) {
      run.samples.push_back(posterior.path());
    }
  }
  run.acceptance_rate = static_cast<double>(accepted) / cfg.iterations;
  return run;
}

double knot_proposal_density(const Manifold& m, double time,
                             const ManifoldPoint& from, const ManifoldPoint& to) {
  return heat_kernel(m, time, from, to);
}

nlohmann::json fit_to_json(const Manifold& m, const FitResult& fit,
                           std::size_t max_trace) {
  std::vector<std::size_t> keep;
  const std::size_t n = fit.trace.size();
  if (n <= max_trace || max_trace < 2) {
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
  } else {
    for (std::size_t j = 0; j < max_trace - 1; ++j) {
      keep.push_back(j * (n - 1) / (max_trace - 2 == 0 ? 1 : max_trace - 2));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (fit.trace[i].log_posterior > fit.trace[best].log_posterior) best = i;
    }
    keep.push_back(best);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  }
  nlohmann::json trace = nlohmann::json::array();
  for (std::size_t i : keep) {
    trace.push_back({fit.trace[i].iteration, fit.trace[i].log_posterior});
  }
  return {{"path", path_to_json(m, fit.path)},
          {"best_log_posterior", fit.best_log_posterior},
          {"acceptance_rate", fit.acceptance_rate},
          {"trace_subsampled", trace}};
}

}  // namespace hkreg
