#include "hkreg/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hkreg/error.hpp"
#include "hkreg/heat_kernel.hpp"
#include "hkreg/quadrature.hpp"

namespace hkreg {

void Dataset::validate() const {
  const auto m = Manifold::of_kind(kind);
  for (const auto& obs : observations) {
    if (!(obs.t >= 0.0 && obs.t <= 1.0)) {
      throw Error(ErrorCode::OutOfDomain,
                  "observation time outside [0, 1]: " + std::to_string(obs.t));
    }
    m.require(obs.x);
  }
}

void validate(const SigmaMode& sigma) {
  if (const auto* known = std::get_if<KnownVariance>(&sigma)) {
    if (!(known->sigma2 > 0.0) || !std::isfinite(known->sigma2)) {
      throw Error(ErrorCode::InvalidArgument, "sigma^2 must be positive");
    }
    return;
  }
  const auto& marginal = std::get<MarginalVariance>(sigma);
  if (!(marginal.A > 1.0) || !std::isfinite(marginal.A)) {
    throw Error(ErrorCode::InvalidArgument, "marginal sigma^2 needs A > 1");
  }
  if (marginal.nodes < 4) {
    throw Error(ErrorCode::InvalidArgument,
                "marginal sigma^2 needs at least 4 quadrature nodes");
  }
}

double log_observation_density(const Manifold& m, const SigmaMode& sigma,
                               const ManifoldPoint& fx, const ManifoldPoint& x) {
  if (const auto* known = std::get_if<KnownVariance>(&sigma)) {
    return log_heat_kernel(m, known->sigma2, fx, x);
  }
  const auto& marginal = std::get<MarginalVariance>(sigma);
  const double lo = 1.0 / marginal.A;
  const double hi = marginal.A;
  thread_local MarginalVariance cached_for{0.0, 0};
  thread_local QuadratureRule rule;
  if (cached_for.A != marginal.A || cached_for.nodes != marginal.nodes) {
    rule = gauss_legendre(static_cast<std::size_t>(marginal.nodes), lo, hi);
    cached_for = marginal;
  }
  std::vector<double> logs(rule.nodes.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    logs[j] = std::log(rule.weights[j]) + log_heat_kernel(m, rule.nodes[j], fx, x);
    peak = std::max(peak, logs[j]);
  }
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - peak);
  return peak + std::log(acc) - std::log(hi - lo);
}

double log_likelihood(const PiecewiseGeodesicPath& f, const Dataset& data,
                      const SigmaMode& sigma, const Manifold& m) {
  if (data.empty()) {
    throw Error(ErrorCode::EmptyDataset, "likelihood needs observations");
  }
  validate(sigma);
  double total = 0.0;
  for (const auto& obs : data.observations) {
    total += log_observation_density(m, sigma, pgf_eval(m, f, obs.t), obs.x);
  }
  return total;
}

double log_posterior(const PiecewiseGeodesicPath& f, const Dataset& data,
                     const SigmaMode& sigma, const PriorSpec& spec,
                     const Manifold& m) {
  if (data.empty()) {
    throw Error(ErrorCode::EmptyDataset, "posterior needs observations");
  }
  return log_prior(f, spec, m) + log_likelihood(f, data, sigma, m);
}

double restricted_weight(double t, const PredictorDensity& p, double r) {
  const double value = p.density(t);
  return value >= r ? value : 0.0;
}

PathPosterior::PathPosterior(Manifold m, Dataset data, SigmaMode sigma,
                             PriorSpec spec, PiecewiseGeodesicPath initial,
                             bool include_likelihood)
    : manifold_(m),
      data_(std::move(data)),
      sigma_(sigma),
      spec_(spec),
      path_(std::move(initial)),
      include_likelihood_(include_likelihood) {
  spec_.validate();
  validate(sigma_);
  if (path_.intervals() != spec_.intervals) {
    throw Error(ErrorCode::SidelengthMismatch,
                "initial path K does not match the prior");
  }
  if (include_likelihood_) {
    if (data_.empty()) {
      throw Error(ErrorCode::EmptyDataset, "posterior needs observations");
    }
    data_.validate();
  }
  const std::size_t K = path_.intervals();
  prior_terms_.assign(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    prior_terms_[k] = log_prior_increment(path_, k, spec_, manifold_);
  }
  obs_by_piece_.assign(K, {});
  if (include_likelihood_) {
    obs_terms_.resize(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto& obs = data_.observations[i];
      obs_by_piece_[interval_index(K, obs.t)].push_back(i);
      obs_terms_[i] = log_observation_density(
          manifold_, sigma_, pgf_eval(manifold_, path_, obs.t), obs.x);
    }
  }
  recompute_total();
}

void PathPosterior::recompute_total() {
  double prior = -std::log(manifold_.volume());
  for (std::size_t k = 1; k < prior_terms_.size(); ++k) prior += prior_terms_[k];
  double lik = 0.0;
  for (double v : obs_terms_) lik += v;
  value_ = include_likelihood_ ? prior + lik : prior;
}

double PathPosterior::propose(std::size_t k, const ManifoldPoint& candidate) {
  const std::size_t K = path_.intervals();
  if (k > K) throw Error(ErrorCode::OutOfDomain, "knot index out of range");
  pending_.knot = k;
  pending_.candidate = candidate;
  pending_.prior.clear();
  pending_.obs.clear();
  pending_.active = true;

  const ManifoldPoint saved = path_.knot(k);
  path_.set_knot(k, candidate);
  double delta = 0.0;
  if (k >= 1) {
    const double v = log_prior_increment(path_, k, spec_, manifold_);
    delta += v - prior_terms_[k];
    pending_.prior.emplace_back(k, v);
  }
  if (k < K) {
    const double v = log_prior_increment(path_, k + 1, spec_, manifold_);
    delta += v - prior_terms_[k + 1];
    pending_.prior.emplace_back(k + 1, v);
  }
  if (include_likelihood_) {
    const std::size_t first = k == 0 ? 0 : k - 1;
    const std::size_t last = std::min(k, K - 1);
    for (std::size_t piece = first; piece <= last; ++piece) {
      for (std::size_t i : obs_by_piece_[piece]) {
        const auto& obs = data_.observations[i];
        const double v = log_observation_density(
            manifold_, sigma_, pgf_eval(manifold_, path_, obs.t), obs.x);
        delta += v - obs_terms_[i];
        pending_.obs.emplace_back(i, v);
      }
    }
  }
  path_.set_knot(k, saved);
  return delta;
}

void PathPosterior::accept() {
  if (!pending_.active) return;
  path_.set_knot(pending_.knot, pending_.candidate);
  for (const auto& [k, v] : pending_.prior) prior_terms_[k] = v;
  for (const auto& [i, v] : pending_.obs) obs_terms_[i] = v;
  pending_.active = false;
  recompute_total();
}

}  // namespace hkreg
