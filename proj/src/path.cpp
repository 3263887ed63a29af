#include "hkreg/path.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "hkreg/error.hpp"
#include "hkreg/heat_kernel.hpp"

namespace hkreg {

PiecewiseGeodesicPath::PiecewiseGeodesicPath(ManifoldKind kind,
                                             std::vector<ManifoldPoint> knots)
    : kind_(kind), knots_(std::move(knots)) {
  if (knots_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "a piecewise geodesic path needs at least two knots");
  }
  const auto m = Manifold::of_kind(kind_);
  for (const auto& p : knots_) m.require(p);
}

PiecewiseGeodesicPath PiecewiseGeodesicPath::constant(
    ManifoldKind kind, std::size_t intervals, const ManifoldPoint& value) {
  if (intervals == 0) {
    throw Error(ErrorCode::InvalidArgument, "K must be positive");
  }
  return {kind, std::vector<ManifoldPoint>(intervals + 1, value)};
}

void PiecewiseGeodesicPath::set_knot(std::size_t k, const ManifoldPoint& value) {
  Manifold::of_kind(kind_).require(value);
  knots_.at(k) = value;
}

std::size_t interval_index(std::size_t intervals, double t) {
  const double scaled = t * static_cast<double>(intervals);
  const auto k = static_cast<std::size_t>(std::floor(scaled));
  return k >= intervals ? intervals - 1 : k;
}

void PriorSpec::validate() const {
  if (intervals == 0) {
    throw Error(ErrorCode::InvalidArgument, "prior needs K >= 1");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidArgument, "prior scale c must be positive");
  }
}

ManifoldPoint pgf_eval(const Manifold& m, const PiecewiseGeodesicPath& f,
                       double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::OutOfDomain,
                "path argument must lie in [0, 1], got " + std::to_string(t));
  }
  const std::size_t K = f.intervals();
  const double scaled = t * static_cast<double>(K);
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) < 1e-12) {
    return f.knot(static_cast<std::size_t>(nearest));
  }
  const std::size_t k = interval_index(K, t);
  const double s = std::clamp(scaled - static_cast<double>(k), 0.0, 1.0);
  return geodesic_interpolate(m, f.knot(k), f.knot(k + 1), s);
}

double log_prior_increment(const PiecewiseGeodesicPath& f, std::size_t k,
                           const PriorSpec& spec, const Manifold& m) {
  return log_heat_kernel(m, spec.step_time(), f.knot(k - 1), f.knot(k));
}

double log_prior(const PiecewiseGeodesicPath& f, const PriorSpec& spec,
                 const Manifold& m) {
  spec.validate();
  if (f.intervals() != spec.intervals) {
    throw Error(ErrorCode::SidelengthMismatch,
                "path has K = " + std::to_string(f.intervals()) +
                    " but the prior expects K = " +
                    std::to_string(spec.intervals));
  }
  double total = -std::log(m.volume());
  for (std::size_t k = 1; k <= f.intervals(); ++k) {
    total += log_prior_increment(f, k, spec, m);
  }
  return total;
}

PiecewiseGeodesicPath sample_prior_path(const PriorSpec& spec,
                                        const Manifold& m, Rng& rng) {
  spec.validate();
  std::vector<ManifoldPoint> knots;
  knots.reserve(spec.intervals + 1);
  knots.push_back(sample_uniform(m, rng));
  for (std::size_t k = 1; k <= spec.intervals; ++k) {
    knots.push_back(sample_heat_kernel(m, spec.step_time(), knots.back(), rng));
  }
  return {m.kind(), std::move(knots)};
}

double knot_total_variation(const Manifold& m, const PiecewiseGeodesicPath& f) {
  double tv = 0.0;
  for (std::size_t k = 1; k <= f.intervals(); ++k) {
    tv += geodesic_distance(m, f.knot(k - 1), f.knot(k));
  }
  return tv;
}

nlohmann::json path_to_json(const Manifold& m, const PiecewiseGeodesicPath& f) {
  nlohmann::json knots = nlohmann::json::array();
  for (const auto& p : f.knots()) {
    const auto c = m.coordinates(p);
    if (c.size() == 1) {
      knots.push_back(c[0]);
    } else {
      knots.push_back(c);
    }
  }
  return {{"manifold", m.name()}, {"K", f.intervals()}, {"knots", knots}};
}

PiecewiseGeodesicPath path_from_json(const nlohmann::json& j) {
  try {
    const auto m = Manifold::of_kind(
        parse_manifold_kind(j.at("manifold").get<std::string>()));
    const auto K = j.at("K").get<std::size_t>();
    const auto& arr = j.at("knots");
    if (arr.size() != K + 1) {
      throw Error(ErrorCode::Parse, "knot count does not match K + 1");
    }
    std::vector<ManifoldPoint> knots;
    knots.reserve(arr.size());
    for (const auto& item : arr) {
      if (item.is_number()) {
        knots.push_back(m.from_coordinates({item.get<double>()}));
      } else {
        knots.push_back(m.from_coordinates(item.get<std::vector<double>>()));
      }
    }
    return {m.kind(), std::move(knots)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad path JSON: ") + e.what());
  }
}

}  // namespace hkreg
