#include "hkreg/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hkreg/error.hpp"

namespace hkreg {

namespace {

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidTime,
                "heat kernel time must be positive, got " + std::to_string(t));
  }
}

}  // namespace

namespace circle_kernel {

double wrapped(double t, double delta, const HeatKernelConfig& config) {
  require_time(t);
  const double d = std::abs(wrap_signed(delta));
  double sum = std::exp(-d * d / (2.0 * t));
  for (int j = 1; j <= config.truncation_order; ++j) {
    const double a = d - kTwoPi * j;
    const double b = d + kTwoPi * j;
    const double pair =
        std::exp(-a * a / (2.0 * t)) + std::exp(-b * b / (2.0 * t));
    sum += pair;
    if (pair <= config.series_tolerance * sum) break;
  }
  return sum / std::sqrt(kTwoPi * t);
}

double log_wrapped(double t, double delta, const HeatKernelConfig& config) {
  require_time(t);
  const double d = std::abs(wrap_signed(delta));
  // Factor out the k = 0 image, which dominates for d in [0, pi].
  double rest = 0.0;
  for (int j = 1; j <= config.truncation_order; ++j) {
    // ((d + 2 pi k)^2 - d^2) / (2t) for k = -j and k = +j.
    const double lo = 4.0 * kPi * j * (kPi * j - d) / (2.0 * t);
    const double hi = 4.0 * kPi * j * (kPi * j + d) / (2.0 * t);
    const double pair = std::exp(-lo) + std::exp(-hi);
    rest += pair;
    if (pair <= config.series_tolerance * (1.0 + rest)) break;
  }
  return -0.5 * std::log(kTwoPi * t) - d * d / (2.0 * t) + std::log1p(rest);
}

double eigen(double t, double delta, const HeatKernelConfig& config) {
  require_time(t);
  const double d = std::abs(wrap_signed(delta));
  double sum = 1.0;
  for (int m = 1; m <= config.truncation_order; ++m) {
    const double decay = std::exp(-0.5 * m * m * t);
    if (decay / kPi < config.series_tolerance) break;
    sum += 2.0 * decay * std::cos(m * d);
  }
  return sum / kTwoPi;
}

double density(double t, double delta, const HeatKernelConfig& config) {
  return t < config.representation_switch_time ? wrapped(t, delta, config)
                                               : eigen(t, delta, config);
}

double log_density(double t, double delta, const HeatKernelConfig& config) {
  return t < config.representation_switch_time
             ? log_wrapped(t, delta, config)
             : std::log(eigen(t, delta, config));
}

}  // namespace circle_kernel

namespace sphere_kernel {

namespace {

struct SeriesValue {
  double value;
  double magnitude;  // sum of |terms|, for the rounding-error bound
  bool converged;
};

SeriesValue evaluate_series(double t, double u, const HeatKernelConfig& config) {
  require_time(t);
  u = std::clamp(u, -1.0, 1.0);
  const double inv4pi = 1.0 / (4.0 * kPi);
  const double r = std::exp(-t);
  double decay = 1.0;  // exp(-l(l+1)t/2)
  double rl = 1.0;     // r^l
  double p_prev = 1.0;  // P_{l-1}
  double p_curr = u;    // P_l
  double value = inv4pi;
  double magnitude = inv4pi;
  bool converged = false;
  for (int l = 1; l <= config.truncation_order; ++l) {
    rl *= r;
    decay *= rl;
    const double coeff = (2.0 * l + 1.0) * inv4pi * decay;
    if (coeff < config.series_tolerance) {
      converged = true;
      break;
    }
    value += coeff * p_curr;
    magnitude += coeff * std::abs(p_curr);
    const double p_next =
        ((2.0 * l + 1.0) * u * p_curr - l * p_prev) / (l + 1.0);
    p_prev = p_curr;
    p_curr = p_next;
  }
  return {value, magnitude, converged};
}

double flat_log_density(double t, double gamma) {
  return -std::log(kTwoPi * t) - gamma * gamma / (2.0 * t);
}

bool resolved(const SeriesValue& s) {
  return s.converged &&
         s.value > 256.0 * std::numeric_limits<double>::epsilon() * s.magnitude;
}

}  // namespace

double series(double t, double cos_gamma, const HeatKernelConfig& config,
              bool* converged) {
  const auto s = evaluate_series(t, cos_gamma, config);
  if (converged != nullptr) *converged = s.converged;
  return s.value;
}

double density(double t, double gamma, const HeatKernelConfig& config) {
  const auto s = evaluate_series(t, std::cos(gamma), config);
  if (resolved(s)) return s.value;
  return std::exp(flat_log_density(t, gamma));
}

double log_density(double t, double gamma, const HeatKernelConfig& config) {
  const auto s = evaluate_series(t, std::cos(gamma), config);
  if (resolved(s)) return std::log(s.value);
  return flat_log_density(t, gamma);
}

}  // namespace sphere_kernel

namespace {

double circle_delta(const Angle& x, const Angle& y) {
  return wrap_signed(y.radians() - x.radians());
}

}  // namespace

double heat_kernel(const Manifold& m, double t, const ManifoldPoint& x,
                   const ManifoldPoint& y) {
  require_time(t);
  m.require(x);
  m.require(y);
  const auto& cfg = m.config();
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return circle_kernel::density(
          t, circle_delta(std::get<Angle>(x), std::get<Angle>(y)), cfg);
    case ManifoldKind::Sphere:
      return sphere_kernel::density(t, geodesic_distance(m, x, y), cfg);
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      return circle_kernel::density(t, circle_delta(a.first, b.first), cfg) *
             circle_kernel::density(t, circle_delta(a.second, b.second), cfg);
    }
  }
  return 0.0;
}

double log_heat_kernel(const Manifold& m, double t, const ManifoldPoint& x,
                       const ManifoldPoint& y) {
  require_time(t);
  m.require(x);
  m.require(y);
  const auto& cfg = m.config();
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return circle_kernel::log_density(
          t, circle_delta(std::get<Angle>(x), std::get<Angle>(y)), cfg);
    case ManifoldKind::Sphere:
      return sphere_kernel::log_density(t, geodesic_distance(m, x, y), cfg);
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      return circle_kernel::log_density(t, circle_delta(a.first, b.first),
                                        cfg) +
             circle_kernel::log_density(t, circle_delta(a.second, b.second),
                                        cfg);
    }
  }
  return 0.0;
}

namespace {

constexpr std::size_t kPolarNodes = 2048;

// Cumulative polar-angle distribution of p_t(north, .) on S^2.
struct PolarTable {
  double t;
  int order;
  double tolerance;
  std::vector<double> theta;
  std::vector<double> cdf;

  double invert(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return theta.front();
    if (it == cdf.end()) return theta.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    const double span = cdf[i] - cdf[i - 1];
    const double w = span > 0.0 ? (u - cdf[i - 1]) / span : 0.0;
    return theta[i - 1] + w * (theta[i] - theta[i - 1]);
  }
};

std::shared_ptr<const PolarTable> build_polar_table(
    double t, const HeatKernelConfig& cfg) {
  auto table = std::make_shared<PolarTable>();
  table->t = t;
  table->order = cfg.truncation_order;
  table->tolerance = cfg.series_tolerance;
  const double theta_max = std::min(kPi, 12.0 * std::sqrt(t));
  table->theta.resize(kPolarNodes);
  table->cdf.resize(kPolarNodes);
  std::vector<double> dens(kPolarNodes);
  for (std::size_t i = 0; i < kPolarNodes; ++i) {
    const double th = theta_max * static_cast<double>(i) / (kPolarNodes - 1);
    table->theta[i] = th;
    dens[i] = sphere_kernel::density(t, th, cfg) * std::sin(th);
  }
  table->cdf[0] = 0.0;
  for (std::size_t i = 1; i < kPolarNodes; ++i) {
    table->cdf[i] = table->cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) *
                                            (table->theta[i] - table->theta[i - 1]);
  }
  const double total = table->cdf.back();
  for (auto& c : table->cdf) c /= total;
  return table;
}

// Tables are memoized per thread; results do not depend on cache state.
const PolarTable& polar_table(double t, const HeatKernelConfig& cfg) {
  thread_local std::vector<std::shared_ptr<const PolarTable>> cache;
  for (const auto& entry : cache) {
    if (entry->t == t && entry->order == cfg.truncation_order &&
        entry->tolerance == cfg.series_tolerance) {
      return *entry;
    }
  }
  if (cache.size() >= 32) cache.erase(cache.begin());
  cache.push_back(build_polar_table(t, cfg));
  return *cache.back();
}

ManifoldPoint rotate_polar(const UnitVector3& center, double theta,
                           double phi) {
  const auto& x = center.coords();
  // Orthonormal frame (e1, e2) completing x.
  std::array<double, 3> e{0.0, 0.0, 0.0};
  e[std::abs(x[0]) < 0.9 ? 0 : 1] = 1.0;
  const double c = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
  std::array<double, 3> e1{e[0] - c * x[0], e[1] - c * x[1], e[2] - c * x[2]};
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& v : e1) v /= n1;
  const std::array<double, 3> e2{x[1] * e1[2] - x[2] * e1[1],
                                 x[2] * e1[0] - x[0] * e1[2],
                                 x[0] * e1[1] - x[1] * e1[0]};
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  return UnitVector3(ct * x[0] + st * (cp * e1[0] + sp * e2[0]),
                     ct * x[1] + st * (cp * e1[1] + sp * e2[1]),
                     ct * x[2] + st * (cp * e1[2] + sp * e2[2]));
}

}  // namespace

ManifoldPoint sample_heat_kernel(const Manifold& m, double t,
                                 const ManifoldPoint& x, Rng& rng) {
  require_time(t);
  m.require(x);
  const double sd = std::sqrt(t);
  switch (m.kind()) {
    case ManifoldKind::Circle: {
      std::normal_distribution<double> normal(0.0, sd);
      return Angle(std::get<Angle>(x).radians() + normal(rng));
    }
    case ManifoldKind::Sphere: {
      const auto& table = polar_table(t, m.config());
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double theta = table.invert(unit(rng));
      const double phi = kTwoPi * unit(rng);
      return rotate_polar(std::get<UnitVector3>(x), theta, phi);
    }
    case ManifoldKind::Torus: {
      std::normal_distribution<double> normal(0.0, sd);
      const auto& p = std::get<TorusPoint>(x);
      const double a = p.first.radians() + normal(rng);
      const double b = p.second.radians() + normal(rng);
      return TorusPoint{Angle(a), Angle(b)};
    }
  }
  return x;
}

ManifoldPoint sample_uniform(const Manifold& m, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  switch (m.kind()) {
    case ManifoldKind::Circle: return Angle(angle(rng));
    case ManifoldKind::Sphere: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (;;) {
        const double a = normal(rng);
        const double b = normal(rng);
        const double c = normal(rng);
        if (a * a + b * b + c * c > 1e-24) return UnitVector3(a, b, c);
      }
    }
    case ManifoldKind::Torus: {
      const double a = angle(rng);
      const double b = angle(rng);
      return TorusPoint{Angle(a), Angle(b)};
    }
  }
  return Angle();
}

}  // namespace hkreg
