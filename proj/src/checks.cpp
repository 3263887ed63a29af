#include "hkreg/checks.hpp"

#include <algorithm>
#include <cmath>

#include "hkreg/heat_kernel.hpp"
#include "hkreg/metrics.hpp"
#include "hkreg/path.hpp"
#include "hkreg/quadrature.hpp"

namespace hkreg {

namespace {

constexpr double kCheckTimes[] = {0.05, 0.1, 0.5, 2.0};

CheckResult make(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

struct Setup {
  Manifold manifold;
  ManifoldPoint x;
  ManifoldPoint y;
  std::size_t resolution;
};

Setup setup_for(const std::string& name) {
  const auto kind = parse_manifold_kind(name);
  switch (kind) {
    case ManifoldKind::Circle:
      return {Manifold::circle(), Angle(0.3), Angle(1.4), 1024};
    case ManifoldKind::Sphere:
      return {Manifold::sphere(), UnitVector3(0.2, -0.3, 0.9),
              UnitVector3(0.7, 0.1, 0.4), 256};
    case ManifoldKind::Torus:
      return {Manifold::torus(), TorusPoint{Angle(0.3), Angle(5.0)},
              TorusPoint{Angle(1.4), Angle(0.2)}, 256};
  }
  return {Manifold::circle(), Angle(0.0), Angle(0.0), 1024};
}

double kernel(const Manifold& m, double t, const ManifoldPoint& x,
              const ManifoldPoint& y, double offset) {
  return heat_kernel(m, t, x, y) + offset;
}

UnitVector3 pole_of(const ManifoldPoint& p) {
  if (const auto* v = std::get_if<UnitVector3>(&p)) return *v;
  return {0.0, 0.0, 1.0};
}

}  // namespace

CheckResult check_circle_cross_representation(double offset) {
  const HeatKernelConfig cfg;
  double worst = 0.0;
  constexpr int kTimes = 100;
  for (int i = 0; i < kTimes; ++i) {
    const double t = 0.01 * std::pow(500.0, static_cast<double>(i) / (kTimes - 1));
    for (int j = 0; j < 64; ++j) {
      const double delta = kTwoPi * j / 64.0;
      const double a = circle_kernel::wrapped(t, delta, cfg) + offset;
      const double b = circle_kernel::eigen(t, delta, cfg);
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return make("circle wrapped vs eigen sum, t in [0.01, 5] x 64 angles", worst,
              1e-10);
}

CheckResult check_normalization(const std::string& manifold, double offset) {
  const auto s = setup_for(manifold);
  const auto quad = manifold_quadrature(s.manifold, s.resolution, pole_of(s.x));
  double worst = 0.0;
  for (double t : kCheckTimes) {
    double total = 0.0;
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      total += quad.weights[i] * kernel(s.manifold, t, s.x, quad.points[i], offset);
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return make(manifold + " normalization, t in {0.05, 0.1, 0.5, 2}", worst, 1e-8);
}

CheckResult check_semigroup(const std::string& manifold, double offset) {
  const auto s = setup_for(manifold);
  const auto quad = manifold_quadrature(s.manifold, s.resolution, pole_of(s.x));
  double worst = 0.0;
  for (double t : kCheckTimes) {
    double total = 0.0;
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      total += quad.weights[i] *
               kernel(s.manifold, t / 2, s.x, quad.points[i], offset) *
               kernel(s.manifold, t / 2, quad.points[i], s.y, offset);
    }
    worst = std::max(worst,
                     std::abs(total - kernel(s.manifold, t, s.x, s.y, offset)));
  }
  return make(manifold + " semigroup p_t = p_{t/2} * p_{t/2}", worst, 1e-6);
}

CheckResult check_symmetry(const std::string& manifold, double offset) {
  const auto s = setup_for(manifold);
  Rng rng(derive_seed(17, {static_cast<std::uint64_t>(s.manifold.kind())}));
  double mismatches = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto a = sample_uniform(s.manifold, rng);
    const auto b = sample_uniform(s.manifold, rng);
    for (double t : kCheckTimes) {
      if (kernel(s.manifold, t, a, b, offset) != kernel(s.manifold, t, b, a, offset)) {
        mismatches += 1.0;
      }
    }
  }
  return make(manifold + " symmetry p_t(x, y) == p_t(y, x)", mismatches, 0.0);
}

CheckResult check_positivity(const std::string& manifold, double offset) {
  const auto s = setup_for(manifold);
  Rng rng(derive_seed(23, {static_cast<std::uint64_t>(s.manifold.kind())}));
  double failures = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto a = sample_uniform(s.manifold, rng);
    const auto b = sample_uniform(s.manifold, rng);
    for (double t : {0.05, 0.1, 0.5, 2.0, 5.0}) {
      if (!(kernel(s.manifold, t, a, b, offset) > 0.0)) failures += 1.0;
    }
    // Far pairs at t = 0.01 underflow on the torus; the log form must not.
    if (!std::isfinite(log_heat_kernel(s.manifold, 0.01, a, b))) failures += 1.0;
  }
  return make(manifold + " positivity", failures, 0.0);
}

CheckResult check_circle_rotation_invariance(double offset) {
  const auto m = Manifold::circle();
  Rng rng(29);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = angle(rng);
    const double y = angle(rng);
    const double a = angle(rng);
    for (double t : kCheckTimes) {
      const double base = kernel(m, t, Angle(x), Angle(y), offset);
      const double moved = kernel(m, t, Angle(x + a), Angle(y + a), offset);
      worst = std::max(worst, std::abs(moved - base) / base);
    }
  }
  return make("circle rotation invariance (relative)", worst, 1e-12);
}

namespace {

PiecewiseGeodesicPath random_circle_path(Rng& rng) {
  std::uniform_int_distribution<int> pieces(1, 10);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const auto K = static_cast<std::size_t>(pieces(rng));
  std::vector<ManifoldPoint> knots;
  for (std::size_t k = 0; k <= K; ++k) knots.emplace_back(Angle(angle(rng)));
  return {ManifoldKind::Circle, std::move(knots)};
}

}  // namespace

CheckResult check_metric_axioms() {
  const auto m = Manifold::circle();
  const auto p = PredictorDensity::uniform();
  const QuadratureGrid grid{256};
  Rng rng(31);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto f = as_curve(m, random_circle_path(rng));
    const auto g = as_curve(m, random_circle_path(rng));
    const auto h = as_curve(m, random_circle_path(rng));
    for (double q : {1.0, 2.0, 3.0}) {
      const double fg = dq_distance(m, f, g, q, p, grid);
      const double gf = dq_distance(m, g, f, q, p, grid);
      const double gh = dq_distance(m, g, h, q, p, grid);
      const double fh = dq_distance(m, f, h, q, p, grid);
      worst = std::max({worst, std::abs(fg - gf), fh - (fg + gh)});
    }
    const double fg = dinf_distance(m, f, g, grid);
    const double gf = dinf_distance(m, g, f, grid);
    const double gh = dinf_distance(m, g, h, grid);
    const double fh = dinf_distance(m, f, h, grid);
    worst = std::max({worst, std::abs(fg - gf), fh - (fg + gh)});
  }
  return make("d_q / d_inf symmetry and triangle inequality", worst, 1e-10);
}

CheckResult check_power_mean_monotonicity() {
  const auto m = Manifold::circle();
  const auto p = PredictorDensity::uniform();
  const QuadratureGrid grid{256};
  Rng rng(37);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto f = as_curve(m, random_circle_path(rng));
    const auto g = as_curve(m, random_circle_path(rng));
    double previous = 0.0;
    for (double q : {1.0, 1.5, 2.0, 4.0}) {
      const double d = dq_distance(m, f, g, q, p, grid);
      worst = std::max(worst, previous - d);
      previous = d;
    }
  }
  return make("d_q nondecreasing in q", worst, 1e-10);
}

std::vector<CheckResult> run_kernel_checks(KernelCheckOptions options) {
  const double off = options.kernel_offset;
  std::vector<CheckResult> results;
  results.push_back(check_circle_cross_representation(off));
  for (const char* name : {"circle", "sphere", "torus"}) {
    results.push_back(check_normalization(name, off));
    results.push_back(check_semigroup(name, off));
    results.push_back(check_symmetry(name, off));
    results.push_back(check_positivity(name, off));
  }
  results.push_back(check_circle_rotation_invariance(off));
  results.push_back(check_metric_axioms());
  results.push_back(check_power_mean_monotonicity());
  return results;
}

}  // namespace hkreg
