#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hkreg/heat_kernel.hpp"
#include "hkreg/inference.hpp"
#include "hkreg/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hkreg;
using test::code_of;

namespace {

double angle_of(const ManifoldPoint& p) { return std::get<Angle>(p).radians(); }

Dataset constant_truth_data(std::size_t n, double sigma2, std::uint64_t seed) {
  const auto s1 = Manifold::circle();
  Rng rng(seed);
  return generate_dataset(s1, [](double) { return ManifoldPoint{Angle(1.0)}; }, n, sigma2,
                          PredictorDensity::uniform(), rng);
}

}  // namespace

TEST_CASE("init_state on identical responses") {
  const auto s1 = Manifold::circle();
  Dataset data{ManifoldKind::Circle, {}};
  for (int i = 0; i < 12; ++i) data.observations.push_back({i / 11.0, Angle(2.5)});
  const auto f = init_state(data, 10, s1);
  for (const auto& k : f.knots()) CHECK(angle_of(k) == 2.5);
}

TEST_CASE("init_state fills every knot from a single observation") {
  const auto s1 = Manifold::circle();
  const Dataset data{ManifoldKind::Circle, {{0.5, Angle(0.7)}}};
  const auto f = init_state(data, 8, s1);
  for (const auto& k : f.knots()) CHECK(angle_of(k) == 0.7);
}

TEST_CASE("init_state picks the kernel-density mode of a window") {
  const auto s1 = Manifold::circle();
  const Dataset data{ManifoldKind::Circle, {{0.0, Angle(0.1)}, {0.01, Angle(0.1)}, {0.02, Angle(3.0)}}};
  // Scores sum_l p_0.05(x_j, x_l) evaluated by the oracle.
  const double near = 2 * oracle::circle_wrapped(0.05, 0.0) + oracle::circle_wrapped(0.05, 2.9);
  const double far = oracle::circle_wrapped(0.05, 0.0) + 2 * oracle::circle_wrapped(0.05, 2.9);
  REQUIRE(near > far);
  const auto f = init_state(data, 40, s1);
  CHECK(angle_of(f.knot(0)) == 0.1);
}

TEST_CASE("empty windows copy the nearest window, ties toward the lower index") {
  const auto s1 = Manifold::circle();
  // K = 4: windows at 0, .25, .5, .75, 1. Data only in windows 0 and 2.
  const Dataset data{ManifoldKind::Circle, {{0.0, Angle(1.0)}, {0.5, Angle(2.0)}}};
  const auto f = init_state(data, 4, s1);
  CHECK(angle_of(f.knot(0)) == 1.0);
  CHECK(angle_of(f.knot(1)) == 1.0);
  CHECK(angle_of(f.knot(2)) == 2.0);
  CHECK(angle_of(f.knot(3)) == 2.0);
  CHECK(angle_of(f.knot(4)) == 2.0);
}

TEST_CASE("annealing with no steps returns the initial state") {
  const auto s1 = Manifold::circle();
  const auto data = constant_truth_data(20, 0.1, 4);
  AnnealConfig cfg;
  cfg.temperature_floor = cfg.initial_temperature;
  cfg.steps_per_temperature = 0;
  Rng rng(1);
  const auto fit = anneal_map(data, KnownVariance{0.1}, PriorSpec{10, 0.01}, cfg, s1, rng);
  const auto init = init_state(data, 10, s1);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(points_equal(s1, fit.path.knot(k), init.knot(k), 0.0));
  CHECK(fit.acceptance_rate == 0.0);
}

TEST_CASE("annealing recovers a constant function") {
  const auto s1 = Manifold::circle();
  const auto truth = PiecewiseGeodesicPath::constant(ManifoldKind::Circle, 40, Angle(1.0));
  const PriorSpec spec{40, 0.01};
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto data = constant_truth_data(40, 0.05, seed);
    Rng rng(seed + 100);
    const auto fit = anneal_map(data, KnownVariance{0.05}, spec, AnnealConfig{}, s1, rng);
    const double dinf = dinf_distance(s1, fit.path, truth);
    CHECK(dinf < 0.3);

    // Prior-only spread around the same truth is much larger.
    Rng prior_rng(seed);
    double spread = 0.0;
    for (int i = 0; i < 200; ++i) {
      spread += dinf_distance(s1, sample_prior_path(spec, s1, prior_rng), truth);
    }
    CHECK(dinf < spread / 200.0);

    CHECK(fit.best_log_posterior == log_posterior(fit.path, data, KnownVariance{0.05}, spec, s1));
    double running = -INFINITY;
    for (const auto& p : fit.trace) running = std::max(running, p.log_posterior);
    CHECK(running == fit.best_log_posterior);
    CHECK(fit.trace.front().iteration == 0);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
      CHECK(fit.trace[i].iteration >= fit.trace[i - 1].iteration);
    }
  }
}

TEST_CASE("annealing and sampling are deterministic under a seed") {
  const auto s1 = Manifold::circle();
  const auto data = constant_truth_data(30, 0.1, 9);
  auto run = [&] {
    Rng rng(5);
    return anneal_map(data, KnownVariance{0.1}, PriorSpec{20, 0.01}, AnnealConfig{}, s1, rng);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.best_log_posterior == b.best_log_posterior);
  CHECK(path_to_json(s1, a.path) == path_to_json(s1, b.path));
  CHECK(fit_to_json(s1, a) == fit_to_json(s1, b));

  auto sample = [&] {
    Rng rng(6);
    return mh_sample(data, KnownVariance{0.1}, PriorSpec{5, 1.0}, McmcConfig{2000, 500, 10, 0.05}, s1, rng);
  };
  const auto x = sample();
  const auto y = sample();
  REQUIRE(x.samples.size() == y.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    CHECK(path_to_json(s1, x.samples[i]) == path_to_json(s1, y.samples[i]));
  }
}

TEST_CASE("continuous-BM fit uses the fine grid") {
  const auto s1 = Manifold::circle();
  const auto data = constant_truth_data(30, 0.1, 2);
  Rng rng(3);
  const auto fit = fit_cbm(data, KnownVariance{0.1}, 0.01, AnnealConfig{}, s1, rng);
  CHECK(fit.path.intervals() == kFineIntervals);
  CHECK(l1_error(s1, as_curve(s1, fit.path), [](double) { return ManifoldPoint{Angle(1.0)}; }) < 0.3);
}

TEST_CASE("annealing works on sphere and torus") {
  Rng rng(4);
  for (auto m : {Manifold::sphere(), Manifold::torus()}) {
    const auto truth = benchmark_truth(m);
    const auto data = generate_dataset(m, truth, 30, 0.1, PredictorDensity::uniform(), rng);
    const auto fit = anneal_map(data, KnownVariance{0.1}, PriorSpec{10, 0.01}, AnnealConfig{}, m, rng);
    CHECK(std::isfinite(fit.best_log_posterior));
    CHECK(l1_error(m, as_curve(m, fit.path), truth) < 0.8);
  }
}

TEST_CASE("prior-only chain reproduces the prior increment law") {
  const auto s1 = Manifold::circle();
  const PriorSpec spec{4, 1.0};
  Rng rng(123);
  const auto run = mh_sample(Dataset{ManifoldKind::Circle, {}}, KnownVariance{0.1}, spec,
                             McmcConfig{400000, 20000, 100, 0.25}, s1, rng, McmcTarget::PriorOnly);
  CHECK(run.acceptance_rate > 0.0);
  CHECK(run.acceptance_rate < 1.0);
  std::vector<double> c;
  for (const auto& f : run.samples) {
    for (std::size_t k = 0; k < 4; ++k) {
      c.push_back(std::cos(angle_of(f.knot(k + 1)) - angle_of(f.knot(k))));
    }
  }
  CHECK(c.size() == 4 * 3800);
  CHECK(std::abs(oracle::mean(c) - std::exp(-spec.step_time() / 2)) < 3 * oracle::standard_error(c));
}

TEST_CASE("posterior chain acceptance is strictly between zero and one") {
  const auto s1 = Manifold::circle();
  const auto data = constant_truth_data(30, 0.1, 6);
  Rng rng(8);
  const auto run = mh_sample(data, KnownVariance{0.1}, PriorSpec{5, 1.0}, McmcConfig{2000, 0, 1, 0.05}, s1, rng);
  CHECK(run.samples.size() == 2000);
  CHECK(run.acceptance_rate > 0.0);
  CHECK(run.acceptance_rate < 1.0);
}

TEST_CASE("the knot proposal is symmetric") {
  Rng rng(19);
  std::uniform_real_distribution<double> t(0.005, 2.0);
  for (auto m : {Manifold::circle(), Manifold::sphere(), Manifold::torus()}) {
    for (int i = 0; i < 200; ++i) {
      const auto a = sample_uniform(m, rng);
      const auto b = sample_uniform(m, rng);
      const double time = t(rng);
      const double ab = knot_proposal_density(m, time, a, b);
      const double ba = knot_proposal_density(m, time, b, a);
      CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
    }
  }
}

TEST_CASE("sampler configurations are validated") {
  CHECK(code_of([] { McmcConfig{0, 0, 1, 0.05}.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { McmcConfig{100, 100, 1, 0.05}.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { McmcConfig{100, 0, 0, 0.05}.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { AnnealConfig{1.0, 1.0, 200, 1e-3, 0.05}.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { AnnealConfig{1.0, 0.95, 200, 2.0, 0.05}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fit JSON carries the documented fields") {
  const auto s1 = Manifold::circle();
  const auto data = constant_truth_data(30, 0.1, 1);
  Rng rng(2);
  const auto fit = anneal_map(data, KnownVariance{0.1}, PriorSpec{10, 0.01}, AnnealConfig{}, s1, rng);
  const auto j = fit_to_json(s1, fit, 8);
  CHECK(j.contains("path"));
  CHECK(j.at("best_log_posterior") == fit.best_log_posterior);
  CHECK(j.at("acceptance_rate") == fit.acceptance_rate);
  const auto& trace = j.at("trace_subsampled");
  CHECK(trace.size() <= 8);
  bool has_best = false;
  for (const auto& p : trace) has_best = has_best || p.at(1) == fit.best_log_posterior;
  CHECK(has_best);
}
