#include <doctest.h>

#include <cmath>

#include "hkreg/checks.hpp"
#include "hkreg/heat_kernel.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hkreg;
using test::code_of;

TEST_CASE("circle kernel at t = 0.5 on the diagonal") {
  const auto s1 = Manifold::circle();
  const double p = heat_kernel(s1, 0.5, Angle(0), Angle(0));
  CHECK(p == doctest::Approx(0.5641896).epsilon(1e-7));
  CHECK(p == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-6));
  CHECK(p == doctest::Approx(oracle::circle_wrapped(0.5, 0.0)).epsilon(1e-13));
  CHECK(p == doctest::Approx(oracle::circle_eigen(0.5, 0.0)).epsilon(1e-13));
}

TEST_CASE("both circle representations match the oracles") {
  const HeatKernelConfig cfg;
  for (double t : {0.01, 0.05, 0.3, 0.9, 1.0, 2.0, 5.0}) {
    for (int j = 0; j < 64; ++j) {
      const double d = kTwoPi * j / 64.0;
      const double ref = oracle::circle_wrapped(t, d);
      const double tol = 1e-12 * oracle::circle_wrapped(t, 0.0);
      CHECK(std::abs(circle_kernel::wrapped(t, d, cfg) - ref) <= tol);
      if (t >= 0.05) CHECK(std::abs(circle_kernel::eigen(t, d, cfg) - ref) <= tol);
      CHECK(std::abs(circle_kernel::density(t, d, cfg) - ref) <= tol);
      CHECK(circle_kernel::log_density(t, d, cfg) == doctest::Approx(std::log(ref)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross-representation check passes") {
  const auto r = check_circle_cross_representation();
  CHECK(r.passed);
  CHECK(r.value <= 1e-10);
}

TEST_CASE("circle log kernel stays finite where the density underflows") {
  const auto s1 = Manifold::circle();
  const double lp = log_heat_kernel(s1, 1e-4, Angle(0), Angle(kPi));
  CHECK(std::isfinite(lp));
  // The images at +pi and -pi tie, hence the log 2.
  CHECK(lp == doctest::Approx(std::log(2.0) - kPi * kPi / 2e-4 - 0.5 * std::log(2 * kPi * 1e-4)).epsilon(1e-12));
}

TEST_CASE("sphere kernel matches a std::legendre series") {
  const auto s2 = Manifold::sphere();
  const UnitVector3 x(0, 0, 1);
  for (double t : {0.01, 0.05, 0.2, 1.0, 3.0}) {
    for (double gamma : {0.0, 0.1, 0.5, 1.0, 2.0, 3.0, kPi}) {
      const UnitVector3 y(std::sin(gamma), 0.0, std::cos(gamma));
      const double ref = oracle::sphere_series(t, std::cos(gamma));
      const double got = heat_kernel(s2, t, x, y);
      CHECK(std::abs(got - ref) <= 1e-10 * oracle::sphere_series(t, 1.0));
    }
  }
}

TEST_CASE("sphere kernel tends to the uniform density") {
  const auto s2 = Manifold::sphere();
  CHECK(heat_kernel(s2, 40.0, UnitVector3(1, 0, 0), UnitVector3(0, 0.6, 0.8)) ==
        doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(1.0 / (4 * kPi) == doctest::Approx(0.0795775).epsilon(1e-6));
}

TEST_CASE("torus kernel factorizes") {
  const auto t2 = Manifold::torus();
  const auto s1 = Manifold::circle();
  const TorusPoint x{Angle(0.3), Angle(5.0)};
  const TorusPoint y{Angle(2.0), Angle(0.2)};
  for (double t : {0.05, 0.5, 3.0}) {
    const double expected = heat_kernel(s1, t, Angle(0.3), Angle(2.0)) *
                            heat_kernel(s1, t, Angle(5.0), Angle(0.2));
    CHECK(heat_kernel(t2, t, x, y) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("kernel identities on every manifold") {
  for (std::string name : {"circle", "sphere", "torus"}) {
    CAPTURE(name);
    const auto norm = check_normalization(name);
    CHECK(norm.value <= 1e-8);
    const auto semi = check_semigroup(name);
    CHECK(semi.value <= 1e-6);
    CHECK(check_symmetry(name).passed);
    CHECK(check_positivity(name).passed);
  }
  CHECK(check_circle_rotation_invariance().passed);
}

TEST_CASE("kernel checks detect an injected offset") {
  CHECK_FALSE(check_normalization("circle", 1e-3).passed);
  CHECK_FALSE(check_semigroup("sphere", 1e-3).passed);
}

TEST_CASE("invalid times are rejected") {
  const auto s1 = Manifold::circle();
  CHECK(code_of([&] { heat_kernel(s1, 0.0, Angle(0), Angle(0)); }) == ErrorCode::InvalidTime);
  CHECK(code_of([&] { heat_kernel(s1, -1.0, Angle(0), Angle(0)); }) == ErrorCode::InvalidTime);
  CHECK(code_of([&] { log_heat_kernel(s1, NAN, Angle(0), Angle(0)); }) == ErrorCode::InvalidTime);
  Rng rng(1);
  CHECK(code_of([&] { sample_heat_kernel(s1, 0.0, Angle(0), rng); }) == ErrorCode::InvalidTime);
}

TEST_CASE("circle sampler resultant length is exp(-t/2)") {
  const auto s1 = Manifold::circle();
  Rng rng(2024);
  const double t = 0.1;
  std::vector<double> c(100000);
  std::vector<double> s(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double a = std::get<Angle>(sample_heat_kernel(s1, t, Angle(1.0), rng)).radians();
    c[i] = std::cos(a - 1.0);
    s[i] = std::sin(a - 1.0);
  }
  const double target = std::exp(-t / 2);
  CHECK(target == doctest::Approx(0.9512).epsilon(1e-4));
  CHECK(std::abs(oracle::mean(c) - target) < 3 * oracle::standard_error(c));
  CHECK(std::abs(oracle::mean(s)) < 3 * oracle::standard_error(s));
}

TEST_CASE("circle sampler concentrates as t -> 0") {
  const auto s1 = Manifold::circle();
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    CHECK(geodesic_distance(s1, sample_heat_kernel(s1, 1e-6, Angle(0), rng), Angle(0)) < 0.01);
  }
}

TEST_CASE("sphere sampler matches the polar quadrature moment") {
  const auto s2 = Manifold::sphere();
  const double t = 0.5;
  const double oracle_moment = oracle::sphere_mean_cosine(t);
  // The l = 1 Legendre coefficient gives exp(-t) in closed form.
  CHECK(oracle_moment == doctest::Approx(std::exp(-t)).epsilon(1e-8));
  for (const UnitVector3 x : {UnitVector3(0, 0, 1), UnitVector3(0.6, -0.8, 0.0)}) {
    Rng rng(99);
    std::vector<double> dots(100000);
    for (auto& d : dots) {
      const auto s = std::get<UnitVector3>(sample_heat_kernel(s2, t, x, rng));
      d = s[0] * x[0] + s[1] * x[1] + s[2] * x[2];
    }
    CHECK(std::abs(oracle::mean(dots) - oracle_moment) < 3 * oracle::standard_error(dots));
  }
}

TEST_CASE("torus sampler coordinates are circle samples") {
  const auto t2 = Manifold::torus();
  Rng rng(17);
  const double t = 0.3;
  std::vector<double> c1(50000);
  std::vector<double> c2(c1.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const auto p = std::get<TorusPoint>(sample_heat_kernel(t2, t, TorusPoint{Angle(1), Angle(4)}, rng));
    c1[i] = std::cos(p.first.radians() - 1.0);
    c2[i] = std::cos(p.second.radians() - 4.0);
  }
  CHECK(std::abs(oracle::mean(c1) - std::exp(-t / 2)) < 3 * oracle::standard_error(c1));
  CHECK(std::abs(oracle::mean(c2) - std::exp(-t / 2)) < 3 * oracle::standard_error(c2));
}

TEST_CASE("uniform sampling has no resultant") {
  Rng rng(8);
  const int n = 100000;
  double c = 0, s = 0;
  const auto s1 = Manifold::circle();
  for (int i = 0; i < n; ++i) {
    const double a = std::get<Angle>(sample_uniform(s1, rng)).radians();
    c += std::cos(a);
    s += std::sin(a);
  }
  CHECK(std::hypot(c, s) / n < 0.02);

  const auto s2 = Manifold::sphere();
  std::array<double, 3> v{};
  for (int i = 0; i < n; ++i) {
    const auto p = std::get<UnitVector3>(sample_uniform(s2, rng));
    for (int k = 0; k < 3; ++k) v[k] += p[k];
  }
  CHECK(std::hypot(v[0], v[1], v[2]) / n < 0.02);

  const auto t2 = Manifold::torus();
  double c1 = 0, s1v = 0, c2 = 0, s2v = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = std::get<TorusPoint>(sample_uniform(t2, rng));
    c1 += std::cos(p.first.radians());
    s1v += std::sin(p.first.radians());
    c2 += std::cos(p.second.radians());
    s2v += std::sin(p.second.radians());
  }
  CHECK(std::hypot(c1, s1v) / n < 0.02);
  CHECK(std::hypot(c2, s2v) / n < 0.02);
}
