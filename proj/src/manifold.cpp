#include "hkreg/manifold.hpp"

#include <cmath>
#include <limits>

#include "hkreg/error.hpp"

namespace hkreg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidTime: return "InvalidTime";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SidelengthMismatch: return "SidelengthMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DegeneratePredictors: return "DegeneratePredictors";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Angle::Angle(double radians) {
  if (!std::isfinite(radians)) {
    throw Error(ErrorCode::InvalidArgument, "angle must be finite");
  }
  double t = std::fmod(radians, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  // fmod of a tiny negative value can round back up to exactly 2pi.
  if (t >= kTwoPi) t = 0.0;
  theta_ = t;
}

double wrap_signed(double radians) noexcept {
  double d = std::fmod(radians, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return d;
}

UnitVector3::UnitVector3(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument,
                "sphere point needs a finite nonzero vector");
  }
  // Already unit up to rounding: keep the bits so that stored points
  // round-trip exactly through text.
  if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    v_ = {x, y, z};
  } else {
    v_ = {x / n, y / n, z / n};
  }
}

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Torus: return "torus";
  }
  return "unknown";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "circle" || name == "S1") return ManifoldKind::Circle;
  if (name == "sphere" || name == "S2") return ManifoldKind::Sphere;
  if (name == "torus" || name == "T2") return ManifoldKind::Torus;
  throw Error(ErrorCode::InvalidArgument,
              "unknown manifold '" + std::string(name) + "'");
}

void HeatKernelConfig::validate() const {
  if (truncation_order < 1) {
    throw Error(ErrorCode::InvalidArgument, "truncation_order must be >= 1");
  }
  if (!(series_tolerance > 0.0) || !(series_tolerance < 1e-8)) {
    throw Error(ErrorCode::InvalidArgument,
                "series_tolerance must lie in (0, 1e-8)");
  }
  if (!(representation_switch_time > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "representation_switch_time must be positive");
  }
}

Manifold::Manifold(ManifoldKind kind, HeatKernelConfig config)
    : kind_(kind), config_(config) {
  config_.validate();
}

Manifold Manifold::circle(HeatKernelConfig config) {
  return {ManifoldKind::Circle, config};
}
Manifold Manifold::sphere(HeatKernelConfig config) {
  return {ManifoldKind::Sphere, config};
}
Manifold Manifold::torus(HeatKernelConfig config) {
  return {ManifoldKind::Torus, config};
}
Manifold Manifold::of_kind(ManifoldKind kind, HeatKernelConfig config) {
  return {kind, config};
}

int Manifold::dimension() const noexcept {
  return kind_ == ManifoldKind::Circle ? 1 : 2;
}

double Manifold::volume() const noexcept {
  switch (kind_) {
    case ManifoldKind::Circle: return kTwoPi;
    case ManifoldKind::Sphere: return 4.0 * kPi;
    case ManifoldKind::Torus: return kTwoPi * kTwoPi;
  }
  return 0.0;
}

double Manifold::diameter() const noexcept {
  return kind_ == ManifoldKind::Torus ? kPi * std::numbers::sqrt2 : kPi;
}

bool Manifold::holds(const ManifoldPoint& p) const noexcept {
  switch (kind_) {
    case ManifoldKind::Circle: return std::holds_alternative<Angle>(p);
    case ManifoldKind::Sphere: return std::holds_alternative<UnitVector3>(p);
    case ManifoldKind::Torus: return std::holds_alternative<TorusPoint>(p);
  }
  return false;
}

void Manifold::require(const ManifoldPoint& p) const {
  if (!holds(p)) {
    throw Error(ErrorCode::InvalidArgument,
                "point does not belong to the " + name());
  }
}

std::size_t Manifold::coordinate_count() const noexcept {
  switch (kind_) {
    case ManifoldKind::Circle: return 1;
    case ManifoldKind::Sphere: return 3;
    case ManifoldKind::Torus: return 2;
  }
  return 0;
}

std::vector<double> Manifold::coordinates(const ManifoldPoint& p) const {
  require(p);
  switch (kind_) {
    case ManifoldKind::Circle: return {std::get<Angle>(p).radians()};
    case ManifoldKind::Sphere: {
      const auto& v = std::get<UnitVector3>(p).coords();
      return {v[0], v[1], v[2]};
    }
    case ManifoldKind::Torus: {
      const auto& q = std::get<TorusPoint>(p);
      return {q.first.radians(), q.second.radians()};
    }
  }
  return {};
}

ManifoldPoint Manifold::from_coordinates(const std::vector<double>& c) const {
  if (c.size() != coordinate_count()) {
    throw Error(ErrorCode::InvalidArgument,
                name() + " point needs " + std::to_string(coordinate_count()) +
                    " coordinates, got " + std::to_string(c.size()));
  }
  switch (kind_) {
    case ManifoldKind::Circle: return Angle(c[0]);
    case ManifoldKind::Sphere: return UnitVector3(c[0], c[1], c[2]);
    case ManifoldKind::Torus: return TorusPoint{Angle(c[0]), Angle(c[1])};
  }
  return Angle();
}

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Angle between unit vectors; atan2 form stays accurate near 0 and pi.
double sphere_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Unit tangent at x pointing toward the first coordinate axis not parallel
// to x. Used when the direction to the target is undefined.
Vec3 fallback_direction(const Vec3& x) {
  for (int i = 0; i < 3; ++i) {
    Vec3 e{0.0, 0.0, 0.0};
    e[i] = 1.0;
    const double c = dot(e, x);
    if (std::abs(c) < 1.0 - 1e-9) {
      Vec3 u{e[0] - c * x[0], e[1] - c * x[1], e[2] - c * x[2]};
      const double n = norm(u);
      return {u[0] / n, u[1] / n, u[2] / n};
    }
  }
  return {1.0, 0.0, 0.0};  // unreachable for unit x
}

// Unit tangent at x toward y together with the angle between them.
std::pair<Vec3, double> sphere_direction(const Vec3& x, const Vec3& y) {
  const double omega = sphere_angle(x, y);
  if (kPi - omega < 1e-9) return {fallback_direction(x), omega};
  const double c = dot(x, y);
  Vec3 u{y[0] - c * x[0], y[1] - c * x[1], y[2] - c * x[2]};
  const double n = norm(u);
  if (n == 0.0) return {fallback_direction(x), omega};
  return {{u[0] / n, u[1] / n, u[2] / n}, omega};
}

// Counterclockwise tie-break for the circle geodesic at exactly pi.
double circle_step(double from, double to) {
  double d = wrap_signed(to - from);
  if (kPi - std::abs(d) < 1e-9) d = std::abs(d);
  return d;
}

double circle_interpolate(double x, double y, double s) {
  return x + s * circle_step(x, y);
}

}  // namespace

double geodesic_distance(const Manifold& m, const ManifoldPoint& x,
                         const ManifoldPoint& y) {
  m.require(x);
  m.require(y);
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return std::abs(wrap_signed(std::get<Angle>(y).radians() -
                                  std::get<Angle>(x).radians()));
    case ManifoldKind::Sphere:
      return sphere_angle(std::get<UnitVector3>(x).coords(),
                          std::get<UnitVector3>(y).coords());
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      const double d1 = wrap_signed(b.first.radians() - a.first.radians());
      const double d2 = wrap_signed(b.second.radians() - a.second.radians());
      return std::hypot(d1, d2);
    }
  }
  return 0.0;
}

ManifoldPoint geodesic_interpolate(const Manifold& m, const ManifoldPoint& x,
                                   const ManifoldPoint& y, double s) {
  m.require(x);
  m.require(y);
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::OutOfDomain,
                "interpolation fraction must lie in [0, 1]");
  }
  if (s == 0.0) return x;
  if (s == 1.0) return y;
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return Angle(circle_interpolate(std::get<Angle>(x).radians(),
                                      std::get<Angle>(y).radians(), s));
    case ManifoldKind::Sphere: {
      const auto& a = std::get<UnitVector3>(x).coords();
      const auto& b = std::get<UnitVector3>(y).coords();
      const auto [u, omega] = sphere_direction(a, b);
      if (omega == 0.0) return x;
      const double c = std::cos(s * omega);
      const double sn = std::sin(s * omega);
      return UnitVector3(c * a[0] + sn * u[0], c * a[1] + sn * u[1],
                         c * a[2] + sn * u[2]);
    }
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      return TorusPoint{
          Angle(circle_interpolate(a.first.radians(), b.first.radians(), s)),
          Angle(circle_interpolate(a.second.radians(), b.second.radians(),
                                   s))};
    }
  }
  return x;
}

Tangent log_map(const Manifold& m, const ManifoldPoint& base,
                const ManifoldPoint& x) {
  m.require(base);
  m.require(x);
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return {circle_step(std::get<Angle>(base).radians(),
                          std::get<Angle>(x).radians()),
              0.0, 0.0};
    case ManifoldKind::Sphere: {
      const auto& a = std::get<UnitVector3>(base).coords();
      const auto& b = std::get<UnitVector3>(x).coords();
      const auto [u, omega] = sphere_direction(a, b);
      return {omega * u[0], omega * u[1], omega * u[2]};
    }
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(base);
      const auto& b = std::get<TorusPoint>(x);
      return {circle_step(a.first.radians(), b.first.radians()),
              circle_step(a.second.radians(), b.second.radians()), 0.0};
    }
  }
  return {};
}

ManifoldPoint exp_map(const Manifold& m, const ManifoldPoint& base,
                      const Tangent& v) {
  m.require(base);
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return Angle(std::get<Angle>(base).radians() + v[0]);
    case ManifoldKind::Sphere: {
      const auto& a = std::get<UnitVector3>(base).coords();
      // Drop any normal component so that exp stays on the sphere.
      const double c0 = dot(v, a);
      const Vec3 w{v[0] - c0 * a[0], v[1] - c0 * a[1], v[2] - c0 * a[2]};
      const double len = norm(w);
      if (len == 0.0) return base;
      const double c = std::cos(len);
      const double s = std::sin(len) / len;
      return UnitVector3(c * a[0] + s * w[0], c * a[1] + s * w[1],
                         c * a[2] + s * w[2]);
    }
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(base);
      return TorusPoint{Angle(a.first.radians() + v[0]),
                        Angle(a.second.radians() + v[1])};
    }
  }
  return base;
}

bool points_equal(const Manifold& m, const ManifoldPoint& x,
                  const ManifoldPoint& y, double tol) {
  if (!m.holds(x) || !m.holds(y)) return false;
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return std::abs(wrap_signed(std::get<Angle>(x).radians() -
                                  std::get<Angle>(y).radians())) <= tol;
    case ManifoldKind::Sphere: {
      const auto& a = std::get<UnitVector3>(x).coords();
      const auto& b = std::get<UnitVector3>(y).coords();
      for (int i = 0; i < 3; ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
      }
      return true;
    }
    case ManifoldKind::Torus: {
      const auto& a = std::get<TorusPoint>(x);
      const auto& b = std::get<TorusPoint>(y);
      return std::abs(wrap_signed(a.first.radians() - b.first.radians())) <=
                 tol &&
             std::abs(wrap_signed(a.second.radians() - b.second.radians())) <=
                 tol;
    }
  }
  return false;
}

}  // namespace hkreg
