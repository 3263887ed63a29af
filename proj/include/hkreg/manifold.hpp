#pragma once

#include <array>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hkreg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point on S^1, stored as an angle canonically wrapped into [0, 2pi).
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians);

  double radians() const noexcept { return theta_; }

 private:
  double theta_ = 0.0;
};

/// Signed representative of an angle difference in [-pi, pi].
double wrap_signed(double radians) noexcept;

/// Point on S^2 in ambient coordinates; normalized on construction.
class UnitVector3 {
 public:
  UnitVector3() = default;
  UnitVector3(double x, double y, double z);
  explicit UnitVector3(const std::array<double, 3>& v)
      : UnitVector3(v[0], v[1], v[2]) {}

  const std::array<double, 3>& coords() const noexcept { return v_; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

 private:
  std::array<double, 3> v_{0.0, 0.0, 1.0};
};

/// Point on the flat torus S^1 x S^1.
struct TorusPoint {
  Angle first;
  Angle second;
};

using ManifoldPoint = std::variant<Angle, UnitVector3, TorusPoint>;

/// Tangent vector. Circle uses [0], torus [0..1], sphere the ambient
/// 3-vector orthogonal to the base point.
using Tangent = std::array<double, 3>;

enum class ManifoldKind { Circle, Sphere, Torus };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(std::string_view name);

/// Controls series evaluation of the heat kernel.
struct HeatKernelConfig {
  int truncation_order = 200;
  double series_tolerance = 1e-14;
  // Circle only: wrapped image sum below this time, eigen sum at or above.
  double representation_switch_time = 1.0;

  void validate() const;
};

class Manifold {
 public:
  static Manifold circle(HeatKernelConfig config = {});
  static Manifold sphere(HeatKernelConfig config = {});
  static Manifold torus(HeatKernelConfig config = {});
  static Manifold of_kind(ManifoldKind kind, HeatKernelConfig config = {});

  ManifoldKind kind() const noexcept { return kind_; }
  int dimension() const noexcept;
  double volume() const noexcept;
  double diameter() const noexcept;
  const HeatKernelConfig& config() const noexcept { return config_; }
  std::string name() const { return to_string(kind_); }

  bool holds(const ManifoldPoint& p) const noexcept;
  /// Throws InvalidArgument when the point belongs to another manifold.
  void require(const ManifoldPoint& p) const;

  /// Number of intrinsic coordinates used for I/O (1, 3, 2).
  std::size_t coordinate_count() const noexcept;
  std::vector<double> coordinates(const ManifoldPoint& p) const;
  ManifoldPoint from_coordinates(const std::vector<double>& c) const;

 private:
  Manifold(ManifoldKind kind, HeatKernelConfig config);

  ManifoldKind kind_;
  HeatKernelConfig config_;
};

double geodesic_distance(const Manifold& m, const ManifoldPoint& x,
                         const ManifoldPoint& y);

/// Point at fraction s of the way along the minimizing geodesic from x to y.
/// Antipodal pairs have no unique geodesic; the tie-break is the
/// counterclockwise arc on S^1 (per coordinate on the torus) and on S^2 the
/// great circle through x and the first coordinate axis not parallel to x.
ManifoldPoint geodesic_interpolate(const Manifold& m, const ManifoldPoint& x,
                                   const ManifoldPoint& y, double s);

Tangent log_map(const Manifold& m, const ManifoldPoint& base,
                const ManifoldPoint& x);
ManifoldPoint exp_map(const Manifold& m, const ManifoldPoint& base,
                      const Tangent& v);

/// Coordinate-wise equality within tol after canonical wrap.
bool points_equal(const Manifold& m, const ManifoldPoint& x,
                  const ManifoldPoint& y, double tol = 1e-12);

}  // namespace hkreg
