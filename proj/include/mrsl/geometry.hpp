#pragma once

#include <cmath>
#include <numbers>

namespace mrsl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x{0.0};
  double y{0.0};

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Point2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }
inline constexpr double squared_distance(Point2 a, Point2 b) { return (a - b).squared_norm(); }

/// Wraps any finite angle into the canonical range (-pi, pi].
double canonical_radians(double radians);

/// Planar angle held in canonical form (-pi, pi].
class Angle {
 public:
  constexpr Angle() = default;
  static Angle from_radians(double radians) { return Angle(canonical_radians(radians)); }

  constexpr double radians() const { return radians_; }
  double degrees() const { return radians_ * 180.0 / kPi; }

  Point2 unit_vector() const { return {std::cos(radians_), std::sin(radians_)}; }

  constexpr bool operator==(const Angle&) const = default;

 private:
  explicit constexpr Angle(double canonical) : radians_(canonical) {}
  double radians_{0.0};
};

/// A straight wall (or obstacle body) that attenuates any radio path crossing it.
struct WallSegment {
  Point2 a;
  Point2 b;
  double attenuation_db{10.0};

  /// Throws DomainError on a == b or a negative attenuation.
  void validate() const;
};

/// Bearing of (to - from), counter-clockwise from +x. Throws DomainError when from == to.
Angle bearing(Point2 from, Point2 to);

/// (a - b) wrapped to (-pi, pi].
Angle angular_diff(Angle a, Angle b);

/// True when the path p-q touches the wall segment. Collinear overlap and shared
/// endpoints count as a crossing so attenuation is never skipped at degenerate geometry.
bool segments_intersect(const WallSegment& wall, Point2 p, Point2 q);

/// Axis-aligned workspace rectangle.
struct Bounds {
  double min_x{0.0};
  double min_y{0.0};
  double max_x{0.0};
  double max_y{0.0};

  static constexpr Bounds from_size(double width, double height) { return {0.0, 0.0, width, height}; }

  constexpr double width() const { return max_x - min_x; }
  constexpr double height() const { return max_y - min_y; }
  constexpr bool degenerate() const { return !(max_x > min_x) || !(max_y > min_y); }
  constexpr bool contains(Point2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  Point2 clamp(Point2 p) const;
  double diagonal() const { return std::hypot(width(), height()); }
};

}  // namespace mrsl
