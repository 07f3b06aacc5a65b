#include "mrsl/geometry.hpp"

#include <algorithm>

#include "mrsl/errors.hpp"

namespace mrsl {

double canonical_radians(double radians) {
  double r = std::remainder(radians, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

void WallSegment::validate() const {
  if (a == b) throw DomainError("wall endpoints coincide");
  if (!(attenuation_db >= 0.0)) throw DomainError("wall attenuation must be non-negative");
}

Angle bearing(Point2 from, Point2 to) {
  if (from == to) throw DomainError("bearing between coincident points");
  return Angle::from_radians(std::atan2(to.y - from.y, to.x - from.x));
}

Angle angular_diff(Angle a, Angle b) { return Angle::from_radians(a.radians() - b.radians()); }

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (cross > 0.0) return 1;
  if (cross < 0.0) return -1;
  return 0;
}

// c is collinear with a-b; does it lie inside the bounding box of a-b?
bool on_segment(Point2 a, Point2 b, Point2 c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const WallSegment& wall, Point2 p, Point2 q) {
  const int o1 = orientation(wall.a, wall.b, p);
  const int o2 = orientation(wall.a, wall.b, q);
  const int o3 = orientation(p, q, wall.a);
  const int o4 = orientation(p, q, wall.b);

  if (o1 != o2 && o3 != o4) return true;

  if (o1 == 0 && on_segment(wall.a, wall.b, p)) return true;
  if (o2 == 0 && on_segment(wall.a, wall.b, q)) return true;
  if (o3 == 0 && on_segment(p, q, wall.a)) return true;
  if (o4 == 0 && on_segment(p, q, wall.b)) return true;
  return false;
}

Point2 Bounds::clamp(Point2 p) const {
  return {std::clamp(p.x, min_x, max_x), std::clamp(p.y, min_y, max_y)};
}

}  // namespace mrsl
