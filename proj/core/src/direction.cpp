#include "belllab/direction.hpp"

#include <cmath>

#include "belllab/errors.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

Direction::Direction(double x, double y, double z) : x_(x), y_(y), z_(z) {
  const double norm2 = x * x + y * y + z * z;
  if (!(std::fabs(norm2 - 1.0) <= kExactTol)) {
    throw InvalidParameter("Direction components must have unit norm");
  }
}

Direction Direction::normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(norm > 1e-300)) {
    throw InvalidParameter("cannot normalize a zero vector");
  }
  return Direction(x / norm, y / norm, z / norm);
}

Direction Direction::from_plane_angle(double angle) {
  return Direction(std::sin(angle), 0.0, std::cos(angle));
}

Direction Direction::operator-() const { return Direction(-x_, -y_, -z_); }

double dot(const Direction& u, const Direction& v) {
  return u.x() * v.x() + u.y() * v.y() + u.z() * v.z();
}

double angle_between(const Direction& u, const Direction& v) {
  const double cx = u.y() * v.z() - u.z() * v.y();
  const double cy = u.z() * v.x() - u.x() * v.z();
  const double cz = u.x() * v.y() - u.y() * v.x();
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  return std::atan2(cross, dot(u, v));
}

}  // namespace belllab
