#pragma once

#include <array>

namespace belllab {

// Unit vector in R^3. Invariant: x^2 + y^2 + z^2 = 1 within 1e-12.
class Direction {
 public:
  // Components must already satisfy the unit-norm invariant.
  Direction(double x, double y, double z);

  // Scales an arbitrary nonzero vector to unit length.
  static Direction normalized(double x, double y, double z);

  // Direction at `angle` radians from +z inside the x-z plane. All
  // "coplanar settings" in the default grids use this plane.
  static Direction from_plane_angle(double angle);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Direction operator-() const;

  bool operator==(const Direction&) const = default;

 private:
  double x_, y_, z_;
};

double dot(const Direction& u, const Direction& v);

// Angle in [0, pi]. Computed as atan2(|u x v|, u.v), which is exact (0 or
// pi) for bitwise-equal or bitwise-negated inputs; acos(dot) is not.
double angle_between(const Direction& u, const Direction& v);

}  // namespace belllab
