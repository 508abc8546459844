#pragma once

#include <string>

#include "bellsim/outcomes.hpp"

namespace bellsim {

// Unit vector in R^3; |v| = 1 within 1e-12 for any value built through the
// constructors below.
struct Direction {
  double x = 1.0, y = 0.0, z = 0.0;

  friend bool operator==(const Direction&, const Direction&) = default;
};

inline double dot(const Direction& p, const Direction& q) {
  return p.x * q.x + p.y * q.y + p.z * q.z;
}

bool is_unit(const Direction& d, double tol = 1e-12);

// Normalizes (x, y, z); throws ContractError when the norm is too small to
// normalize reliably.
Direction normalized(double x, double y, double z);

enum class Plane { xy, xz, yz };

Plane plane_from_string(const std::string& s);
std::string to_string(Plane p);

// Direction at the given angle (degrees) within a coordinate plane, measured
// from the plane's first axis toward its second.
Direction direction_in_plane(double degrees, Plane plane = Plane::xy);

// Maps each wing's two setting labels to detector directions. The table is
// public apparatus geometry, fixed before any trial runs.
struct SettingTable {
  Direction a1, a2;  // left wing, labels 1 and 2
  Direction b1, b2;  // right wing

  const Direction& left(SettingLabel s) const {
    return s == SettingLabel::one ? a1 : a2;
  }
  const Direction& right(SettingLabel s) const {
    return s == SettingLabel::one ? b1 : b2;
  }
};

// Coplanar table: left at 0 and 90 degrees, right at 45 and 135, all in the
// xy plane. Maximizes the equality-form statistic for the singlet state at
// sqrt(2) - 1.
SettingTable default_setting_table();

}  // namespace bellsim
