#include "bellsim/geometry.hpp"

#include <cmath>

#include "bellsim/errors.hpp"

namespace bellsim {

bool is_unit(const Direction& d, double tol) {
  return std::fabs(d.x * d.x + d.y * d.y + d.z * d.z - 1.0) <= tol;
}

Direction normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (norm < 1e-12)
    throw ContractError("cannot normalize a near-zero direction vector");
  return Direction{x / norm, y / norm, z / norm};
}

Plane plane_from_string(const std::string& s) {
  if (s == "xy") return Plane::xy;
  if (s == "xz") return Plane::xz;
  if (s == "yz") return Plane::yz;
  throw ParseError("unknown plane '" + s + "' (expected xy, xz or yz)");
}

std::string to_string(Plane p) {
  switch (p) {
    case Plane::xy: return "xy";
    case Plane::xz: return "xz";
    case Plane::yz: return "yz";
  }
  throw ContractError("invalid plane value");
}

Direction direction_in_plane(double degrees, Plane plane) {
  const double rad = degrees * (std::acos(-1.0) / 180.0);
  const double c = std::cos(rad), s = std::sin(rad);
  switch (plane) {
    case Plane::xy: return Direction{c, s, 0.0};
    case Plane::xz: return Direction{c, 0.0, s};
    case Plane::yz: return Direction{0.0, c, s};
  }
  throw ContractError("invalid plane value");
}

SettingTable default_setting_table() {
  return SettingTable{
      direction_in_plane(0.0), direction_in_plane(90.0),
      direction_in_plane(45.0), direction_in_plane(135.0)};
}

}  // namespace bellsim
