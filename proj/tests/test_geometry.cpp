#include "doctest.h"

#include <cmath>

#include "bellsim/errors.hpp"
#include "bellsim/geometry.hpp"

using namespace bellsim;
using doctest::Approx;

TEST_SUITE("geometry") {

TEST_CASE("direction_in_plane places angles on the expected axes") {
  const Direction e0 = direction_in_plane(0.0, Plane::xy);
  CHECK(e0.x == Approx(1.0).epsilon(1e-15));
  CHECK(e0.y == Approx(0.0).epsilon(1e-15));
  CHECK(e0.z == 0.0);

  const Direction e90 = direction_in_plane(90.0, Plane::xy);
  CHECK(e90.x == Approx(0.0).scale(1).epsilon(1e-15));
  CHECK(e90.y == Approx(1.0).epsilon(1e-15));

  const Direction e45 = direction_in_plane(45.0, Plane::xy);
  CHECK(e45.x == Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(e45.y == Approx(std::sqrt(0.5)).epsilon(1e-15));

  const Direction xz = direction_in_plane(90.0, Plane::xz);
  CHECK(xz.z == Approx(1.0).epsilon(1e-15));
  CHECK(xz.y == 0.0);

  const Direction yz = direction_in_plane(30.0, Plane::yz);
  CHECK(yz.x == 0.0);
  CHECK(yz.y == Approx(std::cos(std::acos(-1.0) / 6)).epsilon(1e-14));
  CHECK(yz.z == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("directions from angles are unit vectors at any angle") {
  for (double deg = -720.0; deg <= 720.0; deg += 7.5) {
    for (Plane p : {Plane::xy, Plane::xz, Plane::yz}) {
      CHECK(is_unit(direction_in_plane(deg, p)));
    }
  }
}

TEST_CASE("dot of coplanar directions is the cosine of the angle gap") {
  const Direction a = direction_in_plane(10.0);
  const Direction b = direction_in_plane(70.0);
  CHECK(dot(a, b) == Approx(0.5).epsilon(1e-14));
  CHECK(dot(a, a) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalized scales arbitrary vectors and rejects near-zero input") {
  const Direction d = normalized(3.0, 4.0, 0.0);
  CHECK(d.x == Approx(0.6).epsilon(1e-15));
  CHECK(d.y == Approx(0.8).epsilon(1e-15));
  CHECK(is_unit(d));
  CHECK_THROWS_AS(normalized(0.0, 0.0, 0.0), ContractError);
}

TEST_CASE("is_unit flags non-unit vectors") {
  CHECK(is_unit(Direction{1.0, 0.0, 0.0}));
  CHECK_FALSE(is_unit(Direction{1.0, 1.0, 0.0}));
  CHECK_FALSE(is_unit(Direction{0.0, 0.0, 0.0}));
}

TEST_CASE("plane names round-trip and unknown names are rejected") {
  for (Plane p : {Plane::xy, Plane::xz, Plane::yz}) {
    CHECK(plane_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(plane_from_string("xw"), ParseError);
}

TEST_CASE("default table is 0/90 against 45/135 in the xy plane") {
  const SettingTable t = default_setting_table();
  const double r = std::sqrt(0.5);
  CHECK(t.a1.x == Approx(1.0).epsilon(1e-15));
  CHECK(t.a2.y == Approx(1.0).epsilon(1e-15));
  CHECK(t.b1.x == Approx(r).epsilon(1e-15));
  CHECK(t.b1.y == Approx(r).epsilon(1e-15));
  CHECK(t.b2.x == Approx(-r).epsilon(1e-15));
  CHECK(t.b2.y == Approx(r).epsilon(1e-15));
  // Accessors name the right columns.
  CHECK(t.left(SettingLabel::one) == t.a1);
  CHECK(t.left(SettingLabel::two) == t.a2);
  CHECK(t.right(SettingLabel::one) == t.b1);
  CHECK(t.right(SettingLabel::two) == t.b2);
}

}  // TEST_SUITE
