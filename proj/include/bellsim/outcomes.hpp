#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace bellsim {

// A binary measurement outcome, exactly +1 or -1. Integer-valued so equality
// tests and products are exact.
enum class Outcome : std::int8_t { minus = -1, plus = +1 };

constexpr int outcome_value(Outcome o) { return static_cast<int>(o); }

constexpr Outcome opposite(Outcome o) {
  return o == Outcome::plus ? Outcome::minus : Outcome::plus;
}

// sign(0) := +1 keeps threshold detectors total when a dot product lands
// exactly on the boundary.
constexpr Outcome outcome_of_sign(double s) {
  return s < 0.0 ? Outcome::minus : Outcome::plus;
}

// Validating conversion for deserialization; accepts exactly +1 / -1.
Outcome outcome_from_int(int v);

// Label of a detector setting. Each wing has exactly two.
enum class SettingLabel : std::uint8_t { one = 1, two = 2 };

constexpr int label_value(SettingLabel s) { return static_cast<int>(s); }
constexpr int label_index(SettingLabel s) { return static_cast<int>(s) - 1; }

SettingLabel label_from_int(int v);

// Row-major position of a setting pair: (1,1) (1,2) (2,1) (2,2) -> 0..3.
constexpr int pair_index(SettingLabel a, SettingLabel b) {
  return label_index(a) * 2 + label_index(b);
}

// Side of the apparatus a detector sits on.
enum class Wing : std::uint8_t { left, right };

// The four potential outcomes (X1, X2, Y1, Y2) of a single trial: what each
// wing would show under either of its settings. Field order (x1, x2, y1, y2)
// is fixed in every serialization.
struct Quadruple {
  Outcome x1, x2, y1, y2;

  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

// Number of equal pairs among (X1,Y1) (X1,Y2) (X2,Y1) (X2,Y2).
// Always 0, 2 or 4: flipping any single entry toggles exactly two pairs.
int equality_count(const Quadruple& q);

// 1{X1=Y2} - 1{X1=Y1} - 1{X2=Y1} - 1{X2=Y2}. Takes only the values 0 and -2.
int delta(const Quadruple& q);

// X1*Y2 == (X1*Y1)(X2*Y1)(X2*Y2). Holds identically: X2 and Y1 square away.
bool product_identity_holds(const Quadruple& q);

// The (x, y) actually observed when settings (a, b) are in force.
std::pair<Outcome, Outcome> select_actual(const Quadruple& q, SettingLabel a,
                                          SettingLabel b);

// All 16 quadruples, ordered by quadruple_index.
std::array<Quadruple, 16> enumerate_quadruples();

// Bit-packed enumeration position: bits x1 x2 y1 y2 from the high end,
// plus = 1. Inverse of quadruple_from_index.
int quadruple_index(const Quadruple& q);
Quadruple quadruple_from_index(int idx);

}  // namespace bellsim
