#include "bellsim/outcomes.hpp"

#include "bellsim/errors.hpp"

namespace bellsim {

Outcome outcome_from_int(int v) {
  if (v == 1) return Outcome::plus;
  if (v == -1) return Outcome::minus;
  throw ContractError("outcome must be +1 or -1, got " + std::to_string(v));
}

SettingLabel label_from_int(int v) {
  if (v == 1) return SettingLabel::one;
  if (v == 2) return SettingLabel::two;
  throw ContractError("setting label must be 1 or 2, got " + std::to_string(v));
}

int equality_count(const Quadruple& q) {
  return (q.x1 == q.y1) + (q.x1 == q.y2) + (q.x2 == q.y1) + (q.x2 == q.y2);
}

int delta(const Quadruple& q) {
  return (q.x1 == q.y2) - (q.x1 == q.y1) - (q.x2 == q.y1) - (q.x2 == q.y2);
}

bool product_identity_holds(const Quadruple& q) {
  const int x1 = outcome_value(q.x1), x2 = outcome_value(q.x2);
  const int y1 = outcome_value(q.y1), y2 = outcome_value(q.y2);
  return x1 * y2 == (x1 * y1) * (x2 * y1) * (x2 * y2);
}

std::pair<Outcome, Outcome> select_actual(const Quadruple& q, SettingLabel a,
                                          SettingLabel b) {
  const Outcome x = (a == SettingLabel::one) ? q.x1 : q.x2;
  const Outcome y = (b == SettingLabel::one) ? q.y1 : q.y2;
  return {x, y};
}

std::array<Quadruple, 16> enumerate_quadruples() {
  std::array<Quadruple, 16> all;
  for (int idx = 0; idx < 16; ++idx) all[idx] = quadruple_from_index(idx);
  return all;
}

int quadruple_index(const Quadruple& q) {
  const auto bit = [](Outcome o) { return o == Outcome::plus ? 1 : 0; };
  return bit(q.x1) << 3 | bit(q.x2) << 2 | bit(q.y1) << 1 | bit(q.y2);
}

Quadruple quadruple_from_index(int idx) {
  if (idx < 0 || idx > 15)
    throw ContractError("quadruple index out of range: " + std::to_string(idx));
  const auto at = [idx](int bit) {
    return (idx >> bit & 1) ? Outcome::plus : Outcome::minus;
  };
  return Quadruple{at(3), at(2), at(1), at(0)};
}

}  // namespace bellsim
