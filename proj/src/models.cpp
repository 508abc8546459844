#include "bellsim/models.hpp"

#include <array>
#include <cmath>
#include <cstddef>

#include "bellsim/engine.hpp"
#include "bellsim/errors.hpp"

namespace bellsim {

std::string to_string(ModelClass c) {
  switch (c) {
    case ModelClass::local_realistic: return "local_realistic";
    case ModelClass::quantum: return "quantum";
    case ModelClass::conspiracy: return "conspiracy";
    case ModelClass::signaling: return "signaling";
  }
  throw ContractError("invalid model class value");
}

ModelClass model_class_from_string(const std::string& s) {
  if (s == "local_realistic") return ModelClass::local_realistic;
  if (s == "quantum") return ModelClass::quantum;
  if (s == "conspiracy") return ModelClass::conspiracy;
  if (s == "signaling") return ModelClass::signaling;
  throw ParseError("unknown model class '" + s + "'");
}

HiddenState Model::sample_source_given_settings(RngStream&, History,
                                                SettingLabel, SettingLabel) const {
  throw ContractError("model '" + name() +
                      "' does not take settings at source time");
}

Outcome Model::measure(Wing wing, SettingLabel setting, const SettingTable&,
                       const HiddenState& state) const {
  if (!reveals_quadruple())
    throw ContractError("model '" + name() +
                        "' has no per-setting quadruple; use measure_joint");
  if (!state.revealed)
    throw ContractError("hidden state carries no quadruple");
  const Quadruple& q = *state.revealed;
  if (wing == Wing::left)
    return setting == SettingLabel::one ? q.x1 : q.x2;
  return setting == SettingLabel::one ? q.y1 : q.y2;
}

std::pair<Outcome, Outcome> Model::measure_joint(SettingLabel a, SettingLabel b,
                                                 const SettingTable& table,
                                                 const HiddenState& state,
                                                 RngStream&) const {
  return {measure(Wing::left, a, table, state),
          measure(Wing::right, b, table, state)};
}

namespace {

double param_or(const ModelDescriptor& d, const std::string& key, double fallback) {
  const auto it = d.params.find(key);
  return it == d.params.end() ? fallback : it->second;
}

void reject_unknown_params(const ModelDescriptor& d,
                           std::initializer_list<const char*> known) {
  for (const auto& [key, value] : d.params) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw ParseError("model '" + d.name + "' has no parameter '" + key + "'");
  }
}

// Quadruple drawn uniformly from all 16; no history, no structure.
class UniformLhv final : public Model {
 public:
  explicit UniformLhv(ModelDescriptor d) : Model(std::move(d)) {
    reject_unknown_params(descriptor(), {});
  }

  HiddenState sample_source(RngStream& source, History) const override {
    return {quadruple_from_index(static_cast<int>(source.next_u32() & 15u)), 0.0};
  }
};

// Deterministic source whose hidden direction drifts in the xy plane:
// phi(t) = phase0 + omega * t. Each entry of the quadruple is the sign of
// the detector direction projected onto the rotor, so the hidden variables
// at both wings vary in time while staying strictly local.
class RotatingLhv final : public Model {
 public:
  RotatingLhv(ModelDescriptor d, const SettingTable& table)
      : Model(std::move(d)), table_(table) {
    reject_unknown_params(descriptor(), {"phase0", "omega"});
    phase0_ = param_or(descriptor(), "phase0", 0.0);
    omega_ = param_or(descriptor(), "omega", kGoldenAngle);
  }

  HiddenState sample_source(RngStream& source, History) const override {
    const double two_pi = 2.0 * std::acos(-1.0);
    const double phi = std::fmod(
        phase0_ + omega_ * static_cast<double>(source.trial_index()), two_pi);
    const double cx = std::cos(phi), sx = std::sin(phi);
    const auto at = [cx, sx](const Direction& d) {
      return outcome_of_sign(d.x * cx + d.y * sx);
    };
    return {Quadruple{at(table_.a1), at(table_.a2), at(table_.b1), at(table_.b2)},
            phi};
  }

 private:
  // Golden angle in radians: irrational multiple of 2*pi, so the phase
  // equidistributes instead of locking to the trial parity.
  static constexpr double kGoldenAngle = 2.399963229728653;

  SettingTable table_;
  double phase0_ = 0.0;
  double omega_ = kGoldenAngle;
};

// Adversarial local model with memory: before each trial it replays the
// decayed history and picks the quadruple that would have scored best
// against the setting pairs seen so far (with a small bonus for reproducing
// the outcomes actually observed). Entirely history-measurable, so the
// martingale bound still applies.
class MemoryLhv final : public Model {
 public:
  explicit MemoryLhv(ModelDescriptor d) : Model(std::move(d)) {
    reject_unknown_params(descriptor(), {"decay"});
    decay_ = param_or(descriptor(), "decay", 1.0);
    if (decay_ < 0.0 || decay_ > 1.0)
      throw ParseError("memory-lhv decay must lie in [0, 1]");
  }

  bool requires_ordered_history() const override { return true; }

  HiddenState sample_source(RngStream& source, History history) const override {
    if (history.empty()) {
      memo_ = Memo{};
      return {quadruple_from_index(static_cast<int>(source.next_u32() & 15u)),
              0.0};
    }
    if (history.size() < memo_.length) memo_ = Memo{};  // fresh run, rebuild
    for (std::size_t t = memo_.length; t < history.size(); ++t) {
      for (int qi = 0; qi < 16; ++qi)
        memo_.scores[qi] = decay_ * memo_.scores[qi] +
                           replay_term(quadruple_from_index(qi), history[t]);
    }
    memo_.length = history.size();

    int best = 0;
    for (int qi = 1; qi < 16; ++qi)
      if (memo_.scores[qi] > memo_.scores[best]) best = qi;  // first max wins
    return {quadruple_from_index(best), memo_.scores[best]};
  }

 private:
  // Score the quadruple would have earned on a past trial: +4 for an
  // equality at pair (1,2), -4 for an equality elsewhere, plus 1 when it
  // reproduces the outcomes that were actually recorded.
  static double replay_term(const Quadruple& q, const TrialRecord& r) {
    const auto [x, y] = select_actual(q, r.a, r.b);
    double term = 0.0;
    if (x == y)
      term = (r.a == SettingLabel::one && r.b == SettingLabel::two) ? 4.0 : -4.0;
    if (x == r.x && y == r.y) term += 1.0;
    return term;
  }

  struct Memo {
    std::size_t length = 0;
    std::array<double, 16> scores{};
  };

  double decay_ = 1.0;
  // Incremental replay state. Safe because the engine runs memory-dependent
  // models strictly in order on one thread; a shorter history resets it.
  mutable Memo memo_;
};

// Singlet-state statistics: fair marginals on both wings and
// Pr{X = Y} = (1 - a.b) / 2 for detector directions a, b.
class Singlet final : public Model {
 public:
  explicit Singlet(ModelDescriptor d) : Model(std::move(d)) {
    reject_unknown_params(descriptor(), {});
  }

  HiddenState sample_source(RngStream&, History) const override { return {}; }

  std::pair<Outcome, Outcome> measure_joint(SettingLabel a, SettingLabel b,
                                            const SettingTable& table,
                                            const HiddenState&,
                                            RngStream& noise) const override {
    const Outcome x = noise.next_coin() ? Outcome::plus : Outcome::minus;
    const double p_equal = 0.5 * (1.0 - dot(table.left(a), table.right(b)));
    const Outcome y = noise.next_unit() < p_equal ? x : opposite(x);
    return {x, y};
  }
};

// Freedom violation: the source sees the trial's settings and, with the
// given strength, rigs the selected y-entry to agree with the selected
// x-entry exactly when the pair is (1,2) and to disagree otherwise.
class Conspiracy final : public Model {
 public:
  explicit Conspiracy(ModelDescriptor d) : Model(std::move(d)) {
    reject_unknown_params(descriptor(), {"strength"});
    strength_ = param_or(descriptor(), "strength", 1.0);
    if (strength_ < 0.0 || strength_ > 1.0)
      throw ParseError("conspiracy strength must lie in [0, 1]");
  }

  HiddenState sample_source(RngStream&, History) const override {
    throw ContractError(
        "model 'conspiracy' requires settings at source time; the engine "
        "must call sample_source_given_settings");
  }

  HiddenState sample_source_given_settings(RngStream& source, History,
                                           SettingLabel a,
                                           SettingLabel b) const override {
    Quadruple q = quadruple_from_index(static_cast<int>(source.next_u32() & 15u));
    if (source.next_unit() < strength_) {
      const Outcome xa = (a == SettingLabel::one) ? q.x1 : q.x2;
      const bool want_equal =
          (a == SettingLabel::one && b == SettingLabel::two);
      const Outcome yb = want_equal ? xa : opposite(xa);
      (b == SettingLabel::one ? q.y1 : q.y2) = yb;
    }
    return {q, 0.0};
  }

 private:
  double strength_ = 1.0;
};

// Locality violation: the left marginal shifts by `marginal_shift` whenever
// the remote wing uses setting 2, while the equality probability matches the
// singlet. With shift 0 this reproduces singlet statistics exactly.
class Signaling final : public Model {
 public:
  explicit Signaling(ModelDescriptor d) : Model(std::move(d)) {
    reject_unknown_params(descriptor(), {"marginal_shift"});
    shift_ = param_or(descriptor(), "marginal_shift", 0.1);
    if (shift_ < -0.5 || shift_ > 0.5)
      throw ParseError("signaling marginal_shift must lie in [-0.5, 0.5]");
  }

  HiddenState sample_source(RngStream&, History) const override { return {}; }

  std::pair<Outcome, Outcome> measure_joint(SettingLabel a, SettingLabel b,
                                            const SettingTable& table,
                                            const HiddenState&,
                                            RngStream& noise) const override {
    const double p_plus = 0.5 + (b == SettingLabel::two ? shift_ : 0.0);
    const Outcome x = noise.next_unit() < p_plus ? Outcome::plus : Outcome::minus;
    const double p_equal = 0.5 * (1.0 - dot(table.left(a), table.right(b)));
    const Outcome y = noise.next_unit() < p_equal ? x : opposite(x);
    return {x, y};
  }

 private:
  double shift_ = 0.1;
};

ModelDescriptor merged_descriptor(const ModelDescriptor& request,
                                  const ModelDescriptor& builtin) {
  if (!request.name.empty() && request.name != builtin.name)
    throw ContractError("descriptor name mismatch");  // unreachable by construction
  ModelDescriptor out = builtin;
  for (const auto& [key, value] : request.params) out.params[key] = value;
  return out;
}

}  // namespace

std::vector<ModelDescriptor> builtin_models() {
  return {
      {"uniform-lhv", ModelClass::local_realistic, {}},
      {"rotating-lhv",
       ModelClass::local_realistic,
       {{"phase0", 0.0}, {"omega", 2.399963229728653}}},
      {"memory-lhv", ModelClass::local_realistic, {{"decay", 1.0}}},
      {"singlet", ModelClass::quantum, {}},
      {"conspiracy", ModelClass::conspiracy, {{"strength", 1.0}}},
      {"signaling", ModelClass::signaling, {{"marginal_shift", 0.1}}},
  };
}

ModelDescriptor builtin_descriptor(const std::string& name) {
  for (ModelDescriptor& d : builtin_models())
    if (d.name == name) return std::move(d);
  throw ParseError("unknown model '" + name + "'");
}

std::unique_ptr<Model> make_model(const ModelDescriptor& desc,
                                  const SettingTable& table) {
  for (const ModelDescriptor& builtin : builtin_models()) {
    if (builtin.name != desc.name) continue;
    if (desc.cls != builtin.cls)
      throw ParseError("model '" + desc.name + "' has class " +
                       to_string(builtin.cls) + ", not " + to_string(desc.cls));
    const ModelDescriptor merged = merged_descriptor(desc, builtin);
    if (desc.name == "uniform-lhv") return std::make_unique<UniformLhv>(merged);
    if (desc.name == "rotating-lhv")
      return std::make_unique<RotatingLhv>(merged, table);
    if (desc.name == "memory-lhv") return std::make_unique<MemoryLhv>(merged);
    if (desc.name == "singlet") return std::make_unique<Singlet>(merged);
    if (desc.name == "conspiracy") return std::make_unique<Conspiracy>(merged);
    if (desc.name == "signaling") return std::make_unique<Signaling>(merged);
  }
  throw ParseError("unknown model '" + desc.name + "'");
}

}  // namespace bellsim
