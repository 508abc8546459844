#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellsim/geometry.hpp"
#include "bellsim/outcomes.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

struct TrialRecord;  // engine.hpp

// Past trials visible to a source at sampling time, in trial order.
using History = std::span<const TrialRecord>;

enum class ModelClass { local_realistic, quantum, conspiracy, signaling };

std::string to_string(ModelClass c);
ModelClass model_class_from_string(const std::string& s);

struct ModelDescriptor {
  std::string name;
  ModelClass cls = ModelClass::local_realistic;
  std::map<std::string, double> params;
};

// What the source hands to the detectors for one trial. `revealed` holds the
// potential-outcome quadruple and is present exactly for quadruple-revealing
// classes (local_realistic, conspiracy). `payload` is model-private scratch
// (e.g. the rotating model's phase); nothing downstream inspects it.
struct HiddenState {
  std::optional<Quadruple> revealed;
  double payload = 0.0;
};

// A source/detector pair. Instances are immutable after construction and may
// be shared across workers: sampling reads only the explicit rng stream and
// history arguments. The one exception is an internal memo in the
// memory-dependent model, which the engine confines to the strictly ordered
// sequential mode.
class Model {
 public:
  explicit Model(ModelDescriptor d) : desc_(std::move(d)) {}
  virtual ~Model() = default;

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelDescriptor& descriptor() const { return desc_; }
  const std::string& name() const { return desc_.name; }
  ModelClass cls() const { return desc_.cls; }

  // Quadruple-revealing classes expose per-setting potential outcomes.
  bool reveals_quadruple() const {
    return desc_.cls == ModelClass::local_realistic ||
           desc_.cls == ModelClass::conspiracy;
  }

  // True when sampling reads the history; the engine then rejects the
  // parallel execution mode.
  virtual bool requires_ordered_history() const { return false; }

  // Draws the hidden state for one trial. The current trial's settings are
  // not an argument: the source cannot see them. Conspiracy-class models
  // throw here and implement sample_source_given_settings instead.
  virtual HiddenState sample_source(RngStream& source, History history) const = 0;

  // Settings-aware sampling, the deliberate freedom violation. Only
  // conspiracy-class models implement it; every other class throws.
  virtual HiddenState sample_source_given_settings(RngStream& source,
                                                   History history,
                                                   SettingLabel a,
                                                   SettingLabel b) const;

  // Deterministic readout of one wing from a revealed quadruple. Throws for
  // classes without quadruples (quantum, signaling); use measure_joint there.
  virtual Outcome measure(Wing wing, SettingLabel setting,
                          const SettingTable& table,
                          const HiddenState& state) const;

  // Joint readout of both wings. For quadruple-revealing classes this is
  // definitionally (measure(left,a), measure(right,b)); quantum and
  // signaling classes override it and may consume detector noise.
  virtual std::pair<Outcome, Outcome> measure_joint(SettingLabel a,
                                                    SettingLabel b,
                                                    const SettingTable& table,
                                                    const HiddenState& state,
                                                    RngStream& noise) const;

 private:
  ModelDescriptor desc_;
};

// Instantiates a built-in model by descriptor name, merging params over the
// built-in defaults. Unknown names or parameter keys raise ParseError; the
// class, when specified, must match the built-in's class.
std::unique_ptr<Model> make_model(const ModelDescriptor& desc,
                                  const SettingTable& table);

// Descriptor of one built-in model with its default class and parameters;
// the intended starting point when overriding params in code.
ModelDescriptor builtin_descriptor(const std::string& name);

// Descriptors of the built-in model family with default parameters:
//   uniform-lhv    local_realistic  quadruple uniform over all 16
//   rotating-lhv   local_realistic  deterministic drifting-phase source
//   memory-lhv     local_realistic  best-response to decayed history
//   singlet        quantum          Pr{X=Y} = (1 - a.b)/2, fair marginals
//   conspiracy     conspiracy       settings leak into the source
//   signaling      signaling        remote setting shifts a marginal
std::vector<ModelDescriptor> builtin_models();

}  // namespace bellsim
