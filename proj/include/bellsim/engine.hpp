#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bellsim/geometry.hpp"
#include "bellsim/models.hpp"
#include "bellsim/outcomes.hpp"
#include "bellsim/parallel.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

// parallel: trials are exchangeable and generated from per-index streams, so
// any worker layout yields the same log. sequential: trials run strictly in
// order and each source call sees the full prior history.
enum class ExecutionMode { parallel, sequential };

std::string to_string(ExecutionMode m);
ExecutionMode execution_mode_from_string(const std::string& s);

struct TrialRecord {
  std::uint64_t index = 0;
  SettingLabel a = SettingLabel::one;
  SettingLabel b = SettingLabel::one;
  Outcome x = Outcome::plus;
  Outcome y = Outcome::plus;
  std::optional<Quadruple> revealed;  // present when hidden data was kept
  ExecutionMode mode = ExecutionMode::parallel;
};

using TrialLog = std::vector<TrialRecord>;

struct ExperimentConfig {
  ModelDescriptor model;
  SettingTable table = default_setting_table();
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  ExecutionMode mode = ExecutionMode::parallel;
  // Keep the source's quadruple in the record. Honored only for
  // quadruple-revealing model classes; ignored otherwise.
  bool reveal_hidden = false;
  int workers = 0;  // 0 = resolve from environment / machine
};

// Fair independent coins for both wings; every pair has probability 1/4.
std::pair<SettingLabel, SettingLabel> draw_settings(RngStream& stream);

// One complete trial: sample the source, draw the settings, read the
// detectors. Settings are drawn after the source call, and on a counter
// stream the source never touches; only conspiracy-class models receive
// them at sampling time, through sample_source_given_settings.
TrialRecord run_trial(const ExperimentConfig& cfg, const Model& model,
                      std::uint64_t index, History history);

// Full run. Rejects memory-dependent models in parallel mode. The OpenMP
// backend partitions trials over workers; results are bit-identical to the
// serial reference at any worker count.
TrialLog run_experiment(const ExperimentConfig& cfg,
                        Backend backend = Backend::openmp);

// As above but with a caller-supplied model instance.
TrialLog run_experiment(const ExperimentConfig& cfg, const Model& model,
                        Backend backend = Backend::openmp);

}  // namespace bellsim
