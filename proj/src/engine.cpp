#include "bellsim/engine.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>

#include "bellsim/errors.hpp"

namespace bellsim {

std::string to_string(ExecutionMode m) {
  return m == ExecutionMode::parallel ? "parallel" : "sequential";
}

ExecutionMode execution_mode_from_string(const std::string& s) {
  if (s == "parallel") return ExecutionMode::parallel;
  if (s == "sequential") return ExecutionMode::sequential;
  throw ParseError("unknown execution mode '" + s + "'");
}

std::pair<SettingLabel, SettingLabel> draw_settings(RngStream& stream) {
  const SettingLabel a = stream.next_coin() ? SettingLabel::two : SettingLabel::one;
  const SettingLabel b = stream.next_coin() ? SettingLabel::two : SettingLabel::one;
  return {a, b};
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Model& model,
                      std::uint64_t index, History history) {
  RngStream source(cfg.seed, index, StreamRole::source);
  RngStream settings(cfg.seed, index, StreamRole::setting_draw);

  HiddenState state;
  SettingLabel a, b;
  if (model.cls() == ModelClass::conspiracy) {
    // The freedom violation is opt-in: only this class sees the settings
    // before the source fires.
    std::tie(a, b) = draw_settings(settings);
    state = model.sample_source_given_settings(source, history, a, b);
  } else {
    state = model.sample_source(source, history);
    std::tie(a, b) = draw_settings(settings);
  }

  Outcome x, y;
  if (model.reveals_quadruple()) {
    x = model.measure(Wing::left, a, cfg.table, state);
    y = model.measure(Wing::right, b, cfg.table, state);
  } else {
    RngStream noise(cfg.seed, index, StreamRole::measurement_noise);
    std::tie(x, y) = model.measure_joint(a, b, cfg.table, state, noise);
  }

  TrialRecord rec{index, a, b, x, y, std::nullopt, cfg.mode};
  if (cfg.reveal_hidden && model.reveals_quadruple()) rec.revealed = state.revealed;
  return rec;
}

TrialLog run_experiment(const ExperimentConfig& cfg, const Model& model,
                        Backend backend) {
  if (model.requires_ordered_history() && cfg.mode == ExecutionMode::parallel)
    throw ContractError("model '" + model.name() +
                        "' depends on history and requires sequential mode");

  TrialLog log;
  if (cfg.mode == ExecutionMode::sequential) {
    log.reserve(cfg.trials);
    for (std::uint64_t i = 0; i < cfg.trials; ++i)
      log.push_back(run_trial(cfg, model, i, History(log.data(), log.size())));
    return log;
  }

  log.resize(cfg.trials);
  const auto n = static_cast<std::int64_t>(cfg.trials);

  // A caller-supplied model may throw from inside a trial; an exception must
  // not unwind across the OpenMP region, so the first one is parked and
  // rethrown after the join.
  std::exception_ptr error;
  std::mutex error_mu;
  std::atomic<bool> failed{false};

  const auto fill = [&](std::int64_t i) noexcept {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      log[static_cast<std::size_t>(i)] =
          run_trial(cfg, model, static_cast<std::uint64_t>(i), History());
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };

  if (backend == Backend::openmp) {
    const int workers = resolve_workers(cfg.workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#else
    (void)workers;
#endif
    for (std::int64_t i = 0; i < n; ++i) fill(i);
  } else {
    // Serial reference for the OpenMP kernel; must match it bit for bit.
    for (std::int64_t i = 0; i < n; ++i) fill(i);
  }
  if (error) std::rethrow_exception(error);
  return log;
}

TrialLog run_experiment(const ExperimentConfig& cfg, Backend backend) {
  const std::unique_ptr<Model> model = make_model(cfg.model, cfg.table);
  return run_experiment(cfg, *model, backend);
}

}  // namespace bellsim
