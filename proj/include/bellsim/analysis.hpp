#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bellsim/engine.hpp"
#include "bellsim/geometry.hpp"
#include "bellsim/outcomes.hpp"

namespace bellsim {

// Single-pass tallies over a trial log; everything downstream (estimates,
// freedom test, no-signaling test) reads from here, so logs of any length
// can be analyzed in constant memory.
class LogAccumulator {
 public:
  void add(const TrialRecord& r);

  std::uint64_t total() const { return total_; }
  std::uint64_t revealed_total() const { return revealed_total_; }

  // All arrays are indexed by pair_index(a, b).
  const std::array<std::uint64_t, 4>& pair_counts() const { return pair_count_; }
  const std::array<std::uint64_t, 4>& equal_counts() const { return equal_count_; }
  const std::array<std::uint64_t, 4>& x_plus_counts() const { return x_plus_; }
  const std::array<std::uint64_t, 4>& y_plus_counts() const { return y_plus_; }

  // Contingency counts: setting pair x revealed quadruple index.
  const std::array<std::array<std::uint64_t, 16>, 4>& quadruple_table() const {
    return quad_table_;
  }

  std::int64_t score_sum() const { return score_sum_; }

 private:
  std::array<std::uint64_t, 4> pair_count_{}, equal_count_{}, x_plus_{}, y_plus_{};
  std::array<std::array<std::uint64_t, 16>, 4> quad_table_{};
  std::uint64_t total_ = 0, revealed_total_ = 0;
  std::int64_t score_sum_ = 0;
};

LogAccumulator accumulate(const TrialLog& log);

struct EqualityFrequencies {
  std::array<double, 4> p_hat{};          // Pr-hat{X = Y | pair}
  std::array<std::uint64_t, 4> counts{};  // trials per pair
};

// Per-pair conditional equality frequencies. Every pair must occur at least
// once; an empty cell raises ContractError naming the pair.
EqualityFrequencies conditional_equality_freqs(const LogAccumulator& acc);
EqualityFrequencies conditional_equality_freqs(const TrialLog& log);

// p12 - p11 - p21 - p22, the equality-form statistic. Non-positive in the
// large-N limit for any local realistic source with freely drawn settings.
double bell_statistic(const std::array<double, 4>& p_hat);

// Large-N value of the statistic for singlet correlations at this table:
// (a1.b2 equality prob) - ... in closed form. The default table attains
// sqrt(2) - 1.
double chsh_quantum_prediction(const SettingTable& table);

// Mean of the per-trial score +4*1{X=Y} at pair (1,2), -4*1{X=Y} otherwise.
// Its conditional expectation is non-positive for local realistic sources,
// which is what the concentration bound leans on.
double martingale_score_mean(const LogAccumulator& acc);
double martingale_score_mean(const TrialLog& log);

// One-sided deviation bound for a mean of supermartingale increments with
// range 8: eps = sqrt(32 ln(1/(1-confidence)) / n). For n = 1e6 and
// confidence 0.99 this is about 0.01214.
double concentration_bound(std::uint64_t n, double confidence);

struct BellEstimate {
  EqualityFrequencies freqs;
  double s_hat = 0.0;
  double score_mean = 0.0;
  double epsilon = 0.0;     // concentration_bound(n, confidence)
  double confidence = 0.0;
  std::uint64_t trials = 0;
  bool violation = false;   // s_hat > epsilon
};

BellEstimate estimate_bell(const LogAccumulator& acc, double confidence = 0.99);
BellEstimate estimate_bell(const TrialLog& log, double confidence = 0.99);

struct IndependenceReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  // Full 4 x 16 table (setting pair x quadruple), before any collapsing.
  std::array<std::array<std::uint64_t, 16>, 4> table{};
  int collapsed_columns = 0;  // zero-margin quadruple values dropped
};

// Chi-squared independence test of revealed quadruple vs setting pair.
// Requires a quadruple on every record. Columns with zero margin are
// collapsed away with the dof adjusted; fewer than two informative rows or
// columns is a degenerate-table error.
IndependenceReport freedom_test(const LogAccumulator& acc);
IndependenceReport freedom_test(const TrialLog& log);

struct MarginalComparison {
  Wing wing = Wing::left;
  SettingLabel local = SettingLabel::one;  // this wing's setting, held fixed
  std::uint64_t n_remote1 = 0, plus_remote1 = 0;
  std::uint64_t n_remote2 = 0, plus_remote2 = 0;
  double z = 0.0;
  double p_value = 1.0;
};

struct NoSignalingReport {
  std::array<MarginalComparison, 4> comparisons{};
  double min_p = 1.0;
  double alpha = 1e-3;
  bool rejected = false;
};

// Two-proportion z-tests of each wing's outcome marginal against the remote
// setting; under no-signaling every comparison is null.
NoSignalingReport no_signaling_test(const LogAccumulator& acc, double alpha = 1e-3);
NoSignalingReport no_signaling_test(const TrialLog& log, double alpha = 1e-3);

}  // namespace bellsim
