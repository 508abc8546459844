#include "bellsim/analysis.hpp"

#include <cmath>
#include <string>

#include "bellsim/errors.hpp"
#include "bellsim/stats.hpp"

namespace bellsim {

namespace {

std::string pair_name(int idx) {
  const int a = idx / 2 + 1, b = idx % 2 + 1;
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

void require_all_pairs(const LogAccumulator& acc) {
  for (int idx = 0; idx < 4; ++idx)
    if (acc.pair_counts()[idx] == 0)
      throw ContractError("no trials observed for setting pair " + pair_name(idx));
}

}  // namespace

void LogAccumulator::add(const TrialRecord& r) {
  const int idx = pair_index(r.a, r.b);
  ++total_;
  ++pair_count_[idx];
  const bool equal = r.x == r.y;
  if (equal) {
    ++equal_count_[idx];
    score_sum_ += idx == 1 ? 4 : -4;  // pair (1,2) scores +4, the rest -4
  }
  x_plus_[idx] += r.x == Outcome::plus;
  y_plus_[idx] += r.y == Outcome::plus;
  if (r.revealed) {
    ++revealed_total_;
    ++quad_table_[idx][quadruple_index(*r.revealed)];
  }
}

LogAccumulator accumulate(const TrialLog& log) {
  LogAccumulator acc;
  for (const TrialRecord& r : log) acc.add(r);
  return acc;
}

EqualityFrequencies conditional_equality_freqs(const LogAccumulator& acc) {
  require_all_pairs(acc);
  EqualityFrequencies out;
  for (int idx = 0; idx < 4; ++idx) {
    out.counts[idx] = acc.pair_counts()[idx];
    out.p_hat[idx] = static_cast<double>(acc.equal_counts()[idx]) /
                     static_cast<double>(acc.pair_counts()[idx]);
  }
  return out;
}

EqualityFrequencies conditional_equality_freqs(const TrialLog& log) {
  return conditional_equality_freqs(accumulate(log));
}

double bell_statistic(const std::array<double, 4>& p_hat) {
  return p_hat[1] - p_hat[0] - p_hat[2] - p_hat[3];
}

double chsh_quantum_prediction(const SettingTable& table) {
  // Pr{X=Y} = (1 - a.b)/2 per pair; substituting into the statistic gives
  // (c11 + c21 + c22 - c12 - 2) / 2 with c_ij = a_i . b_j.
  const double c11 = dot(table.a1, table.b1);
  const double c12 = dot(table.a1, table.b2);
  const double c21 = dot(table.a2, table.b1);
  const double c22 = dot(table.a2, table.b2);
  return 0.5 * (c11 + c21 + c22 - c12 - 2.0);
}

double martingale_score_mean(const LogAccumulator& acc) {
  if (acc.total() == 0) throw ContractError("log is empty");
  return static_cast<double>(acc.score_sum()) / static_cast<double>(acc.total());
}

double martingale_score_mean(const TrialLog& log) {
  return martingale_score_mean(accumulate(log));
}

double concentration_bound(std::uint64_t n, double confidence) {
  if (n == 0) throw ContractError("concentration bound needs n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ContractError("confidence must lie strictly between 0 and 1");
  return std::sqrt(32.0 * std::log(1.0 / (1.0 - confidence)) /
                   static_cast<double>(n));
}

BellEstimate estimate_bell(const LogAccumulator& acc, double confidence) {
  BellEstimate est;
  est.freqs = conditional_equality_freqs(acc);
  est.s_hat = bell_statistic(est.freqs.p_hat);
  est.score_mean = martingale_score_mean(acc);
  est.trials = acc.total();
  est.confidence = confidence;
  est.epsilon = concentration_bound(acc.total(), confidence);
  est.violation = est.s_hat > est.epsilon;
  return est;
}

BellEstimate estimate_bell(const TrialLog& log, double confidence) {
  return estimate_bell(accumulate(log), confidence);
}

IndependenceReport freedom_test(const LogAccumulator& acc) {
  if (acc.total() == 0) throw ContractError("log is empty");
  if (acc.revealed_total() != acc.total())
    throw ContractError(
        "freedom test needs a revealed quadruple on every record; " +
        std::to_string(acc.total() - acc.revealed_total()) + " of " +
        std::to_string(acc.total()) + " lack one");

  IndependenceReport rep;
  rep.table = acc.quadruple_table();

  std::array<std::uint64_t, 4> row_total{};
  std::array<std::uint64_t, 16> col_total{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 16; ++c) {
      row_total[r] += rep.table[r][c];
      col_total[c] += rep.table[r][c];
    }

  int rows = 0, cols = 0;
  for (const auto rt : row_total) rows += rt > 0;
  for (const auto ct : col_total) cols += ct > 0;
  if (rows < 2)
    throw ContractError("degenerate contingency table: one setting pair present");
  if (cols < 2)
    throw ContractError("degenerate contingency table: one quadruple value present");
  rep.collapsed_columns = 16 - cols;

  const double n = static_cast<double>(acc.total());
  double stat = 0.0;
  for (int r = 0; r < 4; ++r) {
    if (row_total[r] == 0) continue;
    for (int c = 0; c < 16; ++c) {
      if (col_total[c] == 0) continue;
      const double expected = static_cast<double>(row_total[r]) *
                              static_cast<double>(col_total[c]) / n;
      const double diff = static_cast<double>(rep.table[r][c]) - expected;
      stat += diff * diff / expected;
    }
  }
  rep.statistic = stat;
  rep.dof = (rows - 1) * (cols - 1);
  rep.p_value = chi_squared_survival(stat, rep.dof);
  return rep;
}

IndependenceReport freedom_test(const TrialLog& log) {
  return freedom_test(accumulate(log));
}

NoSignalingReport no_signaling_test(const LogAccumulator& acc, double alpha) {
  require_all_pairs(acc);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ContractError("alpha must lie strictly between 0 and 1");

  NoSignalingReport rep;
  rep.alpha = alpha;
  int out = 0;
  for (const Wing wing : {Wing::left, Wing::right}) {
    const auto& plus = wing == Wing::left ? acc.x_plus_counts() : acc.y_plus_counts();
    for (const SettingLabel local : {SettingLabel::one, SettingLabel::two}) {
      // Cells where this wing used `local` while the remote wing used 1 vs 2.
      const int i1 = wing == Wing::left ? pair_index(local, SettingLabel::one)
                                        : pair_index(SettingLabel::one, local);
      const int i2 = wing == Wing::left ? pair_index(local, SettingLabel::two)
                                        : pair_index(SettingLabel::two, local);
      MarginalComparison cmp;
      cmp.wing = wing;
      cmp.local = local;
      cmp.n_remote1 = acc.pair_counts()[i1];
      cmp.plus_remote1 = plus[i1];
      cmp.n_remote2 = acc.pair_counts()[i2];
      cmp.plus_remote2 = plus[i2];
      cmp.z = two_proportion_z(cmp.plus_remote1, cmp.n_remote1,
                               cmp.plus_remote2, cmp.n_remote2);
      cmp.p_value = normal_two_sided_p(cmp.z);
      rep.min_p = std::min(rep.min_p, cmp.p_value);
      rep.comparisons[out++] = cmp;
    }
  }
  // The verdict controls the per-log false-alarm rate: the four comparisons
  // share the alpha budget, so a clean source trips the report with
  // probability at most alpha regardless of which comparison fluctuates.
  rep.rejected = rep.min_p < alpha / static_cast<double>(rep.comparisons.size());
  return rep;
}

NoSignalingReport no_signaling_test(const TrialLog& log, double alpha) {
  return no_signaling_test(accumulate(log), alpha);
}

}  // namespace bellsim
