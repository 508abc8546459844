#include "bellsim/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "bellsim/errors.hpp"

namespace bellsim {

double chi_squared_survival(double statistic, int dof) {
  if (dof < 1) throw ContractError("chi-squared dof must be positive");
  if (statistic < 0.0) throw ContractError("chi-squared statistic must be >= 0");
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

double two_proportion_z(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                        std::uint64_t n2) {
  if (n1 == 0 || n2 == 0)
    throw ContractError("two_proportion_z needs samples in both groups");
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled =
      static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  const double var = pooled * (1.0 - pooled) *
                     (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

namespace {

// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_uniformity(std::vector<double> values) {
  if (values.empty()) throw ContractError("ks_uniformity needs at least one value");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    const double hi = (static_cast<double>(i) + 1.0) / n - u;
    const double lo = u - static_cast<double>(i) / n;
    d = std::max({d, hi, lo});
  }
  const double sqrt_n = std::sqrt(n);
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  return {d, kolmogorov_tail(lambda)};
}

}  // namespace bellsim
