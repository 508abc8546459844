#pragma once

#include <cstdint>
#include <vector>

namespace bellsim {

// Upper tail of the chi-squared distribution with `dof` degrees of freedom.
double chi_squared_survival(double statistic, int dof);

// Two-sided tail probability of a standard normal at |z|.
double normal_two_sided_p(double z);

// Pooled two-proportion z statistic for successes k1/n1 vs k2/n2. Returns 0
// when the pooled variance vanishes (both proportions 0 or both 1).
double two_proportion_z(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                        std::uint64_t n2);

struct KsResult {
  double statistic = 0.0;  // sup-distance to the U(0,1) cdf
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test of `values` against U(0,1), using
// Stephens' finite-sample adjustment of the asymptotic Kolmogorov tail.
KsResult ks_uniformity(std::vector<double> values);

}  // namespace bellsim
