#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace contmech {

// One-sided Clopper-Pearson upper confidence bound on a binomial proportion.
double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;    // asymptotic Kolmogorov distribution
};

// Two-sample Kolmogorov-Smirnov test. Samples are copied and sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

// Pooled two-proportion z statistic.
double binomial_z(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);
// |binomial_z| <= z_max.
bool binomial_agree(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2,
                    double z_max = 3.0);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments moments(std::span<const double> xs);

}  // namespace contmech
