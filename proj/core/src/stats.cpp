#include "contmech/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>

#include "contmech/error.hpp"

namespace contmech {

double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double confidence) {
  require(trials > 0, "clopper_pearson_upper: need at least one trial");
  require(successes <= trials, "clopper_pearson_upper: successes exceed trials");
  require(confidence > 0.0 && confidence < 1.0, "clopper_pearson_upper: confidence must lie in (0, 1)");
  if (successes == trials) return 1.0;
  using boost::math::binomial_distribution;
  return binomial_distribution<>::find_upper_bound_on_p(static_cast<double>(trials),
                                                        static_cast<double>(successes),
                                                        1.0 - confidence);
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Small-x form of the same series, which converges fast there.
    const double w = std::sqrt(2.0 * std::numbers::pi) / x;
    const double q = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * x * x));
    double cdf = 0.0;
    for (int j = 1; j <= 7; j += 2) cdf += std::pow(q, j * j);
    return 1.0 - w * cdf;
  }
  double sf = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sf += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: samples must be non-empty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sn = std::sqrt(ne);
  KsResult out;
  out.statistic = d;
  out.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  return out;
}

double binomial_z(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  require(n1 > 0 && n2 > 0, "binomial_z: need trials on both sides");
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double p = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return 0.0;  // both proportions are 0 or both are 1
  return (p1 - p2) / se;
}

bool binomial_agree(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2, double z_max) {
  return std::fabs(binomial_z(k1, n1, k2, n2)) <= z_max;
}

Moments moments(std::span<const double> xs) {
  require(xs.size() >= 2, "moments: need at least two samples");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  return {mean, m2 / static_cast<double>(n - 1)};
}

}  // namespace contmech
