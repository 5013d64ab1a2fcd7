#include "contmech/noise.hpp"

#include <cmath>
#include <numbers>

#include "contmech/error.hpp"

namespace contmech {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t w) noexcept {
  return splitmix64(h ^ w);
}

}  // namespace

std::uint64_t label_key(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

NoiseSource NoiseSource::fork(std::uint64_t a, std::uint64_t b) const noexcept {
  std::uint64_t h = absorb(splitmix64(seed_ ^ 0x5bd1e9955bd1e995ULL), a);
  return NoiseSource(absorb(h, b));
}

std::uint64_t NoiseSource::bits(const StreamId& id, std::uint64_t lane) const noexcept {
  std::uint64_t h = splitmix64(seed_);
  h = absorb(h, id.mechanism);
  h = absorb(h, id.item);
  h = absorb(h, id.level);
  h = absorb(h, id.cell);
  return absorb(h, lane);
}

double NoiseSource::uniform(const StreamId& id, std::uint64_t lane) const noexcept {
  return (static_cast<double>(bits(id, lane) >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSource::gaussian(const StreamId& id, double sigma) const {
  require(sigma >= 0.0, "gaussian: sigma must be non-negative");
  if (sigma == 0.0) return 0.0;
  const double u1 = uniform(id, 0);
  const double u2 = uniform(id, 1);
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double NoiseSource::laplace(const StreamId& id, double scale) const {
  require(scale >= 0.0, "laplace: scale must be non-negative");
  if (scale == 0.0) return 0.0;
  const double x = uniform(id) - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::fabs(x));
  return x < 0.0 ? -mag : mag;
}

double NoiseSource::gumbel(const StreamId& id, double scale) const {
  require(scale >= 0.0, "gumbel: scale must be non-negative");
  if (scale == 0.0) return 0.0;
  return -scale * std::log(-std::log(uniform(id)));
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");
  // Wichura (1988), AS241 PPND16.
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double normal_upper_quantile(double q) {
  require(q > 0.0 && q < 1.0, "normal_upper_quantile: q must lie in (0, 1)");
  return -normal_quantile(q);
}

}  // namespace contmech
