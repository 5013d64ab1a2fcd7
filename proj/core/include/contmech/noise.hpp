#pragma once

#include <cstdint>
#include <string_view>

namespace contmech {

// Key of a single noise draw. Two draws with the same seed and key are
// identical; draws under distinct keys are independent.
struct StreamId {
  std::uint64_t mechanism = 0;
  std::uint64_t item = 0;
  std::uint64_t level = 0;
  std::uint64_t cell = 0;
};

// Mechanism tags used as StreamId::mechanism.
namespace tag {
inline constexpr std::uint64_t kTree = 1;
inline constexpr std::uint64_t kKnownGauss = 2;
inline constexpr std::uint64_t kGumbelSelect = 3;
inline constexpr std::uint64_t kGumbelCount = 4;
inline constexpr std::uint64_t kUnkGaussItem = 5;
inline constexpr std::uint64_t kUnkGaussBottom = 6;
inline constexpr std::uint64_t kUnkGumbelBottom = 7;
inline constexpr std::uint64_t kUnkBase = 8;
inline constexpr std::uint64_t kSvtThreshold = 9;
inline constexpr std::uint64_t kSvtQuery = 10;
inline constexpr std::uint64_t kStream = 11;
inline constexpr std::uint64_t kOracle = 12;
}  // namespace tag

// FNV-1a 64 of a label; used as StreamId::item.
std::uint64_t label_key(std::string_view label) noexcept;

// Counter-based sampler. Stateless apart from the seed, so it is safe to
// share across threads and to recompute a draw instead of storing it.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent child source, e.g. one per Monte Carlo trial or table cell.
  NoiseSource fork(std::uint64_t a, std::uint64_t b = 0) const noexcept;

  std::uint64_t bits(const StreamId& id, std::uint64_t lane = 0) const noexcept;
  // Uniform on the open interval (0, 1).
  double uniform(const StreamId& id, std::uint64_t lane = 0) const noexcept;

  // Each returns exactly 0 when the scale is 0. Negative scales throw.
  double gaussian(const StreamId& id, double sigma) const;
  double laplace(const StreamId& id, double scale) const;
  double gumbel(const StreamId& id, double scale) const;

 private:
  std::uint64_t seed_;
};

// Standard normal CDF.
double normal_cdf(double x) noexcept;
// Inverse of normal_cdf (Wichura AS241). Throws UsageError unless 0 < p < 1.
double normal_quantile(double p);
// normal_quantile(1 - q) without the cancellation in 1 - q.
double normal_upper_quantile(double q);

}  // namespace contmech
