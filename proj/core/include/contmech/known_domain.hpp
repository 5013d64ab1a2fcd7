#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "contmech/histogram.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

// A known item universe. Labels are kept sorted, so index order is the
// lexicographic tie-break order used everywhere.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Label> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const Label& label(std::size_t i) const { return labels_.at(i); }
  std::uint64_t key(std::size_t i) const { return keys_.at(i); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> find(const Label& label) const;
  std::size_t index(const Label& label) const;  // throws UsageError if absent

 private:
  std::vector<Label> labels_;
  std::vector<std::uint64_t> keys_;
  std::unordered_map<Label, std::size_t> index_;
};

// Every label gets count + N(0, tau^2). Output follows label order.
NoisyRelease known_gauss(const LabeledHistogram& h, double tau, const NoiseSource& src);

// Gumbel-max selection at scale tau/2. Ties on the noisy value go to the
// smaller index.
std::vector<std::size_t> gumbel_topk_indices(std::span<const Count> counts, const Domain& domain,
                                             int k, double tau, const NoiseSource& src);

// Labels only, in selection order.
std::vector<Label> known_gumbel_select(const LabeledHistogram& h, int k, double tau,
                                       const NoiseSource& src);

// Selected labels in selection order, each with a fresh N(count, tau^2).
NoisyRelease known_gumbel_topk(const LabeledHistogram& h, int k, double tau,
                               const NoiseSource& src);

// One binary-tree counter per domain item; releases the whole domain each round.
class KnownBase {
 public:
  KnownBase(Domain domain, const TreeParams& params, int delta0, NoiseSource src);

  NoisyRelease step(const Event& event);
  // Same as step() with items given by domain index; returns noisy counts by index.
  const std::vector<double>& step_indices(std::span<const std::size_t> items);

  const std::vector<double>& noisy_counts() const noexcept { return noisy_; }
  const Domain& domain() const noexcept { return domain_; }
  std::int64_t t() const noexcept { return t_; }

 private:
  Domain domain_;
  int delta0_;
  std::int64_t t_ = 0;
  std::vector<TreeCounter> counters_;
  std::vector<std::uint8_t> bits_;
  std::vector<double> noisy_;
};

ReleaseSequence known_base(const EventStream& stream, const Domain& domain,
                           const TreeParams& params, int delta0, const NoiseSource& src);

// The k entries with the largest noisy value (label tie-break).
NoisyRelease top_k_view(const NoisyRelease& release, int k);

}  // namespace contmech
