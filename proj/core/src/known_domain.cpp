#include "contmech/known_domain.hpp"

#include <algorithm>
#include <numeric>

#include "contmech/error.hpp"

namespace contmech {

Domain::Domain(std::vector<Label> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  require(std::adjacent_find(labels_.begin(), labels_.end()) == labels_.end(),
          "domain contains a duplicate label");
  keys_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    keys_.push_back(label_key(labels_[i]));
    index_.emplace(labels_[i], i);
  }
}

std::optional<std::size_t> Domain::find(const Label& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Domain::index(const Label& label) const {
  auto i = find(label);
  require(i.has_value(), "item outside the known domain: " + label);
  return *i;
}

NoisyRelease known_gauss(const LabeledHistogram& h, double tau, const NoiseSource& src) {
  NoisyRelease out;
  out.entries.reserve(h.size());
  for (const auto& [label, c] : h)
    out.entries.push_back(
        {label, static_cast<double>(c) + src.gaussian({tag::kKnownGauss, label_key(label)}, tau)});
  return out;
}

std::vector<std::size_t> gumbel_topk_indices(std::span<const Count> counts, const Domain& domain,
                                             int k, double tau, const NoiseSource& src) {
  require(counts.size() == domain.size(), "gumbel_topk: counts do not match the domain");
  require(k >= 1 && static_cast<std::size_t>(k) <= domain.size(), "gumbel_topk: k exceeds the domain size");
  std::vector<double> v(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    v[i] = static_cast<double>(counts[i]) + src.gumbel({tag::kGumbelSelect, domain.key(i)}, tau / 2.0);
  std::vector<std::size_t> idx(counts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) { return v[a] != v[b] ? v[a] > v[b] : a < b; };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), better);
  idx.resize(k);
  return idx;
}

namespace {

std::pair<Domain, std::vector<Count>> as_domain(const LabeledHistogram& h) {
  std::vector<Label> labels;
  std::vector<Count> counts;
  for (const auto& [label, c] : h) {
    labels.push_back(label);
    counts.push_back(c);
  }
  return {Domain(std::move(labels)), std::move(counts)};
}

}  // namespace

std::vector<Label> known_gumbel_select(const LabeledHistogram& h, int k, double tau,
                                       const NoiseSource& src) {
  auto [domain, counts] = as_domain(h);
  std::vector<Label> out;
  for (std::size_t i : gumbel_topk_indices(counts, domain, k, tau, src)) out.push_back(domain.label(i));
  return out;
}

NoisyRelease known_gumbel_topk(const LabeledHistogram& h, int k, double tau,
                               const NoiseSource& src) {
  NoisyRelease out;
  for (const auto& label : known_gumbel_select(h, k, tau, src))
    out.entries.push_back(
        {label, static_cast<double>(h.get(label)) + src.gaussian({tag::kGumbelCount, label_key(label)}, tau)});
  return out;
}

KnownBase::KnownBase(Domain domain, const TreeParams& params, int delta0, NoiseSource src)
    : domain_(std::move(domain)), delta0_(delta0) {
  require(delta0 >= 1, "KnownBase: delta0 must be at least 1");
  require(domain_.size() > 0, "KnownBase: empty domain");
  counters_.reserve(domain_.size());
  for (std::size_t i = 0; i < domain_.size(); ++i)
    counters_.emplace_back(params, src, TreeKey{tag::kTree, domain_.key(i)});
  bits_.assign(domain_.size(), 0);
  noisy_.assign(domain_.size(), 0.0);
}

const std::vector<double>& KnownBase::step_indices(std::span<const std::size_t> items) {
  require(static_cast<int>(items.size()) <= delta0_, "event has more than delta0 items");
  std::fill(bits_.begin(), bits_.end(), 0);
  for (std::size_t i : items) {
    require(i < domain_.size(), "item index outside the domain");
    require(bits_[i] == 0, "event contains a duplicate item");
    bits_[i] = 1;
  }
  for (std::size_t i = 0; i < counters_.size(); ++i) noisy_[i] = counters_[i].step(bits_[i] != 0);
  ++t_;
  return noisy_;
}

NoisyRelease KnownBase::step(const Event& event) {
  check_event(event, delta0_);
  std::vector<std::size_t> items;
  items.reserve(event.size());
  for (const auto& label : event) items.push_back(domain_.index(label));
  step_indices(items);
  NoisyRelease out;
  out.entries.reserve(domain_.size());
  for (std::size_t i = 0; i < domain_.size(); ++i) out.entries.push_back({domain_.label(i), noisy_[i]});
  return out;
}

ReleaseSequence known_base(const EventStream& stream, const Domain& domain,
                           const TreeParams& params, int delta0, const NoiseSource& src) {
  require(static_cast<std::int64_t>(stream.size()) <= params.T, "known_base: stream longer than T");
  KnownBase mech(domain, params, delta0, src);
  ReleaseSequence out;
  out.reserve(stream.size());
  for (const auto& event : stream) out.push_back(mech.step(event));
  return out;
}

NoisyRelease top_k_view(const NoisyRelease& release, int k) {
  require(k >= 0, "top_k_view: k must be non-negative");
  NoisyRelease out = release;
  sort_descending(out.entries);
  if (out.entries.size() > static_cast<std::size_t>(k)) out.entries.resize(k);
  return out;
}

}  // namespace contmech
