#include "contmech/meta_algo.hpp"

#include <cmath>

#include "contmech/error.hpp"
#include "contmech/unknown_oneshot.hpp"

namespace contmech {

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::KnownRestricted: return "kr";
    case Quadrant::KnownUnrestricted: return "ku";
    case Quadrant::UnknownRestricted: return "ur";
    case Quadrant::UnknownUnrestricted: return "uu";
  }
  return "?";
}

Quadrant parse_quadrant(std::string_view name) {
  if (name == "kr") return Quadrant::KnownRestricted;
  if (name == "ku") return Quadrant::KnownUnrestricted;
  if (name == "ur") return Quadrant::UnknownRestricted;
  if (name == "uu") return Quadrant::UnknownUnrestricted;
  throw UsageError("unknown quadrant '" + std::string(name) + "' (expected kr, ku, ur or uu)");
}

namespace {

bool known(Quadrant q) { return q == Quadrant::KnownRestricted || q == Quadrant::KnownUnrestricted; }
bool restricted(Quadrant q) { return q == Quadrant::KnownRestricted || q == Quadrant::UnknownRestricted; }

}  // namespace

void MetaConfig::validate() const {
  require(tree.tau >= 0.0, "meta: tau must be non-negative");
  if (known(quadrant)) {
    require(!domain.empty(), "meta: known quadrants need a domain");
  } else {
    require(domain.empty(), "meta: unknown quadrants take no domain");
    require(delta > 0.0 && delta < 1.0, "meta: delta must lie in (0, 1)");
    require(k_bar >= 1, "meta: k_bar must be at least 1");
  }
  if (restricted(quadrant)) require(delta0 >= 1, "meta: delta0 must be at least 1");
  if (quadrant == Quadrant::KnownUnrestricted)
    require(k >= 1 && static_cast<std::size_t>(k) <= domain.size(), "meta: k must lie in [1, d]");
  if (quadrant == Quadrant::UnknownUnrestricted)
    require(k >= 1 && k <= k_bar, "meta: k must lie in [1, k_bar]");
}

MetaAlgo::MetaAlgo(EventStream stream, MetaConfig config, NoiseSource src)
    : stream_(std::move(stream)), config_(std::move(config)), src_(src) {
  config_.validate();
  require(static_cast<std::int64_t>(stream_.size()) <= config_.tree.T, "meta: stream longer than T");
  if (known(config_.quadrant)) domain_ = Domain(config_.domain);
  for (const auto& event : stream_) {
    if (restricted(config_.quadrant)) {
      check_event(event, config_.delta0);
    } else {
      check_event(event, static_cast<int>(event.size()) + 1);
    }
    if (known(config_.quadrant))
      for (const auto& label : event) domain_.index(label);
  }
  const int L = config_.tree.levels();
  cell_tau_ = std::sqrt(static_cast<double>(L)) * config_.tree.tau;
  cell_delta_ = config_.delta / L;
}

const LabeledHistogram& MetaAlgo::cell_histogram(const Cell& c) {
  auto it = histograms_.find(c);
  if (it != histograms_.end()) return it->second;
  const auto [first, last] = cell_interval(c, config_.tree.r);
  require(last <= static_cast<std::int64_t>(stream_.size()), "meta: cell extends past the stream");
  LabeledHistogram h;
  if (known(config_.quadrant))
    for (const auto& label : domain_.labels()) h.set(label, 0);
  for (std::int64_t t = first; t <= last; ++t)
    for (const auto& label : stream_[static_cast<std::size_t>(t - 1)]) h.add(label);
  return histograms_.emplace(c, std::move(h)).first->second;
}

const NoisyRelease& MetaAlgo::cell_release(const Cell& c) {
  auto it = releases_.find(c);
  if (it != releases_.end()) return it->second;
  const LabeledHistogram& h = cell_histogram(c);
  const NoiseSource cell_src = src_.fork(static_cast<std::uint64_t>(c.level),
                                         static_cast<std::uint64_t>(c.index));
  NoisyRelease rel;
  switch (config_.quadrant) {
    case Quadrant::KnownRestricted:
      rel = known_gauss(h, cell_tau_, cell_src);
      break;
    case Quadrant::KnownUnrestricted:
      rel = known_gumbel_topk(h, config_.k, cell_tau_, cell_src);
      break;
    case Quadrant::UnknownRestricted:
      rel = unk_gauss(LimitedHistogram::from_histogram(h, config_.k_bar), cell_tau_, cell_delta_, cell_src);
      break;
    case Quadrant::UnknownUnrestricted:
      rel = unk_gumbel(LimitedHistogram::from_histogram(h, config_.k_bar), config_.k, cell_tau_,
                       cell_delta_, cell_src);
      break;
  }
  return releases_.emplace(c, std::move(rel)).first->second;
}

NoisyRelease MetaAlgo::round(std::int64_t t) {
  require(t >= 1 && t <= static_cast<std::int64_t>(stream_.size()), "meta: round out of range");
  std::map<Label, double> sums;
  for (const Cell& c : decompose(t, config_.tree.r).cells)
    for (const auto& e : cell_release(c).entries) sums[e.label] += e.value;
  NoisyRelease out;
  out.entries.reserve(sums.size());
  for (auto& [label, v] : sums) out.entries.push_back({label, v});
  return out;
}

ReleaseSequence meta_run(const EventStream& stream, const MetaConfig& config, const NoiseSource& src) {
  MetaAlgo meta(stream, config, src);
  ReleaseSequence out;
  out.reserve(stream.size());
  for (std::int64_t t = 1; t <= static_cast<std::int64_t>(stream.size()); ++t)
    out.push_back(meta.round(t));
  return out;
}

}  // namespace contmech
