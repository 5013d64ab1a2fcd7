#include "contmech/unknown_oneshot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contmech/error.hpp"

namespace contmech {

LimitedHistogram::LimitedHistogram(std::vector<std::pair<Label, Count>> top, int k_bar)
    : top_(std::move(top)), k_bar_(k_bar) {
  require(k_bar >= 1, "LimitedHistogram: k_bar must be at least 1");
  require(top_.size() <= static_cast<std::size_t>(k_bar) + 1, "LimitedHistogram: more than k_bar+1 entries");
  for (std::size_t i = 0; i < top_.size(); ++i) {
    require(top_[i].second > 0, "LimitedHistogram: counts must be positive");
    require(i == 0 || top_[i - 1].second >= top_[i].second, "LimitedHistogram: counts must be descending");
  }
}

LimitedHistogram LimitedHistogram::from_histogram(const LabeledHistogram& h, int k_bar) {
  require(k_bar >= 1, "LimitedHistogram: k_bar must be at least 1");
  std::vector<std::pair<Label, Count>> top;
  for (auto& entry : h.ranked()) {
    if (entry.second <= 0 || top.size() == static_cast<std::size_t>(k_bar) + 1) break;
    top.push_back(std::move(entry));
  }
  return LimitedHistogram(std::move(top), k_bar);
}

Count LimitedHistogram::cutoff_count() const noexcept {
  return top_.size() == static_cast<std::size_t>(k_bar_) + 1 ? top_.back().second : 0;
}

double unk_gauss_threshold(Count cutoff, double tau, double delta) {
  require(delta > 0.0 && delta < 1.0, "unk_gauss: delta must lie in (0, 1)");
  require(tau >= 0.0, "unk_gauss: tau must be non-negative");
  return static_cast<double>(cutoff) + 1.0 + std::numbers::sqrt2 * tau * normal_upper_quantile(delta);
}

double unk_gumbel_threshold(Count cutoff, double tau, double delta) {
  require(delta > 0.0 && delta < 1.0, "unk_gumbel: delta must lie in (0, 1)");
  require(tau >= 0.0, "unk_gumbel: tau must be non-negative");
  return static_cast<double>(cutoff) + 1.0 + tau * std::log(1.0 / delta);
}

NoisyRelease unk_gauss(const LimitedHistogram& h, double tau, double delta, const NoiseSource& src) {
  const double v_bot =
      unk_gauss_threshold(h.cutoff_count(), tau, delta) + src.gaussian({tag::kUnkGaussBottom}, tau);
  NoisyRelease out;
  out.threshold = v_bot;
  const std::size_t n = std::min(h.top().size(), static_cast<std::size_t>(h.k_bar()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [label, c] = h.top()[i];
    const double v = static_cast<double>(c) + src.gaussian({tag::kUnkGaussItem, label_key(label)}, tau);
    if (v > v_bot) out.entries.push_back({label, v});
  }
  sort_descending(out.entries);
  return out;
}

NoisyRelease unk_gumbel(const LimitedHistogram& h, int k, double tau, double delta,
                        const NoiseSource& src) {
  require(k >= 1 && k <= h.k_bar(), "unk_gumbel: k must lie in [1, k_bar]");
  const Count cutoff = h.cutoff_count();
  const double v_bot =
      unk_gumbel_threshold(cutoff, tau, delta) + src.gumbel({tag::kUnkGumbelBottom}, tau / 2.0);
  std::vector<NoisyEntry> race;
  const std::size_t n = std::min(h.top().size(), static_cast<std::size_t>(h.k_bar()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [label, c] = h.top()[i];
    if (c <= cutoff) continue;
    const double v = static_cast<double>(c) + src.gumbel({tag::kGumbelSelect, label_key(label)}, tau / 2.0);
    if (v > v_bot) race.push_back({label, v});
  }
  sort_descending(race);
  NoisyRelease out;
  out.threshold = v_bot;
  if (race.size() < static_cast<std::size_t>(k)) {
    out.bottom_present = true;
  } else {
    race.resize(k);
  }
  for (const auto& e : race) {
    Count c = 0;
    for (const auto& [label, cnt] : h.top())
      if (label == e.label) c = cnt;
    out.entries.push_back(
        {e.label, static_cast<double>(c) + src.gaussian({tag::kGumbelCount, label_key(e.label)}, tau)});
  }
  return out;
}

}  // namespace contmech
