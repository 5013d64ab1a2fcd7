#include "contmech/histogram.hpp"

#include <algorithm>
#include <set>

#include "contmech/error.hpp"

namespace contmech {

LabeledHistogram::LabeledHistogram(std::initializer_list<std::pair<const Label, Count>> init) {
  for (const auto& [label, c] : init) set(label, c);
}

void LabeledHistogram::set(const Label& label, Count c) {
  require(c >= 0, "histogram counts must be non-negative");
  counts_[label] = c;
}

void LabeledHistogram::add(const Label& label, Count c) {
  Count& slot = counts_[label];
  require(slot + c >= 0, "histogram counts must be non-negative");
  slot += c;
}

Count LabeledHistogram::get(const Label& label) const {
  auto it = counts_.find(label);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<Label, Count>> LabeledHistogram::ranked() const {
  std::vector<std::pair<Label, Count>> out(counts_.begin(), counts_.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

LabeledHistogram LabeledHistogram::of_stream(const EventStream& stream, std::int64_t rounds) {
  const std::size_t n = rounds < 0 ? stream.size()
                                   : std::min(stream.size(), static_cast<std::size_t>(rounds));
  LabeledHistogram h;
  for (std::size_t t = 0; t < n; ++t)
    for (const auto& label : stream[t]) h.add(label);
  return h;
}

const NoisyEntry* NoisyRelease::find(const Label& label) const {
  for (const auto& e : entries)
    if (e.label == label) return &e;
  return nullptr;
}

void check_event(const Event& event, int delta0) {
  require(static_cast<int>(event.size()) <= delta0, "event has more than delta0 items");
  if (event.size() < 2) return;
  std::set<Label> seen(event.begin(), event.end());
  require(seen.size() == event.size(), "event contains a duplicate label");
}

void sort_descending(std::vector<NoisyEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const NoisyEntry& a, const NoisyEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.label < b.label;
  });
}

}  // namespace contmech
