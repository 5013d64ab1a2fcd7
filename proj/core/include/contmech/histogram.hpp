#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contmech {

using Label = std::string;
using Count = std::int64_t;

// One round of a stream: a set of distinct labels.
using Event = std::vector<Label>;
using EventStream = std::vector<Event>;

// Label -> non-negative count. Iteration order is lexicographic by label.
class LabeledHistogram {
 public:
  LabeledHistogram() = default;
  LabeledHistogram(std::initializer_list<std::pair<const Label, Count>> init);

  void set(const Label& label, Count c);
  void add(const Label& label, Count c = 1);
  Count get(const Label& label) const;
  bool contains(const Label& label) const { return counts_.contains(label); }
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  void erase(const Label& label) { counts_.erase(label); }

  auto begin() const { return counts_.begin(); }
  auto end() const { return counts_.end(); }

  // Entries sorted by count descending, then label ascending.
  std::vector<std::pair<Label, Count>> ranked() const;

  // Histogram of a stream prefix (all rounds when rounds < 0).
  static LabeledHistogram of_stream(const EventStream& stream, std::int64_t rounds = -1);

  bool operator==(const LabeledHistogram&) const = default;

 private:
  std::map<Label, Count> counts_;
};

struct NoisyEntry {
  Label label;
  double value = 0.0;
  bool operator==(const NoisyEntry&) const = default;
};

// Output of a one-shot mechanism or of one round of a continual one.
struct NoisyRelease {
  std::vector<NoisyEntry> entries;
  bool bottom_present = false;     // the mechanism emitted its bottom marker
  std::optional<double> threshold;  // realized noisy threshold, when there is one

  const NoisyEntry* find(const Label& label) const;
  bool operator==(const NoisyRelease&) const = default;
};

using ReleaseSequence = std::vector<NoisyRelease>;

// Throws UsageError on duplicate labels inside an event or |event| > delta0.
void check_event(const Event& event, int delta0);

// Sorts entries by value descending with label ascending on ties.
void sort_descending(std::vector<NoisyEntry>& entries);

}  // namespace contmech
