#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "contmech/histogram.hpp"

namespace contmech {

// "i000", "i001", ... wide enough for d labels (at least three digits).
std::vector<Label> make_domain(std::size_t d);

enum class StreamKind { Zipf, SwitchingZipf, Assumption1, Adversarial, File };

std::string_view to_string(StreamKind k);
StreamKind parse_stream_kind(std::string_view name);

struct StreamSpec {
  StreamKind kind = StreamKind::Zipf;
  std::size_t d = 100;
  std::int64_t T = 1000;
  double zipf_exponent = 1.0;
  std::vector<std::int64_t> switch_times;  // the ranking changes after each listed round
  std::uint64_t seed = 0;
  int events_per_round = 1;  // distinct items drawn per round (Zipf kinds)
  // Assumption-1 streams.
  int s = 1;
  double alpha1 = 1.0, alpha2 = 2.0, alpha3 = 4.0;
  std::int64_t quiet_rounds = 10;
  // File streams: one round per line, labels separated by whitespace.
  std::string path;

  void validate() const;
};

EventStream generate(const StreamSpec& spec);

// Zipf probabilities over ranks 1..d, proportional to rank^-exponent.
std::vector<double> zipf_pmf(std::size_t d, double exponent);

// Rank -> domain index for each phase of a switching stream. Phase 0 is the
// identity; every later phase is a seeded shuffle whose top item differs from
// the previous phase's top item.
std::vector<std::vector<std::size_t>> phase_rankings(std::size_t d, std::size_t phases, std::uint64_t seed);

EventStream read_stream_file(const std::string& path);

// ---- Assumption-1 streams ----

struct Interval {
  std::int64_t first = 1;
  std::int64_t last = 0;  // inclusive; empty when last < first
  bool empty() const noexcept { return last < first; }
  bool contains(std::int64_t t) const noexcept { return t >= first && t <= last; }
};

// Declared interval structure of an Assumption-1 stream. a, a_prime and b are
// indexed by phase 1..s (stored at 0..s-1).
struct Assumption1Layout {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
  Interval b0;
  std::vector<Interval> a, a_prime, b;
  std::vector<Label> leaders;  // leader of phase l at l-1
};

struct Assumption1Stream {
  EventStream stream;
  std::vector<Label> domain;
  Assumption1Layout layout;
};

// Quiet rounds first, then s phases. In phase l a fresh leader is the only
// item counted each round until it leads the previous maximum by `lead`
// rounds' worth; the last leader continues for a tail of lead/2 rounds.
// Intervals are derived from the realised counts.
Assumption1Stream generate_assumption1(int s, std::size_t d, double alpha1, double alpha2, double alpha3,
                                       std::int64_t lead, std::int64_t quiet_rounds, std::uint64_t seed);

struct Assumption1Check {
  bool ok = true;
  std::vector<std::string> violations;
};

// Checks every condition of the assumption for the declared layout, plus
// coverage of [T], A'_l within A_l and alpha1 < alpha2 < alpha3.
Assumption1Check validate_assumption1(const EventStream& stream, const std::vector<Label>& domain,
                                      const Assumption1Layout& layout);

// Length of the stream generate_assumption1 produces.
std::int64_t assumption1_length(int s, std::int64_t lead, std::int64_t quiet_rounds);

}  // namespace contmech
