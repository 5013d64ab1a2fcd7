#pragma once

// Test-side reference computations. Nothing here calls into the library's
// mechanism code; only the shared value types are reused.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "contmech/histogram.hpp"

namespace oracle {

using contmech::Count;
using contmech::EventStream;
using contmech::Label;
using Hist = std::map<Label, Count>;
using Ranked = std::vector<std::pair<Label, Count>>;

// [first, last] intervals covering (0, t]: greedy largest power of r first.
inline std::vector<std::pair<std::int64_t, std::int64_t>> prefix_intervals(std::int64_t t, int r) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t p = 1;
  while (p * r <= t) p *= r;
  std::int64_t covered = 0;
  while (covered < t) {
    while (covered + p > t) p /= r;
    out.emplace_back(covered + 1, covered + p);
    covered += p;
  }
  return out;
}

// floor(log_r T) + 1 via the number of base-r digits of T.
inline int levels(std::int64_t T, int r) {
  int digits = 0;
  for (std::int64_t x = T; x > 0; x /= r) ++digits;
  return std::max(digits, 1);
}

inline Hist interval_hist(const EventStream& s, std::int64_t first, std::int64_t last) {
  Hist h;
  for (std::int64_t t = first; t <= last; ++t)
    for (const auto& l : s[static_cast<std::size_t>(t - 1)]) ++h[l];
  return h;
}

inline std::vector<Hist> running(const EventStream& s) {
  std::vector<Hist> out;
  Hist h;
  for (const auto& ev : s) {
    for (const auto& l : ev) ++h[l];
    out.push_back(h);
  }
  return out;
}

// Count descending, label ascending.
inline Ranked ranked(const Hist& h) {
  Ranked r(h.begin(), h.end());
  std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return r;
}

inline Ranked positive_ranked(const Hist& h) {
  Ranked r;
  for (auto& e : ranked(h))
    if (e.second > 0) r.push_back(e);
  return r;
}

// Count of the (k_bar+1)-th positive item, 0 if there is none.
inline Count cutoff(const Hist& h, int k_bar) {
  const Ranked r = positive_ranked(h);
  return r.size() > static_cast<std::size_t>(k_bar) ? r[static_cast<std::size_t>(k_bar)].second : 0;
}

// Noiseless limited-domain Gaussian release: top-k_bar positive items whose
// count exceeds cutoff + 1.
inline Hist noiseless_unk_gauss(const Hist& h, int k_bar) {
  const Ranked r = positive_ranked(h);
  const Count c = cutoff(h, k_bar);
  Hist out;
  for (std::size_t i = 0; i < r.size() && i < static_cast<std::size_t>(k_bar); ++i)
    if (r[i].second > c + 1) out[r[i].first] = r[i].second;
  return out;
}

// Noiseless limited-domain Gumbel release: the first k of those items in rank order.
inline Ranked noiseless_unk_gumbel(const Hist& h, int k, int k_bar) {
  const Ranked r = positive_ranked(h);
  const Count c = cutoff(h, k_bar);
  Ranked out;
  for (std::size_t i = 0; i < r.size() && i < static_cast<std::size_t>(k_bar); ++i)
    if (r[i].second > c + 1 && out.size() < static_cast<std::size_t>(k)) out.push_back(r[i]);
  return out;
}

// Top-k over a known domain (zero counts included), rank order.
inline Ranked top_k(const Hist& h, const std::vector<Label>& domain, int k) {
  Hist full;
  for (const auto& l : domain) full[l] = 0;
  for (const auto& [l, c] : h) full[l] = c;
  Ranked r = ranked(full);
  r.resize(std::min(r.size(), static_cast<std::size_t>(k)));
  return r;
}

inline std::vector<Label> labels(int d) {
  std::vector<Label> out;
  for (int i = 0; i < d; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

// Each item joins a round independently with probability p.
inline EventStream random_stream(std::mt19937_64& rng, const std::vector<Label>& domain, std::int64_t T, double p) {
  std::bernoulli_distribution coin(p);
  EventStream s;
  for (std::int64_t t = 0; t < T; ++t) {
    contmech::Event ev;
    for (const auto& l : domain)
      if (coin(rng)) ev.push_back(l);
    s.push_back(ev);
  }
  return s;
}

}  // namespace oracle
