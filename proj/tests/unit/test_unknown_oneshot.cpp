#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "contmech/error.hpp"
#include "contmech/unknown_oneshot.hpp"
#include "oracles.hpp"

using namespace contmech;

namespace {
LimitedHistogram limited(std::vector<Count> counts, int k_bar) {
  LabeledHistogram h;
  for (std::size_t i = 0; i < counts.size(); ++i) h.set("i" + std::to_string(i + 1), counts[i]);
  return LimitedHistogram::from_histogram(h, k_bar);
}
}  // namespace

TEST_CASE("limited histogram keeps the top k_bar+1 positive counts") {
  const LabeledHistogram h{{"d", 1}, {"a", 4}, {"c", 4}, {"b", 0}, {"e", 9}};
  const LimitedHistogram l = LimitedHistogram::from_histogram(h, 2);
  CHECK(l.top() == std::vector<std::pair<Label, Count>>{{"e", 9}, {"a", 4}, {"c", 4}});
  CHECK(l.cutoff_count() == 4);
  CHECK(LimitedHistogram::from_histogram(h, 5).cutoff_count() == 0);
  CHECK_THROWS_AS(LimitedHistogram({{"a", 1}, {"b", 2}}, 3), UsageError);
  CHECK_THROWS_AS(LimitedHistogram({{"a", 0}}, 3), UsageError);
}

TEST_CASE("gaussian threshold values") {
  CHECK(unk_gauss_threshold(5, 0.0, 0.5) == 6.0);
  CHECK(unk_gauss_threshold(5, 1.0, 0.5) == doctest::Approx(6.0).epsilon(1e-12));
  // 6 + sqrt(2) * 2.326347874040841
  CHECK(unk_gauss_threshold(5, 1.0, 0.01) == doctest::Approx(9.289953).epsilon(1e-6));
  CHECK(unk_gumbel_threshold(3, 0.0, 0.2) == 4.0);
  CHECK(unk_gumbel_threshold(3, 2.0, std::exp(-1.0)) == doctest::Approx(6.0));
  CHECK_THROWS_AS(unk_gauss_threshold(1, 1.0, 0.0), UsageError);
}

TEST_CASE("noiseless gaussian release") {
  const NoisyRelease r = unk_gauss(limited({10, 8, 5}, 2), 0.0, 0.5, NoiseSource(1));
  CHECK(r.entries == std::vector<NoisyEntry>{{"i1", 10}, {"i2", 8}});
  CHECK(*r.threshold == 6.0);
  // 6 is not strictly above 6.
  CHECK(unk_gauss(limited({10, 6, 5}, 2), 0.0, 0.5, NoiseSource(1)).entries ==
        std::vector<NoisyEntry>{{"i1", 10}});
}

TEST_CASE("noiseless gaussian release is strict truncation at the cutoff plus one") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    LabeledHistogram h;
    for (const auto& l : oracle::labels(1 + static_cast<int>(rng() % 8))) h.set(l, static_cast<Count>(rng() % 6));
    const int k_bar = 1 + static_cast<int>(rng() % 4);
    const NoisyRelease r = unk_gauss(LimitedHistogram::from_histogram(h, k_bar), 0.0, 0.5, NoiseSource(rep));
    LabeledHistogram got;
    for (const auto& e : r.entries) got.set(e.label, static_cast<Count>(e.value));
    oracle::Hist want = oracle::noiseless_unk_gauss({h.begin(), h.end()}, k_bar);
    REQUIRE(oracle::Hist(got.begin(), got.end()) == want);
  }
}

TEST_CASE("noiseless gumbel release") {
  const NoisyRelease r = unk_gumbel(limited({10, 8, 5, 3}, 3), 2, 0.0, 0.3, NoiseSource(1));
  CHECK(r.entries == std::vector<NoisyEntry>{{"i1", 10}, {"i2", 8}});
  CHECK_FALSE(r.bottom_present);
  CHECK(*r.threshold == 4.0);
  const NoisyRelease tied = unk_gumbel(limited({4, 4, 4, 4}, 3), 2, 1.0, 0.3, NoiseSource(1));
  CHECK(tied.entries.empty());
  CHECK(tied.bottom_present);
}

TEST_CASE("bottom frequency grows as delta shrinks") {
  const LimitedHistogram h = limited({12, 9, 3}, 2);
  double prev = -1;
  for (double delta : {0.1, 0.01, 0.001}) {
    int bottoms = 0;
    for (int i = 0; i < 20000; ++i)
      if (unk_gumbel(h, 2, 1.0, delta, NoiseSource(8).fork(i)).bottom_present) ++bottoms;
    const double f = bottoms / 20000.0;
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("released counts clear the noisy threshold and labels come from the input") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 2000; ++rep) {
    const LimitedHistogram h = limited({1 + Count(rng() % 20), 1 + Count(rng() % 10), 1 + Count(rng() % 5)}, 2);
    std::set<Label> input;
    for (const auto& [l, c] : h.top()) input.insert(l);
    const NoisyRelease g = unk_gauss(h, 2.0, 0.05, NoiseSource(rep));
    for (const auto& e : g.entries) {
      REQUIRE(e.value > *g.threshold);
      REQUIRE(input.contains(e.label));
    }
    const NoisyRelease u = unk_gumbel(h, 1, 2.0, 0.05, NoiseSource(rep));
    for (const auto& e : u.entries) REQUIRE(input.contains(e.label));
  }
}
