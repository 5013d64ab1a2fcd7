#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "contmech/error.hpp"
#include "contmech/stats.hpp"
#include "contmech/tree_mechanism.hpp"
#include "oracles.hpp"

using namespace contmech;

namespace {
std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::int64_t T) {
  std::vector<std::uint8_t> b(static_cast<std::size_t>(T));
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

std::vector<std::pair<std::int64_t, std::int64_t>> intervals(const DigitDecomposition& d, int r) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const Cell& c : d.cells) out.push_back(cell_interval(c, r));
  return out;
}
}  // namespace

TEST_CASE("levels use integer logarithms") {
  CHECK(tree_levels(1, 2) == 1);
  CHECK(tree_levels(1024, 2) == 11);
  CHECK(tree_levels(1023, 2) == 10);
  CHECK(tree_levels(27, 3) == 4);
  CHECK(tree_levels(26, 3) == 3);
  for (int r = 2; r <= 10; ++r)
    for (std::int64_t T = 1; T <= 5000; T += 7) REQUIRE(tree_levels(T, r) == oracle::levels(T, r));
  CHECK(TreeParams(1024, 2, 1.5).cell_sigma() == doctest::Approx(std::sqrt(11.0) * 1.5));
  CHECK_THROWS_AS(TreeParams(4, 5, 1.0), UsageError);
  CHECK_THROWS_AS(TreeParams(0, 2, 1.0), UsageError);
  CHECK_NOTHROW(TreeParams(1, 3, 1.0));
}

TEST_CASE("all-ones table at r=2, T=4") {
  const std::vector<std::uint8_t> ones{1, 1, 1, 1};
  const PartialSumTable t = build_table(ones, TreeParams(4, 2, 0));
  REQUIRE(t.levels() == 3);
  CHECK(t.cells_at(1) == 4);
  CHECK(t.cells_at(2) == 2);
  CHECK(t.cells_at(3) == 1);
  for (std::int64_t j = 1; j <= 4; ++j) CHECK(t.at({1, j}) == 1);
  CHECK(t.at({2, 1}) == 2);
  CHECK(t.at({2, 2}) == 2);
  CHECK(t.at({3, 1}) == 4);

  const std::vector<std::uint8_t> zeros(4, 0);
  const PartialSumTable z = build_table(zeros, TreeParams(4, 2, 0));
  for (int i = 1; i <= z.levels(); ++i)
    for (std::int64_t j = 1; j <= z.cells_at(i); ++j) CHECK(z.at({i, j}) == 0);
}

TEST_CASE("cells equal brute-force interval sums") {
  std::mt19937_64 rng(27);
  for (int rep = 0; rep < 20; ++rep) {
    const auto bits = random_bits(rng, 27);
    const PartialSumTable t = build_table(bits, TreeParams(27, 3, 0));
    for (int i = 1; i <= t.levels(); ++i)
      for (std::int64_t j = 1; j <= t.cells_at(i); ++j) {
        const auto [a, b] = cell_interval({i, j}, 3);
        Count sum = 0;
        for (std::int64_t p = a; p <= std::min<std::int64_t>(b, 27); ++p) sum += bits[p - 1];
        REQUIRE(t.at({i, j}) == sum);
      }
  }
}

TEST_CASE("parent cell is the sum of its children") {
  std::mt19937_64 rng(5);
  for (int r = 2; r <= 10; ++r)
    for (std::int64_t T = r; T <= 100; T += 3) {
      const auto bits = random_bits(rng, T);
      const PartialSumTable t = build_table(bits, TreeParams(T, r, 0));
      for (int i = 2; i <= t.levels(); ++i)
        for (std::int64_t j = 1; j <= t.cells_at(i); ++j) {
          Count kids = 0;
          for (std::int64_t c = (j - 1) * r + 1; c <= j * r && c <= t.cells_at(i - 1); ++c) kids += t.at({i - 1, c});
          REQUIRE(t.at({i, j}) == kids);
        }
    }
}

TEST_CASE("decompose examples") {
  const DigitDecomposition d7 = decompose(7, 2);
  CHECK(d7.digits == std::vector<int>{1, 1, 1});
  CHECK(intervals(d7, 2) == std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 4}, {5, 6}, {7, 7}});

  const DigitDecomposition d5 = decompose(5, 3);
  CHECK(d5.digits == std::vector<int>{2, 1});
  CHECK(intervals(d5, 3) == std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 3}, {4, 4}, {5, 5}});

  for (int r = 2; r <= 6; ++r)
    for (int m = 0; m <= 5; ++m) {
      const DigitDecomposition d = decompose(int_pow(r, m), r);
      REQUIRE(d.cells.size() == 1);
      CHECK(d.cells[0].level == m + 1);
    }
}

TEST_CASE("decompose partitions the prefix for every t and base") {
  for (int r = 2; r <= 10; ++r) {
    const int L = tree_levels(1000, r);
    for (std::int64_t t = 1; t <= 1000; ++t) {
      const DigitDecomposition d = decompose(t, r);
      std::int64_t weighted = 0, count = 0;
      for (std::size_t j = 0; j < d.digits.size(); ++j) {
        weighted += d.digits[j] * int_pow(r, static_cast<int>(j));
        count += d.digits[j];
      }
      REQUIRE(weighted == t);
      REQUIRE(count == static_cast<std::int64_t>(d.cells.size()));
      REQUIRE(count <= (r - 1) * L);
      REQUIRE(intervals(d, r) == oracle::prefix_intervals(t, r));
      std::vector<Cell> streamed;
      for_each_prefix_cell(t, r, [&](const Cell& c) { streamed.push_back(c); });
      REQUIRE(streamed == d.cells);
    }
  }
}

TEST_CASE("noiseless runs give exact prefix sums") {
  const std::vector<std::uint8_t> ones{1, 1, 1, 1};
  for (int r : {2, 3, 4}) CHECK(run(ones, TreeParams(4, r, 0), NoiseSource(1)) == std::vector<double>{1, 2, 3, 4});
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const std::int64_t T = 1 + static_cast<std::int64_t>(rng() % 200);
    const int r = 2 + static_cast<int>(rng() % 5);
    if (r > T) continue;
    const auto bits = random_bits(rng, T);
    const auto y = run(bits, TreeParams(T, r, 0), NoiseSource(rep));
    Count sum = 0;
    for (std::int64_t t = 0; t < T; ++t) {
      sum += bits[t];
      REQUIRE(y[t] == static_cast<double>(sum));
    }
  }
  TreeCounter c(TreeParams(8, 2, 0), NoiseSource(0));
  CHECK(c.step(true) == 1.0);
}

TEST_CASE("per-round variance is |I_t| L tau^2") {
  const std::int64_t T = 1024;
  const TreeParams p(T, 2, 1.0);
  REQUIRE(p.levels() == 11);
  const std::vector<std::uint8_t> zeros(T, 0);
  const std::vector<std::int64_t> probe{1, 3, 255, 682, 1023, 1024};
  std::vector<std::vector<double>> samples(probe.size());
  for (int rep = 0; rep < 10000; ++rep) {
    const auto y = run(zeros, p, NoiseSource(100).fork(rep));
    for (std::size_t i = 0; i < probe.size(); ++i) samples[i].push_back(y[probe[i] - 1]);
  }
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double expected = static_cast<double>(oracle::prefix_intervals(probe[i], 2).size()) * 11.0;
    CHECK(expected <= 121.0);
    const double v = moments(samples[i]).variance;
    CHECK(std::abs(v / expected - 1.0) < 0.1);
  }
}

TEST_CASE("streaming counter matches the batch run") {
  std::mt19937_64 rng(81);
  for (int r : {2, 3})
    for (std::int64_t T = r; T <= 81; ++T) {
      const auto bits = random_bits(rng, T);
      const TreeParams p(T, r, 0.7);
      const NoiseSource src(static_cast<std::uint64_t>(T * 10 + r));
      const auto batch = run(bits, p, src, {tag::kTree, 5});
      TreeCounter c(p, src, {tag::kTree, 5});
      for (std::int64_t t = 0; t < T; ++t) {
        REQUIRE(c.step(bits[t] != 0) == batch[t]);
        REQUIRE(c.retained_cells() <= static_cast<std::size_t>(p.r * p.levels()));
        // Aggregate form agrees as well.
        Count sum = 0;
        for (std::int64_t q = 0; q <= t; ++q) sum += bits[q];
        REQUIRE(static_cast<double>(sum) + prefix_noise(p, src, {tag::kTree, 5}, t + 1) ==
                doctest::Approx(batch[t]).epsilon(1e-12));
      }
    }
}

TEST_CASE("cell noise depends only on the cell") {
  const NoiseSource src(3);
  const double a = cell_noise(src, {tag::kTree, 1}, {2, 5}, 1.0);
  CHECK(a == cell_noise(src, {tag::kTree, 1}, {2, 5}, 1.0));
  CHECK(a != cell_noise(src, {tag::kTree, 2}, {2, 5}, 1.0));
  CHECK(a != cell_noise(src, {tag::kTree, 1}, {2, 6}, 1.0));
}

TEST_CASE("optimal base small cases and brute force at T=1024") {
  CHECK(optimal_base(2).r == 2);
  CHECK(optimal_base(2).objective == 4);
  std::int64_t best = -1;
  int best_r = 0;
  for (int r = 2; r <= 1024; ++r) {
    const std::int64_t L = oracle::levels(1024, r);
    if (best < 0 || (r - 1) * L * L < best) best = (r - 1) * L * L, best_r = r;
  }
  CHECK(optimal_base(1024).r == best_r);
  CHECK(optimal_base(1024).objective == best);
  CHECK(base_objective(1024, 2) == 121);
}

TEST_CASE("optimal base lies in 3..10 except on one short window") {
  // Exhaustive over [1e3, 2e4]; log-uniform samples up to 1e7.
  std::set<std::int64_t> outside;
  std::int64_t checked = 0;
  for (std::int64_t T = 1000; T <= 20000; ++T, ++checked) {
    const int r = optimal_base(T).r;
    if (r < 3 || r > 10) outside.insert(T);
  }
  CHECK(outside.size() == 35);
  CHECK(*outside.begin() == 1296);
  CHECK(*outside.rbegin() == 1330);
  CHECK(static_cast<double>(outside.size()) / static_cast<double>(checked) < 0.01);
  for (std::int64_t T = 1296; T <= 1330; ++T) CHECK(optimal_base(T).r == 11);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(3.0, 7.0);
  for (int i = 0; i < 2000; ++i) {
    const auto T = static_cast<std::int64_t>(std::pow(10.0, u(rng)));
    const int r = optimal_base(T).r;
    if (T >= 1296 && T <= 1330) continue;
    REQUIRE(r >= 3);
    REQUIRE(r <= 10);
  }
}
