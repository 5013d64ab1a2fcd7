#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "contmech/noise.hpp"

namespace contmech {

// floor(log_r T) + 1 by repeated multiplication.
int tree_levels(std::int64_t T, int r);

struct TreeParams {
  std::int64_t T = 1;
  int r = 2;
  double tau = 0.0;

  TreeParams() = default;
  TreeParams(std::int64_t T_, int r_, double tau_);

  int levels() const noexcept { return levels_; }
  // Standard deviation of every cell draw: sqrt(L_r) * tau.
  double cell_sigma() const noexcept;

 private:
  int levels_ = 1;
};

// Cell (level i, index j) covers stream positions ((j-1) r^(i-1), j r^(i-1)].
struct Cell {
  int level = 1;
  std::int64_t index = 1;
  auto operator<=>(const Cell&) const = default;
};

std::int64_t int_pow(int r, int e);
// Inclusive 1-based [first, last] positions of a cell.
std::pair<std::int64_t, std::int64_t> cell_interval(const Cell& c, int r);

struct DigitDecomposition {
  std::int64_t t = 0;
  std::vector<int> digits;  // s_0, s_1, ... (least significant first)
  std::vector<Cell> cells;  // highest level first, ascending index within a level
};

DigitDecomposition decompose(std::int64_t t, int r);

// Calls f(Cell) for every cell of I_t(r) in decompose() order, without allocating.
template <class F>
void for_each_prefix_cell(std::int64_t t, int r, F&& f) {
  std::int64_t p = 1;
  int top = 0;
  while (p <= t / r) {
    p *= r;
    ++top;
  }
  std::int64_t covered = 0;
  for (int j = top; j >= 0; --j) {
    const std::int64_t digit = (t - covered) / p;
    const std::int64_t first = covered / p;
    for (std::int64_t m = 1; m <= digit; ++m) f(Cell{j + 1, first + m});
    covered += digit * p;
    p /= r;
  }
}

class PartialSumTable {
 public:
  PartialSumTable(std::int64_t T, int r);

  std::int64_t T() const noexcept { return T_; }
  int r() const noexcept { return r_; }
  int levels() const noexcept { return static_cast<int>(cells_.size()); }
  std::int64_t cells_at(int level) const;
  std::int64_t& at(const Cell& c);
  std::int64_t at(const Cell& c) const;

 private:
  std::int64_t T_;
  int r_;
  std::vector<std::vector<std::int64_t>> cells_;
};

// Partial sums of a bit stream (length <= T).
PartialSumTable build_table(std::span<const std::uint8_t> bits, const TreeParams& params);

// Identifies one tree-mechanism instance inside a NoiseSource.
struct TreeKey {
  std::uint64_t mechanism = tag::kTree;
  std::uint64_t item = 0;
};

double cell_noise(const NoiseSource& src, const TreeKey& key, const Cell& c, double sigma);

// Batch mechanism: y_t = sum over I_t(r) of (p + Z), each Z drawn once per cell.
std::vector<double> run(std::span<const std::uint8_t> bits, const TreeParams& params,
                        const NoiseSource& src, const TreeKey& key = {});

// Sum of the noise of I_t(r); the aggregate form used when only running
// counts are kept (noisy count = true count + prefix_noise).
double prefix_noise(const TreeParams& params, const NoiseSource& src, const TreeKey& key,
                    std::int64_t t);

// Streaming form of run(). Keeps one open accumulator per level and at most
// r-1 closed noisy cells per level; output is bit-identical to run().
class TreeCounter {
 public:
  TreeCounter(const TreeParams& params, NoiseSource src, TreeKey key = {});

  double step(bool bit);
  std::int64_t t() const noexcept { return t_; }
  std::size_t retained_cells() const noexcept;
  const TreeParams& params() const noexcept { return params_; }

 private:
  TreeParams params_;
  NoiseSource src_;
  TreeKey key_;
  double sigma_;
  std::int64_t t_ = 0;
  std::vector<std::int64_t> open_;
  std::vector<std::int64_t> span_;  // r^(i-1) per level
  std::vector<std::vector<double>> closed_;
};

std::int64_t base_objective(std::int64_t T, int r);  // (r-1) L_r^2

struct OptimalBase {
  int r = 2;
  std::int64_t objective = 0;
};

OptimalBase optimal_base(std::int64_t T);

}  // namespace contmech
