#include "contmech/tree_mechanism.hpp"

#include <cmath>
#include <limits>

#include "contmech/error.hpp"

namespace contmech {

int tree_levels(std::int64_t T, int r) {
  require(T >= 1, "tree_levels: T must be positive");
  require(r >= 2, "tree_levels: base must be at least 2");
  int L = 0;
  std::int64_t p = 1;
  while (p <= T) {
    ++L;
    if (p > T / r) break;
    p *= r;
  }
  return L;
}

TreeParams::TreeParams(std::int64_t T_, int r_, double tau_) : T(T_), r(r_), tau(tau_) {
  require(T >= 1, "TreeParams: T must be positive");
  require(r >= 2, "TreeParams: base must be at least 2");
  require(T == 1 || r <= T, "TreeParams: base must not exceed T");
  require(tau >= 0.0, "TreeParams: tau must be non-negative");
  levels_ = tree_levels(T, r);
}

double TreeParams::cell_sigma() const noexcept { return std::sqrt(static_cast<double>(levels_)) * tau; }

std::int64_t int_pow(int r, int e) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) {
    require(p <= std::numeric_limits<std::int64_t>::max() / r, "int_pow: overflow");
    p *= r;
  }
  return p;
}

std::pair<std::int64_t, std::int64_t> cell_interval(const Cell& c, int r) {
  const std::int64_t w = int_pow(r, c.level - 1);
  return {(c.index - 1) * w + 1, c.index * w};
}

DigitDecomposition decompose(std::int64_t t, int r) {
  require(t >= 1, "decompose: t must be positive");
  require(r >= 2, "decompose: base must be at least 2");
  DigitDecomposition d;
  d.t = t;
  for (std::int64_t x = t; x > 0; x /= r) d.digits.push_back(static_cast<int>(x % r));
  for_each_prefix_cell(t, r, [&](const Cell& c) { d.cells.push_back(c); });
  return d;
}

PartialSumTable::PartialSumTable(std::int64_t T, int r) : T_(T), r_(r) {
  const int L = tree_levels(T, r);
  cells_.resize(L);
  std::int64_t w = 1;
  for (int i = 0; i < L; ++i) {
    cells_[i].assign(static_cast<std::size_t>(T / w), 0);
    w *= r;
  }
}

std::int64_t PartialSumTable::cells_at(int level) const {
  require(level >= 1 && level <= levels(), "PartialSumTable: level out of range");
  return static_cast<std::int64_t>(cells_[level - 1].size());
}

std::int64_t& PartialSumTable::at(const Cell& c) {
  require(c.level >= 1 && c.level <= levels(), "PartialSumTable: level out of range");
  require(c.index >= 1 && c.index <= cells_at(c.level), "PartialSumTable: index out of range");
  return cells_[c.level - 1][c.index - 1];
}

std::int64_t PartialSumTable::at(const Cell& c) const {
  return const_cast<PartialSumTable*>(this)->at(c);
}

PartialSumTable build_table(std::span<const std::uint8_t> bits, const TreeParams& params) {
  require(static_cast<std::int64_t>(bits.size()) <= params.T, "build_table: stream longer than T");
  PartialSumTable table(params.T, params.r);
  std::int64_t w = 1;
  for (int level = 1; level <= table.levels(); ++level) {
    const std::int64_t n = table.cells_at(level);
    for (std::int64_t j = 1; j <= n; ++j) {
      std::int64_t sum = 0;
      const std::int64_t first = (j - 1) * w;
      const std::int64_t last = std::min<std::int64_t>(j * w, static_cast<std::int64_t>(bits.size()));
      for (std::int64_t pos = first; pos < last; ++pos) {
        require(bits[pos] <= 1, "build_table: stream entries must be 0 or 1");
        sum += bits[pos];
      }
      table.at({level, j}) = sum;
    }
    w *= params.r;
  }
  return table;
}

double cell_noise(const NoiseSource& src, const TreeKey& key, const Cell& c, double sigma) {
  return src.gaussian({key.mechanism, key.item, static_cast<std::uint64_t>(c.level),
                       static_cast<std::uint64_t>(c.index)},
                      sigma);
}

std::vector<double> run(std::span<const std::uint8_t> bits, const TreeParams& params,
                        const NoiseSource& src, const TreeKey& key) {
  const PartialSumTable table = build_table(bits, params);
  const double sigma = params.cell_sigma();
  std::vector<double> out;
  out.reserve(bits.size());
  for (std::int64_t t = 1; t <= static_cast<std::int64_t>(bits.size()); ++t) {
    double y = 0.0;
    for_each_prefix_cell(t, params.r, [&](const Cell& c) {
      y += static_cast<double>(table.at(c)) + cell_noise(src, key, c, sigma);
    });
    out.push_back(y);
  }
  return out;
}

double prefix_noise(const TreeParams& params, const NoiseSource& src, const TreeKey& key,
                    std::int64_t t) {
  require(t >= 1 && t <= params.T, "prefix_noise: t out of range");
  const double sigma = params.cell_sigma();
  if (sigma == 0.0) return 0.0;
  double z = 0.0;
  for_each_prefix_cell(t, params.r, [&](const Cell& c) { z += cell_noise(src, key, c, sigma); });
  return z;
}

TreeCounter::TreeCounter(const TreeParams& params, NoiseSource src, TreeKey key)
    : params_(params), src_(src), key_(key), sigma_(params.cell_sigma()) {
  const int L = params_.levels();
  open_.assign(L, 0);
  closed_.resize(L);
  span_.resize(L);
  std::int64_t w = 1;
  for (int i = 0; i < L; ++i) {
    span_[i] = w;
    closed_[i].reserve(params_.r - 1);
    if (i + 1 < L) w *= params_.r;
  }
}

double TreeCounter::step(bool bit) {
  require(t_ < params_.T, "TreeCounter: stream longer than T");
  ++t_;
  const int L = params_.levels();
  for (int i = 0; i < L; ++i) {
    open_[i] += bit ? 1 : 0;
    if (t_ % span_[i] == 0) {
      const Cell c{i + 1, t_ / span_[i]};
      closed_[i].push_back(static_cast<double>(open_[i]) + cell_noise(src_, key_, c, sigma_));
      open_[i] = 0;
    }
  }
  // A full block of r closed cells at level i has merged into level i+1.
  for (int i = 0; i + 1 < L; ++i)
    if (t_ % span_[i + 1] == 0) closed_[i].clear();
  double y = 0.0;
  for (int i = L - 1; i >= 0; --i)
    for (double v : closed_[i]) y += v;
  return y;
}

std::size_t TreeCounter::retained_cells() const noexcept {
  std::size_t n = open_.size();
  for (const auto& level : closed_) n += level.size();
  return n;
}

std::int64_t base_objective(std::int64_t T, int r) {
  const std::int64_t L = tree_levels(T, r);
  return (r - 1) * L * L;
}

OptimalBase optimal_base(std::int64_t T) {
  require(T >= 2, "optimal_base: T must be at least 2");
  OptimalBase best{2, base_objective(T, 2)};
  // For r <= T, L_r >= 2, so the objective is at least 4(r-1); stop once that
  // lower bound exceeds the incumbent.
  for (std::int64_t r = 3; r <= T && 4 * (r - 1) <= best.objective; ++r) {
    const std::int64_t obj = base_objective(T, static_cast<int>(r));
    if (obj < best.objective) best = {static_cast<int>(r), obj};
  }
  return best;
}

}  // namespace contmech
