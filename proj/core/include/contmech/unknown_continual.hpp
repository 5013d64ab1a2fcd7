#pragma once

#include <functional>
#include <map>
#include <set>

#include "contmech/histogram.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

struct UnkBaseConfig {
  TreeParams tree;
  double delta = 0.05;
  int delta0 = 1;
  bool persistent_discovery = false;
};

// tau L_r sqrt(r-1) Phi^-1(1 - delta/T) + 1
double unk_base_threshold(const TreeParams& tree, double delta);

// Continual histogram over an unknown domain. Each seen item carries its true
// running count; its noise for table cell c is regenerated from the key
// (item, c), so a cell shared by two rounds contributes the same draw.
// Work per round is linear in the number of distinct items seen so far.
class UnkBase {
 public:
  using DrawObserver = std::function<void(const Label&, const Cell&, double)>;

  UnkBase(const UnkBaseConfig& config, NoiseSource src);

  NoisyRelease step(const Event& event);

  double m_delta() const noexcept { return m_delta_; }
  std::int64_t t() const noexcept { return t_; }
  const std::map<Label, Count>& seen() const noexcept { return counts_; }
  const std::set<Label>& discovered() const noexcept { return discovered_; }
  double cell_noise(const Label& label, const Cell& c) const;
  // Called for every (item, cell) draw used in a round.
  void set_draw_observer(DrawObserver obs) { observer_ = std::move(obs); }

 private:
  UnkBaseConfig config_;
  NoiseSource src_;
  double m_delta_;
  double sigma_;
  std::int64_t t_ = 0;
  std::map<Label, Count> counts_;
  std::set<Label> discovered_;
  DrawObserver observer_;
};

ReleaseSequence unk_base(const EventStream& stream, const UnkBaseConfig& config,
                         const NoiseSource& src);

// Lower bound on Pr[u released at t] when h_t^u = m_delta + c tau.
double discovery_probability_bound(double c, const TreeParams& tree);
// Upper bound on Pr[|h - h_hat| >= eta tau | released] for 0 < c < eta.
double conditional_error_bound(double c, double eta, const TreeParams& tree);

}  // namespace contmech
