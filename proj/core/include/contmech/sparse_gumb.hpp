#pragma once

#include <span>
#include <vector>

#include "contmech/histogram.hpp"
#include "contmech/known_domain.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

struct SparseGumbConfig {
  int s = 1;  // switch budget
  int k = 1;
  double tau = 1.0;
  // One value means a constant margin; otherwise eta[t-1] is used at round t.
  std::vector<double> eta{0.0};
  int base = 2;  // base of the per-item tree counters
  std::int64_t T = 1;

  double tau1() const;  // sqrt(s) tau
  double tau2() const;  // sqrt(s+1) tau
  double eta_at(std::int64_t t) const;
  void validate(std::size_t d) const;
};

struct SparseGumbRound {
  std::vector<NoisyEntry> selected;  // selection order
  bool switched = false;
};

// Continual top-k over a known domain with unrestricted events. Gumbel
// selection picks the top-k, tree counters release their counts, and a sparse
// vector test over the other items triggers reselection.
//
// Counts are kept in aggregate form: a counter started at round t0 over the
// item's full bit stream releases h_t + sum of its cell noise over I_t(r),
// which equals the tree output exactly, so no bit history is stored.
// Once the switch budget is spent, the last selection keeps being released.
class SparseGumb {
 public:
  SparseGumb(Domain domain, const SparseGumbConfig& config, NoiseSource src);

  const SparseGumbRound& step(const Event& event);
  const SparseGumbRound& step_indices(std::span<const std::size_t> items);

  std::int64_t t() const noexcept { return t_; }
  int remaining_switches() const noexcept { return remaining_; }
  int selections() const noexcept { return selections_; }
  int tree_instances() const noexcept { return tree_instances_; }
  int threshold_draws() const noexcept { return threshold_draws_; }
  double threshold_noise() const noexcept { return z_; }
  const std::vector<std::int64_t>& switch_rounds() const noexcept { return switch_rounds_; }
  const std::vector<Count>& counts() const noexcept { return counts_; }
  const std::vector<std::size_t>& current() const noexcept { return current_; }
  const Domain& domain() const noexcept { return domain_; }

 private:
  void select();
  double noisy_count(std::size_t item) const;
  void release();

  Domain domain_;
  SparseGumbConfig config_;
  NoiseSource src_;
  TreeParams tree_;
  std::int64_t t_ = 0;
  int remaining_;
  int selections_ = 0;
  int tree_instances_ = 0;
  int threshold_draws_ = 0;
  double z_ = 0.0;
  std::vector<Count> counts_;
  std::vector<std::size_t> current_;
  std::vector<std::uint8_t> in_current_;
  std::vector<std::int64_t> switch_rounds_;
  SparseGumbRound round_;
};

struct SparseGumbResult {
  std::vector<SparseGumbRound> rounds;
  std::vector<std::int64_t> switch_rounds;
  int selections = 0;
  int tree_instances = 0;
};

SparseGumbResult sparse_gumb_run(const EventStream& stream, const Domain& domain,
                                 const SparseGumbConfig& config, const NoiseSource& src);

// Per-round |released count of the selected item - true max count| and its max.
struct ErrorReport {
  std::vector<double> trace;
  double err = 0.0;
};

// selected[t-1] is the single (top-1) release of round t.
ErrorReport error_metric(std::span<const NoisyEntry> selected, const EventStream& stream);
ErrorReport error_metric(std::span<const SparseGumbRound> rounds, const EventStream& stream);

struct UtilityAlphas {
  double alpha1 = 0.0;    // sqrt(s) tau ln(d/beta)
  double alpha2 = 0.0;    // alpha2_factor * alpha1
  double alpha_bm = 0.0;  // tau L_r sqrt(2 (s+1)(r-1) ln(6T/beta))
  double alpha_at = 0.0;  // 8 tau sqrt(s) ln(6 d T/beta)
  double eta() const { return alpha2 + alpha_bm + alpha_at; }
  double alpha3_min() const { return alpha2 + 2.0 * alpha_bm + 2.0 * alpha_at; }
};

UtilityAlphas utility_alphas(int s, double tau, int base, std::size_t d, std::int64_t T,
                             double beta, double alpha2_factor = 1.0);

// alpha1 + alpha_bm + alpha_at (alpha2 taken equal to alpha1).
double recommended_eta(const SparseGumbConfig& config, std::size_t d, std::int64_t T, double beta);

}  // namespace contmech
