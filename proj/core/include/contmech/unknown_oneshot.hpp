#pragma once

#include <utility>
#include <vector>

#include "contmech/histogram.hpp"
#include "contmech/noise.hpp"

namespace contmech {

// The top-(k_bar+1) positive counts of a histogram, descending.
class LimitedHistogram {
 public:
  // Entries must be strictly positive, descending, with at most k_bar+1 of them.
  LimitedHistogram(std::vector<std::pair<Label, Count>> top, int k_bar);

  // Count ties are broken by label ascending.
  static LimitedHistogram from_histogram(const LabeledHistogram& h, int k_bar);

  const std::vector<std::pair<Label, Count>>& top() const noexcept { return top_; }
  int k_bar() const noexcept { return k_bar_; }
  // h_(k_bar+1); 0 when fewer than k_bar+1 items have positive count.
  Count cutoff_count() const noexcept;

 private:
  std::vector<std::pair<Label, Count>> top_;
  int k_bar_;
};

// h_(k_bar+1) + 1 + sqrt(2) tau Phi^-1(1 - delta)
double unk_gauss_threshold(Count cutoff, double tau, double delta);
// h_(k_bar+1) + 1 + tau ln(1/delta)
double unk_gumbel_threshold(Count cutoff, double tau, double delta);

// Gaussian noise on the top-k_bar positive items and on the threshold; items
// strictly above the noisy threshold are released, descending. A tie with the
// threshold is suppressed.
NoisyRelease unk_gauss(const LimitedHistogram& h, double tau, double delta, const NoiseSource& src);

// Gumbel race among items with count above h_(k_bar+1) and the threshold.
// Releases the first k survivors (selection order) with fresh Gaussian counts;
// with fewer than k survivors they are all released and bottom_present is set.
NoisyRelease unk_gumbel(const LimitedHistogram& h, int k, double tau, double delta,
                        const NoiseSource& src);

}  // namespace contmech
