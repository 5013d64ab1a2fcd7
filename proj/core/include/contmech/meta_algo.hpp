#pragma once

#include <map>
#include <string_view>

#include "contmech/histogram.hpp"
#include "contmech/known_domain.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

// Known/unknown domain x restricted/unrestricted l0-sensitivity.
enum class Quadrant { KnownRestricted, KnownUnrestricted, UnknownRestricted, UnknownUnrestricted };

std::string_view to_string(Quadrant q);   // "kr", "ku", "ur", "uu"
Quadrant parse_quadrant(std::string_view name);

struct MetaConfig {
  Quadrant quadrant = Quadrant::KnownRestricted;
  TreeParams tree;
  double delta = 0.05;  // split as delta / L_r per cell in unknown quadrants
  int delta0 = 1;       // restricted quadrants only
  int k = 1;            // released items per cell (ku, uu)
  int k_bar = 1;        // limited-histogram cut-off (ur, uu)
  std::vector<Label> domain;  // known quadrants only

  void validate() const;
};

// Partial-histogram table over a fully known stream. Each cell histogram is
// released once by the quadrant's one-shot mechanism at scale sqrt(L_r) tau,
// lazily on first use, with its own forked noise source. A round aggregates
// the releases of I_t(r); a label missing from a cell release counts as 0.
class MetaAlgo {
 public:
  MetaAlgo(EventStream stream, MetaConfig config, NoiseSource src);

  const LabeledHistogram& cell_histogram(const Cell& c);
  const NoisyRelease& cell_release(const Cell& c);
  // Aggregated release of round t in label order.
  NoisyRelease round(std::int64_t t);

  std::size_t cells_released() const noexcept { return releases_.size(); }
  const MetaConfig& config() const noexcept { return config_; }

 private:
  EventStream stream_;
  MetaConfig config_;
  NoiseSource src_;
  Domain domain_;
  double cell_tau_;
  double cell_delta_;
  std::map<Cell, LabeledHistogram> histograms_;
  std::map<Cell, NoisyRelease> releases_;
};

ReleaseSequence meta_run(const EventStream& stream, const MetaConfig& config,
                         const NoiseSource& src);

}  // namespace contmech
