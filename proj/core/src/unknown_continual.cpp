#include "contmech/unknown_continual.hpp"

#include <cmath>

#include "contmech/error.hpp"

namespace contmech {

double unk_base_threshold(const TreeParams& tree, double delta) {
  require(delta > 0.0 && delta < 1.0, "unk_base: delta must lie in (0, 1)");
  const double spread = tree.tau * tree.levels() * std::sqrt(static_cast<double>(tree.r - 1));
  return spread * normal_upper_quantile(delta / static_cast<double>(tree.T)) + 1.0;
}

UnkBase::UnkBase(const UnkBaseConfig& config, NoiseSource src)
    : config_(config),
      src_(src),
      m_delta_(unk_base_threshold(config.tree, config.delta)),
      sigma_(config.tree.cell_sigma()) {
  require(config.delta0 >= 1, "UnkBase: delta0 must be at least 1");
}

double UnkBase::cell_noise(const Label& label, const Cell& c) const {
  return contmech::cell_noise(src_, TreeKey{tag::kUnkBase, label_key(label)}, c, sigma_);
}

NoisyRelease UnkBase::step(const Event& event) {
  require(t_ < config_.tree.T, "UnkBase: stream longer than T");
  check_event(event, config_.delta0);
  ++t_;
  for (const auto& label : event) ++counts_[label];
  if (!config_.persistent_discovery) discovered_.clear();
  NoisyRelease out;
  out.threshold = m_delta_;
  for (const auto& [label, h] : counts_) {
    const TreeKey key{tag::kUnkBase, label_key(label)};
    double noisy = static_cast<double>(h);
    for_each_prefix_cell(t_, config_.tree.r, [&](const Cell& c) {
      const double z = contmech::cell_noise(src_, key, c, sigma_);
      if (observer_) observer_(label, c, z);
      noisy += z;
    });
    const bool above = noisy > m_delta_;
    if (above) discovered_.insert(label);
    if (above || (config_.persistent_discovery && discovered_.contains(label)))
      out.entries.push_back({label, noisy});
  }
  return out;
}

ReleaseSequence unk_base(const EventStream& stream, const UnkBaseConfig& config,
                         const NoiseSource& src) {
  UnkBase mech(config, src);
  ReleaseSequence out;
  out.reserve(stream.size());
  for (const auto& event : stream) out.push_back(mech.step(event));
  return out;
}

double discovery_probability_bound(double c, const TreeParams& tree) {
  require(c > 0.0, "discovery_probability_bound: c must be positive");
  return normal_cdf(c / (std::sqrt(static_cast<double>(tree.r - 1)) * tree.levels()));
}

double conditional_error_bound(double c, double eta, const TreeParams& tree) {
  require(c > 0.0 && c < eta, "conditional_error_bound: need 0 < c < eta");
  const double s = std::sqrt(static_cast<double>(tree.r - 1)) * tree.levels();
  return normal_cdf(-eta / s) / normal_cdf(c / s);
}

}  // namespace contmech
