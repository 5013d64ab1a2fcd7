#include "contmech/sparse_gumb.hpp"

#include <algorithm>
#include <cmath>

#include "contmech/error.hpp"

namespace contmech {

double SparseGumbConfig::tau1() const { return std::sqrt(static_cast<double>(s)) * tau; }
double SparseGumbConfig::tau2() const { return std::sqrt(static_cast<double>(s + 1)) * tau; }

double SparseGumbConfig::eta_at(std::int64_t t) const {
  if (eta.size() == 1) return eta.front();
  return eta.at(static_cast<std::size_t>(t - 1));
}

void SparseGumbConfig::validate(std::size_t d) const {
  require(s >= 0, "sparse_gumb: switch budget must be non-negative");
  require(k >= 1 && static_cast<std::size_t>(k) <= d, "sparse_gumb: k must lie in [1, d]");
  require(tau >= 0.0, "sparse_gumb: tau must be non-negative");
  require(T >= 1, "sparse_gumb: T must be positive");
  require(eta.size() == 1 || static_cast<std::int64_t>(eta.size()) == T,
          "sparse_gumb: eta must hold one value or one per round");
  for (double e : eta) require(e >= 0.0, "sparse_gumb: eta must be non-negative");
}

SparseGumb::SparseGumb(Domain domain, const SparseGumbConfig& config, NoiseSource src)
    : domain_(std::move(domain)),
      config_(config),
      src_(src),
      tree_(config.T, std::min<std::int64_t>(config.base, std::max<std::int64_t>(config.T, 2)), config.tau2()),
      remaining_(config.s) {
  config_.validate(domain_.size());
  counts_.assign(domain_.size(), 0);
  in_current_.assign(domain_.size(), 0);
}

void SparseGumb::select() {
  const std::uint64_t e = static_cast<std::uint64_t>(selections_);
  for (std::size_t i : current_) in_current_[i] = 0;
  current_ = gumbel_topk_indices(counts_, domain_, config_.k, config_.tau2(),
                                 src_.fork(tag::kGumbelSelect, e));
  for (std::size_t i : current_) in_current_[i] = 1;
  ++selections_;
  tree_instances_ += config_.k;
  z_ = src_.laplace({tag::kSvtThreshold, 0, e}, 2.0 * config_.tau1());
  ++threshold_draws_;
}

double SparseGumb::noisy_count(std::size_t item) const {
  const NoiseSource trees = src_.fork(tag::kTree, static_cast<std::uint64_t>(selections_ - 1));
  return static_cast<double>(counts_[item]) +
         prefix_noise(tree_, trees, TreeKey{tag::kTree, domain_.key(item)}, t_);
}

void SparseGumb::release() {
  round_.selected.clear();
  for (std::size_t i : current_) round_.selected.push_back({domain_.label(i), noisy_count(i)});
}

const SparseGumbRound& SparseGumb::step_indices(std::span<const std::size_t> items) {
  require(t_ < config_.T, "sparse_gumb: stream longer than T");
  ++t_;
  for (std::size_t i : items) {
    require(i < domain_.size(), "sparse_gumb: item index outside the domain");
    ++counts_[i];
  }
  round_.switched = false;
  if (t_ == 1) {
    select();
    release();
    return round_;
  }
  if (remaining_ > 0) {
    double low = 0.0;
    bool first = true;
    for (std::size_t i : current_) {
      const double v = noisy_count(i);
      if (first || v < low) low = v;
      first = false;
    }
    const double m_hat = low + config_.eta_at(t_) + z_;
    const double q_scale = 4.0 * config_.tau1();
    for (std::size_t u = 0; u < domain_.size(); ++u) {
      if (in_current_[u]) continue;
      const double q = static_cast<double>(counts_[u]) +
                       src_.laplace({tag::kSvtQuery, domain_.key(u), static_cast<std::uint64_t>(t_)}, q_scale);
      if (q > m_hat) {
        select();
        --remaining_;
        switch_rounds_.push_back(t_);
        round_.switched = true;
        break;
      }
    }
  }
  release();
  return round_;
}

const SparseGumbRound& SparseGumb::step(const Event& event) {
  std::vector<std::size_t> items;
  items.reserve(event.size());
  for (const auto& label : event) items.push_back(domain_.index(label));
  std::vector<std::size_t> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "event contains a duplicate label");
  return step_indices(items);
}

SparseGumbResult sparse_gumb_run(const EventStream& stream, const Domain& domain,
                                 const SparseGumbConfig& config, const NoiseSource& src) {
  SparseGumb mech(domain, config, src);
  SparseGumbResult out;
  out.rounds.reserve(stream.size());
  for (const auto& event : stream) out.rounds.push_back(mech.step(event));
  out.switch_rounds = mech.switch_rounds();
  out.selections = mech.selections();
  out.tree_instances = mech.tree_instances();
  return out;
}

ErrorReport error_metric(std::span<const NoisyEntry> selected, const EventStream& stream) {
  require(selected.size() == stream.size(), "error_metric: one selection per round is required");
  ErrorReport out;
  out.trace.reserve(stream.size());
  LabeledHistogram h;
  Count best = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (const auto& label : stream[t]) {
      h.add(label);
      best = std::max(best, h.get(label));
    }
    const double e = std::fabs(selected[t].value - static_cast<double>(best));
    out.trace.push_back(e);
    out.err = std::max(out.err, e);
  }
  return out;
}

ErrorReport error_metric(std::span<const SparseGumbRound> rounds, const EventStream& stream) {
  std::vector<NoisyEntry> top1;
  top1.reserve(rounds.size());
  for (const auto& r : rounds) {
    require(r.selected.size() == 1, "error_metric: defined for k = 1 only");
    top1.push_back(r.selected.front());
  }
  return error_metric(top1, stream);
}

UtilityAlphas utility_alphas(int s, double tau, int base, std::size_t d, std::int64_t T,
                             double beta, double alpha2_factor) {
  require(beta > 0.0 && beta < 1.0, "utility_alphas: beta must lie in (0, 1)");
  require(s >= 0 && d >= 1 && T >= 1 && base >= 2, "utility_alphas: invalid parameters");
  const double sd = static_cast<double>(d);
  const double sT = static_cast<double>(T);
  const double rs = std::sqrt(static_cast<double>(s));
  UtilityAlphas a;
  a.alpha1 = rs * tau * std::log(sd / beta);
  a.alpha2 = alpha2_factor * a.alpha1;
  a.alpha_bm = tau * tree_levels(T, base) *
               std::sqrt(2.0 * (s + 1) * (base - 1) * std::log(6.0 * sT / beta));
  a.alpha_at = 8.0 * tau * rs * std::log(6.0 * sd * sT / beta);
  return a;
}

double recommended_eta(const SparseGumbConfig& config, std::size_t d, std::int64_t T, double beta) {
  return utility_alphas(config.s, config.tau, config.base, d, T, beta, 1.0).eta();
}

}  // namespace contmech
