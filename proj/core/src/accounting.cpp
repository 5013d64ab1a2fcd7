#include "contmech/accounting.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "contmech/error.hpp"

namespace contmech {

Composition compose(std::span<const ZcdpBudget> budgets) {
  require(!budgets.empty(), "compose: budget list is empty");
  Composition out;
  for (const auto& b : budgets) {
    require(b.rho >= 0.0, "compose: rho must be non-negative");
    require(b.delta_event >= 0.0 && b.delta_event < 1.0, "compose: delta_event must lie in [0, 1)");
    out.total.rho += b.rho;
    out.total.delta_event += b.delta_event;
  }
  if (out.total.delta_event >= 1.0) {
    out.total.delta_event = 1.0;
    out.saturated = true;
  }
  return out;
}

DpBudget zcdp_to_dp(const ZcdpBudget& b, double delta_prime) {
  require(delta_prime > 0.0 && delta_prime < 1.0, "zcdp_to_dp: delta_prime must lie in (0, 1)");
  require(b.rho >= 0.0, "zcdp_to_dp: rho must be non-negative");
  return {b.rho + 2.0 * std::sqrt(b.rho * std::log(1.0 / delta_prime)), b.delta_event + delta_prime};
}

double calibrate_rho(const DpBudget& target, double delta_prime) {
  require(target.epsilon > 0.0, "calibrate_rho: epsilon must be positive");
  require(delta_prime > 0.0 && delta_prime < 1.0, "calibrate_rho: delta_prime must lie in (0, 1)");
  require(delta_prime <= target.delta, "calibrate_rho: delta_prime exceeds target delta");
  const double l = std::log(1.0 / delta_prime);
  // sqrt(rho) solves x^2 + 2 sqrt(l) x - eps = 0; written without cancellation.
  const double x = target.epsilon / (std::sqrt(l + target.epsilon) + std::sqrt(l));
  return x * x;
}

namespace {

struct KindName {
  MechanismKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 12> kNames{{
    {MechanismKind::BinMech, "bin-mech"},
    {MechanismKind::KnownBase, "known-base"},
    {MechanismKind::KnownGauss, "known-gauss"},
    {MechanismKind::KnownGumbel, "known-gumbel"},
    {MechanismKind::SparseGumb, "sparse-gumb"},
    {MechanismKind::UnkGauss, "unk-gauss"},
    {MechanismKind::UnkGumbel, "unk-gumbel"},
    {MechanismKind::UnkBase, "unk-base"},
    {MechanismKind::MetaKnownRestricted, "meta-kr"},
    {MechanismKind::MetaKnownUnrestricted, "meta-ku"},
    {MechanismKind::MetaUnknownRestricted, "meta-ur"},
    {MechanismKind::MetaUnknownUnrestricted, "meta-uu"},
}};

}  // namespace

std::string_view to_string(MechanismKind kind) {
  for (const auto& kn : kNames)
    if (kn.kind == kind) return kn.name;
  throw UsageError("unknown mechanism kind");
}

MechanismKind parse_mechanism(std::string_view name) {
  for (const auto& kn : kNames)
    if (kn.name == name) return kn.kind;
  throw UsageError("unknown mechanism: " + std::string(name));
}

void PrivacyParams::validate() const {
  if (noiseless) {
    require(tau >= 0.0, "tau must be non-negative");
  } else {
    require(tau > 0.0, "tau must be positive (tau = 0 needs the noiseless flag)");
  }
  require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  require(delta_prime >= 0.0 && delta_prime < 1.0, "delta_prime must lie in [0, 1)");
}

BudgetCoefficients budget_coefficients(const MechanismDescriptor& m) {
  require(m.delta0 >= 1, "delta0 must be at least 1");
  require(m.k >= 1, "k must be at least 1");
  require(m.k_bar >= 1, "k_bar must be at least 1");
  require(m.switches >= 0, "switches must be non-negative");
  switch (m.kind) {
    case MechanismKind::BinMech: return {1, 0};
    case MechanismKind::KnownBase: return {m.delta0, 0};
    case MechanismKind::KnownGauss: return {m.delta0, 0};
    case MechanismKind::KnownGumbel: return {2LL * m.k, 0};
    case MechanismKind::SparseGumb: return {2LL * m.k + 4, 0};
    case MechanismKind::UnkGauss: return {m.delta0, m.delta0};
    case MechanismKind::UnkGumbel: return {2LL * m.k, m.k_bar};
    case MechanismKind::UnkBase: return {m.delta0, m.delta0};
    case MechanismKind::MetaKnownRestricted: return {m.delta0, 0};
    case MechanismKind::MetaKnownUnrestricted: return {2LL * m.k, 0};
    case MechanismKind::MetaUnknownRestricted: return {m.delta0, m.delta0};
    case MechanismKind::MetaUnknownUnrestricted: return {2LL * m.k, 2LL * m.k};
  }
  throw UsageError("unknown mechanism kind");
}

ZcdpBudget mechanism_budget(const MechanismDescriptor& mech, const PrivacyParams& params) {
  params.validate();
  require(params.tau > 0.0, "mechanism_budget: tau must be positive");
  const auto c = budget_coefficients(mech);
  return {static_cast<double>(c.rho_numerator) / (2.0 * params.tau * params.tau),
          static_cast<double>(c.delta_multiplier) * params.delta};
}

Calibration calibrate(const MechanismDescriptor& mech, const DpBudget& target) {
  require(target.epsilon > 0.0, "calibrate: epsilon must be positive");
  require(target.delta > 0.0 && target.delta < 1.0, "calibrate: delta must lie in (0, 1)");
  const auto c = budget_coefficients(mech);
  Calibration out;
  if (c.delta_multiplier == 0) {
    out.delta_prime = target.delta;
  } else {
    out.delta_prime = target.delta / 2.0;
    out.delta_threshold = out.delta_prime / static_cast<double>(c.delta_multiplier);
  }
  out.rho = calibrate_rho(target, out.delta_prime);
  out.tau = std::sqrt(static_cast<double>(c.rho_numerator) / (2.0 * out.rho));
  out.budget = mechanism_budget(mech, {out.tau, out.delta_threshold, out.delta_prime, false});
  out.achieved = zcdp_to_dp(out.budget, out.delta_prime);
  return out;
}

}  // namespace contmech
