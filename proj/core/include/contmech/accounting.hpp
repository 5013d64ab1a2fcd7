#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace contmech {

struct ZcdpBudget {
  double rho = 0.0;
  double delta_event = 0.0;
};

struct DpBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct Composition {
  ZcdpBudget total;
  bool saturated = false;  // summed delta_event reached 1 and was clamped
};

Composition compose(std::span<const ZcdpBudget> budgets);

// epsilon = rho + 2 sqrt(rho ln(1/delta_prime)); delta = delta_event + delta_prime.
DpBudget zcdp_to_dp(const ZcdpBudget& b, double delta_prime);

// Closed-form inverse of zcdp_to_dp in rho.
double calibrate_rho(const DpBudget& target, double delta_prime);

enum class MechanismKind {
  BinMech,
  KnownBase,
  KnownGauss,
  KnownGumbel,
  SparseGumb,
  UnkGauss,
  UnkGumbel,
  UnkBase,
  MetaKnownRestricted,
  MetaKnownUnrestricted,
  MetaUnknownRestricted,
  MetaUnknownUnrestricted,
};

std::string_view to_string(MechanismKind kind);
// Accepts CLI names such as "known-base" or "meta-uu". Throws UsageError.
MechanismKind parse_mechanism(std::string_view name);

struct MechanismDescriptor {
  MechanismKind kind = MechanismKind::BinMech;
  int delta0 = 1;    // l0-sensitivity
  int k = 1;         // released top-k
  int k_bar = 1;     // cut-off of the limited histogram
  int switches = 0;  // SparseGumb switch budget s
};

struct PrivacyParams {
  double tau = 1.0;
  double delta = 0.0;        // threshold mass
  double delta_prime = 0.0;  // conversion slack
  bool noiseless = false;    // permits tau == 0 for test runs

  void validate() const;
};

// Budgets in the exact form rho = rho_numerator / (2 tau^2) and
// delta_event = delta_multiplier * delta, with integer coefficients.
struct BudgetCoefficients {
  std::int64_t rho_numerator = 0;
  std::int64_t delta_multiplier = 0;
};

BudgetCoefficients budget_coefficients(const MechanismDescriptor& mech);
ZcdpBudget mechanism_budget(const MechanismDescriptor& mech, const PrivacyParams& params);

// Full calibration for a target (epsilon, delta).
struct Calibration {
  double tau = 0.0;
  double rho = 0.0;
  double delta_prime = 0.0;
  double delta_threshold = 0.0;  // per-mechanism delta handed to thresholds
  ZcdpBudget budget;
  DpBudget achieved;
};

// Mechanisms with a threshold mass split the user's delta evenly between
// delta_event and delta_prime; known-domain mechanisms use all of it as
// delta_prime.
Calibration calibrate(const MechanismDescriptor& mech, const DpBudget& target);

}  // namespace contmech
