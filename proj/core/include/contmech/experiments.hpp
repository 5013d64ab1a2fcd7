#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "contmech/sparse_gumb.hpp"
#include "contmech/stream_lab.hpp"

namespace contmech {

// ---- Base-noise comparison ----

struct BaseNoiseRow {
  std::int64_t T = 0;
  int r = 2;
  std::int64_t objective = 0;       // (r-1) L_r^2
  double std_ratio_vs_base2 = 1.0;  // sqrt(objective / objective at r = 2)
};

// One row per r in [2, min(r_max, T)] at horizon T.
std::vector<BaseNoiseRow> base_noise_rows(std::int64_t T, int r_max = 16);
// Log-spaced horizons from t_min to t_max, `per_decade` per decade, t_max included.
std::vector<std::int64_t> log_grid(std::int64_t t_min, std::int64_t t_max, int per_decade);

// Columns r,objective,std_ratio_vs_base2 (sweep adds a leading t column).
void write_base_noise_csv(std::ostream& out, const std::vector<BaseNoiseRow>& rows, bool with_t);

// ---- Error traces on switching Zipf streams ----

struct Fig4Config {
  std::size_t d = 100;
  std::int64_t T = 1000;
  int trials = 200;
  double zipf_exponent = 1.0;
  std::vector<std::int64_t> switch_times{200, 500};
  double tau = 1.0;  // every mechanism is scaled to rho = 1/(2 tau^2)
  double beta = 0.05;
  int base = 2;
  std::vector<int> s_values{1, 3, 5};
  std::vector<double> eta_factors{0.25, 0.5, 1.0, 2.0};  // multiples of recommended_eta
  std::uint64_t seed = 7;
};

struct ErrorSeries {
  std::string name;  // "known-base", "meta-ku" or "sparse-gumb"
  int s = 0;
  double eta = 0.0;
  double eta_factor = 0.0;
  std::vector<double> mean_error;  // mean over trials, index t-1
  double mean_switches = 0.0;
};

struct Fig4Result {
  Fig4Config config;
  std::vector<ErrorSeries> series;
  const ErrorSeries& find(const std::string& name, int s = 0, double eta_factor = 0.0) const;
};

Fig4Result run_fig4(const Fig4Config& config);
// Columns series,s,eta,t,mean_error.
void write_fig4_csv(std::ostream& out, const Fig4Result& result);

// Mean of trace[first-1 .. last-1].
double window_mean(const std::vector<double>& trace, std::int64_t first, std::int64_t last);
// Least-squares slope of trace over rounds [first, last].
double window_slope(const std::vector<double>& trace, std::int64_t first, std::int64_t last);

// ---- Error scaling on Assumption-1 streams ----

struct ScalingConfig {
  std::vector<int> s_values{1, 2, 3};
  std::vector<std::size_t> d_values{8, 32, 128};
  int trials = 200;
  double beta = 0.02;
  double tau = 0.25;
  int base = 2;
  std::int64_t quiet_rounds = 10;
  std::uint64_t seed = 11;
};

struct ScalingCell {
  int s = 0;
  std::size_t d = 0;
  std::int64_t T = 0;
  UtilityAlphas alphas;  // alpha2 = 2 alpha1
  double alpha3 = 0.0;
  double eta = 0.0;
  double norm = 0.0;           // tau sqrt(s) log^{3/2}(d T / beta)
  double bound_constant = 0.0;  // (alpha_bm + alpha3 + 1) / norm
  bool stream_valid = false;
  std::vector<double> normalized_err;  // Err / norm per trial
  double failure_fraction = 0.0;       // share of trials above the shared constant
  double quantile = 0.0;               // empirical (1 - s beta) quantile of normalized_err
  double mean_switches = 0.0;
};

struct ScalingResult {
  ScalingConfig config;
  double constant = 0.0;  // max bound_constant over the grid, fixed before any trial
  std::vector<ScalingCell> cells;
};

// Stream length and alphas for one grid cell: lead = ceil(alpha3) + 1 with
// alpha3 = alpha2 + 2 alpha_bm + 2 alpha_at at the resulting T (fixed point).
ScalingCell scaling_cell_setup(int s, std::size_t d, const ScalingConfig& config);
ScalingResult run_scaling(const ScalingConfig& config);
// Columns s,d,T,norm,bound_constant,constant,failure_fraction,quantile,mean_switches.
void write_scaling_csv(std::ostream& out, const ScalingResult& result);

}  // namespace contmech
