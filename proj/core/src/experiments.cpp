#include "contmech/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "contmech/csv.hpp"
#include "contmech/error.hpp"
#include "contmech/known_domain.hpp"
#include "contmech/meta_algo.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

std::vector<BaseNoiseRow> base_noise_rows(std::int64_t T, int r_max) {
  require(T >= 2 && r_max >= 2, "base_noise_rows: need T >= 2 and r_max >= 2");
  const double base2 = static_cast<double>(base_objective(T, 2));
  std::vector<BaseNoiseRow> rows;
  const int top = static_cast<int>(std::min<std::int64_t>(r_max, T));
  for (int r = 2; r <= top; ++r) {
    const std::int64_t obj = base_objective(T, r);
    rows.push_back({T, r, obj, std::sqrt(static_cast<double>(obj) / base2)});
  }
  return rows;
}

std::vector<std::int64_t> log_grid(std::int64_t t_min, std::int64_t t_max, int per_decade) {
  require(t_min >= 1 && t_max >= t_min && per_decade >= 1, "log_grid: invalid range");
  std::vector<std::int64_t> out;
  const double lo = std::log10(static_cast<double>(t_min));
  const double hi = std::log10(static_cast<double>(t_max));
  const int steps = static_cast<int>(std::floor((hi - lo) * per_decade + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const auto t = static_cast<std::int64_t>(std::llround(std::pow(10.0, lo + static_cast<double>(k) / per_decade)));
    if (out.empty() || t > out.back()) out.push_back(std::min(t, t_max));
  }
  if (out.back() != t_max) out.push_back(t_max);
  return out;
}

void write_base_noise_csv(std::ostream& out, const std::vector<BaseNoiseRow>& rows, bool with_t) {
  std::vector<std::string> header{"r", "objective", "std_ratio_vs_base2"};
  if (with_t) header.insert(header.begin(), "t");
  CsvWriter csv(out, header);
  for (const auto& row : rows) {
    std::vector<std::string> f{std::to_string(row.r), std::to_string(row.objective),
                               format_number(row.std_ratio_vs_base2)};
    if (with_t) f.insert(f.begin(), std::to_string(row.T));
    csv.row(f);
  }
}

// ---- Error traces under ranking shifts ----

const ErrorSeries& Fig4Result::find(const std::string& name, int s, double eta_factor) const {
  for (const auto& e : series)
    if (e.name == name && e.s == s && e.eta_factor == eta_factor) return e;
  throw UsageError("fig4: no series " + name);
}

namespace {

std::vector<std::vector<std::size_t>> event_indices(const EventStream& stream, const Domain& domain) {
  std::vector<std::vector<std::size_t>> out(stream.size());
  for (std::size_t t = 0; t < stream.size(); ++t)
    for (const auto& label : stream[t]) out[t].push_back(domain.index(label));
  return out;
}

std::vector<Count> running_max(const std::vector<std::vector<std::size_t>>& items, std::size_t d) {
  std::vector<Count> counts(d, 0), out;
  Count best = 0;
  for (const auto& ev : items) {
    for (std::size_t i : ev) best = std::max(best, ++counts[i]);
    out.push_back(best);
  }
  return out;
}

}  // namespace

Fig4Result run_fig4(const Fig4Config& config) {
  require(config.trials >= 1, "fig4: trials must be at least 1");
  Fig4Result result;
  result.config = config;
  const Domain domain(make_domain(config.d));
  const std::int64_t T = config.T;
  const int base = static_cast<int>(std::min<std::int64_t>(config.base, std::max<std::int64_t>(T, 2)));
  const NoiseSource root(config.seed);

  // Scalings that give every mechanism rho = 1/(2 tau^2).
  const double tau_known_base = config.tau * std::sqrt(static_cast<double>(config.d));  // delta0 = d
  const double tau_meta = config.tau * std::sqrt(2.0);                                  // k = 1
  const double tau_sparse = config.tau * std::sqrt(6.0);                                // 2k + 4 = 6

  std::vector<ErrorSeries> series;
  series.push_back({"known-base", 0, 0.0, 0.0, std::vector<double>(static_cast<std::size_t>(T), 0.0), 0.0});
  series.push_back({"meta-ku", 0, 0.0, 0.0, std::vector<double>(static_cast<std::size_t>(T), 0.0), 0.0});
  std::vector<SparseGumbConfig> sparse_cfgs;
  for (int s : config.s_values) {
    for (double f : config.eta_factors) {
      SparseGumbConfig c;
      c.s = s;
      c.k = 1;
      c.tau = tau_sparse;
      c.base = base;
      c.T = T;
      const double eta = f * recommended_eta(c, config.d, T, config.beta);
      c.eta = {eta};
      sparse_cfgs.push_back(c);
      series.push_back({"sparse-gumb", s, eta, f, std::vector<double>(static_cast<std::size_t>(T), 0.0), 0.0});
    }
  }

  const double inv = 1.0 / config.trials;
  for (int trial = 0; trial < config.trials; ++trial) {
    const auto tr = static_cast<std::uint64_t>(trial);
    StreamSpec spec;
    spec.kind = StreamKind::SwitchingZipf;
    spec.d = config.d;
    spec.T = T;
    spec.zipf_exponent = config.zipf_exponent;
    spec.switch_times = config.switch_times;
    spec.seed = root.fork(0, tr).seed();
    const EventStream stream = generate(spec);
    const auto items = event_indices(stream, domain);
    const auto best = running_max(items, config.d);

    {
      KnownBase kb(domain, TreeParams(T, base, tau_known_base), static_cast<int>(config.d), root.fork(1, tr));
      auto& acc = series[0].mean_error;
      for (std::int64_t t = 1; t <= T; ++t) {
        const auto& noisy = kb.step_indices(items[static_cast<std::size_t>(t - 1)]);
        const auto top = std::max_element(noisy.begin(), noisy.end());
        acc[static_cast<std::size_t>(t - 1)] +=
            inv * std::fabs(*top - static_cast<double>(best[static_cast<std::size_t>(t - 1)]));
      }
    }
    {
      MetaConfig mc;
      mc.quadrant = Quadrant::KnownUnrestricted;
      mc.tree = TreeParams(T, base, tau_meta);
      mc.k = 1;
      mc.domain = domain.labels();
      MetaAlgo meta(stream, mc, root.fork(2, tr));
      auto& acc = series[1].mean_error;
      for (std::int64_t t = 1; t <= T; ++t) {
        const NoisyRelease rel = meta.round(t);
        double top = 0.0;
        bool any = false;
        for (const auto& e : rel.entries)
          if (!any || e.value > top) {
            top = e.value;
            any = true;
          }
        acc[static_cast<std::size_t>(t - 1)] +=
            inv * std::fabs(top - static_cast<double>(best[static_cast<std::size_t>(t - 1)]));
      }
    }
    for (std::size_t c = 0; c < sparse_cfgs.size(); ++c) {
      SparseGumb sg(domain, sparse_cfgs[c], root.fork(3 + c, tr));
      auto& acc = series[2 + c].mean_error;
      for (std::int64_t t = 1; t <= T; ++t) {
        const auto& round = sg.step_indices(items[static_cast<std::size_t>(t - 1)]);
        acc[static_cast<std::size_t>(t - 1)] +=
            inv * std::fabs(round.selected.front().value - static_cast<double>(best[static_cast<std::size_t>(t - 1)]));
      }
      series[2 + c].mean_switches += inv * static_cast<double>(sg.switch_rounds().size());
    }
  }
  result.series = std::move(series);
  return result;
}

void write_fig4_csv(std::ostream& out, const Fig4Result& result) {
  CsvWriter csv(out, {"series", "s", "eta", "t", "mean_error"});
  for (const auto& e : result.series)
    for (std::size_t i = 0; i < e.mean_error.size(); ++i)
      csv.row({e.name, std::to_string(e.s), format_number(e.eta), std::to_string(i + 1),
               format_number(e.mean_error[i])});
}

double window_mean(const std::vector<double>& trace, std::int64_t first, std::int64_t last) {
  require(first >= 1 && last >= first && last <= static_cast<std::int64_t>(trace.size()),
          "window_mean: bad window");
  double sum = 0.0;
  for (std::int64_t t = first; t <= last; ++t) sum += trace[static_cast<std::size_t>(t - 1)];
  return sum / static_cast<double>(last - first + 1);
}

double window_slope(const std::vector<double>& trace, std::int64_t first, std::int64_t last) {
  require(first >= 1 && last > first && last <= static_cast<std::int64_t>(trace.size()),
          "window_slope: bad window");
  const double xbar = 0.5 * static_cast<double>(first + last);
  const double ybar = window_mean(trace, first, last);
  double sxy = 0.0, sxx = 0.0;
  for (std::int64_t t = first; t <= last; ++t) {
    const double dx = static_cast<double>(t) - xbar;
    sxy += dx * (trace[static_cast<std::size_t>(t - 1)] - ybar);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---- Error scaling on Assumption-1 streams ----

ScalingCell scaling_cell_setup(int s, std::size_t d, const ScalingConfig& config) {
  require(s >= 1 && d > static_cast<std::size_t>(s), "scaling: need s >= 1 and d > s");
  ScalingCell cell;
  cell.s = s;
  cell.d = d;
  std::int64_t T = 1000;
  for (int iter = 0; iter < 100; ++iter) {
    const UtilityAlphas a = utility_alphas(s, config.tau, config.base, d, T, config.beta, 2.0);
    const double alpha3 = a.alpha3_min();
    const std::int64_t lead = static_cast<std::int64_t>(std::ceil(alpha3)) + 1;
    const std::int64_t next = assumption1_length(s, lead, config.quiet_rounds);
    cell.alphas = a;
    cell.alpha3 = alpha3;
    if (next == T) break;
    T = next;
  }
  cell.T = assumption1_length(s, static_cast<std::int64_t>(std::ceil(cell.alpha3)) + 1, config.quiet_rounds);
  cell.alphas = utility_alphas(s, config.tau, config.base, d, cell.T, config.beta, 2.0);
  cell.alpha3 = cell.alphas.alpha3_min();
  cell.eta = cell.alphas.eta();
  const double lg = std::log(static_cast<double>(d) * static_cast<double>(cell.T) / config.beta);
  cell.norm = config.tau * std::sqrt(static_cast<double>(s)) * std::pow(lg, 1.5);
  cell.bound_constant = (cell.alphas.alpha_bm + cell.alpha3 + 1.0) / cell.norm;
  return cell;
}

ScalingResult run_scaling(const ScalingConfig& config) {
  require(config.trials >= 1, "scaling: trials must be at least 1");
  ScalingResult result;
  result.config = config;
  for (int s : config.s_values)
    for (std::size_t d : config.d_values) result.cells.push_back(scaling_cell_setup(s, d, config));
  for (const auto& c : result.cells) result.constant = std::max(result.constant, c.bound_constant);

  const NoiseSource root(config.seed);
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    ScalingCell& cell = result.cells[ci];
    const std::int64_t lead = static_cast<std::int64_t>(std::ceil(cell.alpha3)) + 1;
    SparseGumbConfig sg_cfg;
    sg_cfg.s = cell.s;
    sg_cfg.k = 1;
    sg_cfg.tau = config.tau;
    sg_cfg.eta = {cell.eta};
    sg_cfg.base = config.base;
    sg_cfg.T = cell.T;
    cell.stream_valid = true;
    int failures = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      const auto tr = static_cast<std::uint64_t>(trial);
      const auto a1 = generate_assumption1(cell.s, cell.d, cell.alphas.alpha1, cell.alphas.alpha2, cell.alpha3,
                                           lead, config.quiet_rounds, root.fork(2 * ci, tr).seed());
      require(static_cast<std::int64_t>(a1.stream.size()) == cell.T, "scaling: stream length mismatch");
      if (trial == 0 && !validate_assumption1(a1.stream, a1.domain, a1.layout).ok) cell.stream_valid = false;
      const auto run = sparse_gumb_run(a1.stream, Domain(a1.domain), sg_cfg, root.fork(2 * ci + 1, tr));
      const double err = error_metric(run.rounds, a1.stream).err;
      const double z = err / cell.norm;
      cell.normalized_err.push_back(z);
      if (z > result.constant) ++failures;
      cell.mean_switches += static_cast<double>(run.switch_rounds.size()) / config.trials;
    }
    cell.failure_fraction = static_cast<double>(failures) / config.trials;
    std::vector<double> sorted = cell.normalized_err;
    std::sort(sorted.begin(), sorted.end());
    const double q = 1.0 - cell.s * config.beta;
    const auto idx = static_cast<std::size_t>(
        std::min<double>(std::ceil(q * static_cast<double>(sorted.size())) - 1.0, static_cast<double>(sorted.size() - 1)));
    cell.quantile = sorted[idx];
  }
  return result;
}

void write_scaling_csv(std::ostream& out, const ScalingResult& result) {
  CsvWriter csv(out, {"s", "d", "T", "norm", "bound_constant", "constant", "failure_fraction", "quantile",
                      "mean_switches"});
  for (const auto& c : result.cells)
    csv.row({std::to_string(c.s), std::to_string(c.d), std::to_string(c.T), format_number(c.norm),
             format_number(c.bound_constant), format_number(result.constant), format_number(c.failure_fraction),
             format_number(c.quantile), format_number(c.mean_switches)});
}

}  // namespace contmech
