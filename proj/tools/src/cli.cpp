#include "contmech_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "contmech/accounting.hpp"
#include "contmech/csv.hpp"
#include "contmech/error.hpp"
#include "contmech/experiments.hpp"
#include "contmech/known_domain.hpp"
#include "contmech/meta_algo.hpp"
#include "contmech/sparse_gumb.hpp"
#include "contmech/stream_lab.hpp"
#include "contmech/tree_mechanism.hpp"
#include "contmech/unknown_continual.hpp"
#include "contmech/unknown_oneshot.hpp"
#include "contmech/verify.hpp"

namespace contmech::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::set<std::string> kSubcommands{"simulate", "calibrate", "optimize-base", "verify", "experiment"};

// Turns the keys of a JSON config object into flags, skipping any flag that
// is already on the command line. Flags are inserted right after the
// subcommand so they reach its parser.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw UsageError("cannot open config file '" + *path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + *path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  auto present = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return format_number(v.get<double>());
    throw UsageError("config values must be strings, numbers, booleans or arrays of those");
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      if (value.empty()) continue;
      extra.push_back(flag);
      for (const auto& v : value) extra.push_back(scalar(v));
    } else {
      extra.push_back(flag);
      extra.push_back(scalar(value));
    }
  }
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return kSubcommands.contains(a); });
  if (sub == args.end()) throw UsageError("a subcommand is required");
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

// Writes to `path` when given, otherwise to `out`.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  write(f);
}

std::string default_out_path(const std::string& name) {
  const char* dir = std::getenv(kOutDirEnv);
  return (fs::path(dir && *dir ? dir : ".") / name).string();
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

// ---- calibrate ----

struct CalibrateOpts {
  double epsilon = 1.0;
  double delta = 1e-6;
  std::string mechanism;
  int k = 1;
  int k_bar = 1;
  int delta0 = 1;
  int switches = 1;
};

json calibration_json(const std::string& name, const MechanismDescriptor& mech, const DpBudget& target) {
  const Calibration c = calibrate(mech, target);
  const BudgetCoefficients co = budget_coefficients(mech);
  json j;
  j["mechanism"] = name;
  j["target"] = {{"epsilon", target.epsilon}, {"delta", target.delta}};
  j["tau"] = c.tau;
  j["rho"] = c.rho;
  j["rho_numerator"] = co.rho_numerator;
  j["delta_multiplier"] = co.delta_multiplier;
  j["delta_prime"] = c.delta_prime;
  j["delta_threshold"] = c.delta_threshold;
  j["delta_event"] = c.budget.delta_event;
  j["achieved"] = {{"epsilon", c.achieved.epsilon}, {"delta", c.achieved.delta}};
  return j;
}

int run_calibrate(const CalibrateOpts& o, std::ostream& out) {
  MechanismDescriptor mech;
  mech.kind = parse_mechanism(o.mechanism);
  mech.k = o.k;
  mech.k_bar = o.k_bar;
  mech.delta0 = o.delta0;
  mech.switches = o.switches;
  out << calibration_json(o.mechanism, mech, {o.epsilon, o.delta}).dump(2) << '\n';
  return kExitOk;
}

// ---- optimize-base ----

struct OptimizeOpts {
  std::int64_t t_max = 1024;
  bool sweep = false;
  int r_max = 16;
  std::string out;
};

int run_optimize(const OptimizeOpts& o, std::ostream& out) {
  require(o.t_max >= 2, "--t-max must be at least 2");
  std::vector<BaseNoiseRow> rows;
  if (o.sweep) {
    for (std::int64_t T : log_grid(2, o.t_max, 8)) {
      auto r = base_noise_rows(T, o.r_max);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else {
    rows = base_noise_rows(o.t_max, o.r_max);
  }
  emit(o.out, out, [&](std::ostream& os) { write_base_noise_csv(os, rows, o.sweep); });
  return kExitOk;
}

// ---- simulate ----

struct SimulateOpts {
  std::string mechanism;
  std::string quadrant = "kr";
  std::string stream = "zipf";
  std::size_t d = 100;
  std::int64_t T = 1000;
  double zipf_exponent = 1.0;
  std::vector<std::int64_t> switch_times;
  int events_per_round = 1;
  std::string stream_file;
  std::optional<double> tau;
  std::optional<double> epsilon;
  double delta = 0.05;
  int delta0 = 1;
  int k = 1;
  int k_bar = 5;
  int switches = 1;
  std::string eta = "auto";
  double beta = 0.05;
  int base = 2;
  std::uint64_t seed = 0;
  std::string out;
};

struct SimContext {
  EventStream stream;
  std::vector<Label> domain;
  double tau = 1.0;
  double delta = 0.05;  // threshold mass handed to the mechanism
  int base = 2;
  NoiseSource src;
};

std::vector<Label> domain_of(const EventStream& stream) {
  std::set<Label> labels;
  for (const auto& ev : stream) labels.insert(ev.begin(), ev.end());
  return {labels.begin(), labels.end()};
}

SimContext prepare(const SimulateOpts& o, const MechanismDescriptor& mech) {
  SimContext ctx{{}, {}, 1.0, o.delta, o.base, NoiseSource(o.seed).fork(1)};
  StreamSpec spec;
  spec.kind = parse_stream_kind(o.stream);
  spec.d = o.d;
  spec.T = o.T;
  spec.zipf_exponent = o.zipf_exponent;
  spec.switch_times = o.switch_times;
  spec.events_per_round = o.events_per_round;
  spec.path = o.stream_file;
  spec.seed = NoiseSource(o.seed).fork(0).seed();
  spec.s = std::max(1, o.switches);
  ctx.stream = generate(spec);
  require(!ctx.stream.empty(), "simulate: the stream is empty");
  ctx.domain = spec.kind == StreamKind::File ? domain_of(ctx.stream) : make_domain(o.d);
  require(!ctx.domain.empty(), "simulate: the stream has no items");

  require(!(o.tau && o.epsilon), "simulate: give --tau or --epsilon, not both");
  if (o.epsilon) {
    const Calibration c = calibrate(mech, {*o.epsilon, o.delta});
    ctx.tau = c.tau;
    if (c.delta_threshold > 0.0) ctx.delta = c.delta_threshold;
  } else {
    ctx.tau = o.tau.value_or(1.0);
  }
  require(ctx.tau >= 0.0, "simulate: tau must be non-negative");
  require(o.base >= 0 && o.base != 1, "simulate: --base must be 0 (optimal) or at least 2");
  const auto T = static_cast<std::int64_t>(ctx.stream.size());
  ctx.base = o.base == 0 ? optimal_base(std::max<std::int64_t>(T, 2)).r
                         : static_cast<int>(std::min<std::int64_t>(o.base, std::max<std::int64_t>(T, 2)));
  return ctx;
}

void write_releases(std::ostream& os, const ReleaseSequence& rel, std::int64_t first_round) {
  CsvWriter csv(os, {"t", "label", "noisy_count"});
  for (std::size_t i = 0; i < rel.size(); ++i)
    for (const auto& e : rel[i].entries)
      csv.row({std::to_string(first_round + static_cast<std::int64_t>(i)), e.label, format_number(e.value)});
}

int run_simulate(const SimulateOpts& o, std::ostream& out) {
  std::string name = o.mechanism;
  if (name == "meta") {
    parse_quadrant(o.quadrant);
    name = "meta-" + o.quadrant;
  }
  MechanismDescriptor mech;
  mech.kind = parse_mechanism(name);
  mech.delta0 = o.delta0;
  mech.k = o.k;
  mech.k_bar = o.k_bar;
  mech.switches = o.switches;
  SimContext ctx = prepare(o, mech);
  const auto T = static_cast<std::int64_t>(ctx.stream.size());
  const TreeParams tree(T, ctx.base, ctx.tau);
  const LabeledHistogram final_h = LabeledHistogram::of_stream(ctx.stream);

  switch (mech.kind) {
    case MechanismKind::BinMech: {
      // Counts the rounds containing the first domain item.
      std::vector<std::uint8_t> bits;
      for (const auto& ev : ctx.stream)
        bits.push_back(std::find(ev.begin(), ev.end(), ctx.domain.front()) != ev.end() ? 1 : 0);
      const auto y = run(bits, tree, ctx.src);
      ReleaseSequence rel(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) rel[i].entries.push_back({ctx.domain.front(), y[i]});
      emit(o.out, out, [&](std::ostream& os) { write_releases(os, rel, 1); });
      return kExitOk;
    }
    case MechanismKind::KnownBase: {
      const auto rel = known_base(ctx.stream, Domain(ctx.domain), tree, o.delta0, ctx.src);
      emit(o.out, out, [&](std::ostream& os) { write_releases(os, rel, 1); });
      return kExitOk;
    }
    case MechanismKind::KnownGauss:
    case MechanismKind::KnownGumbel:
    case MechanismKind::UnkGauss:
    case MechanismKind::UnkGumbel: {
      for (const auto& ev : ctx.stream)
        check_event(ev, mech.kind == MechanismKind::KnownGauss || mech.kind == MechanismKind::UnkGauss
                            ? o.delta0
                            : static_cast<int>(ev.size()) + 1);
      LabeledHistogram h = final_h;
      NoisyRelease r;
      if (mech.kind == MechanismKind::KnownGauss || mech.kind == MechanismKind::KnownGumbel) {
        for (const auto& label : ctx.domain)
          if (!h.contains(label)) h.set(label, 0);
        r = mech.kind == MechanismKind::KnownGauss ? known_gauss(h, ctx.tau, ctx.src)
                                                   : known_gumbel_topk(h, o.k, ctx.tau, ctx.src);
      } else {
        const auto lim = LimitedHistogram::from_histogram(h, o.k_bar);
        r = mech.kind == MechanismKind::UnkGauss ? unk_gauss(lim, ctx.tau, ctx.delta, ctx.src)
                                                 : unk_gumbel(lim, o.k, ctx.tau, ctx.delta, ctx.src);
      }
      emit(o.out, out, [&](std::ostream& os) { write_releases(os, {r}, T); });
      return kExitOk;
    }
    case MechanismKind::UnkBase: {
      UnkBaseConfig cfg;
      cfg.tree = tree;
      cfg.delta = ctx.delta;
      cfg.delta0 = o.delta0;
      const auto rel = unk_base(ctx.stream, cfg, ctx.src);
      emit(o.out, out, [&](std::ostream& os) { write_releases(os, rel, 1); });
      return kExitOk;
    }
    case MechanismKind::SparseGumb: {
      SparseGumbConfig cfg;
      cfg.s = o.switches;
      cfg.k = o.k;
      cfg.tau = ctx.tau;
      cfg.base = ctx.base;
      cfg.T = T;
      if (o.eta == "auto") {
        cfg.eta = {recommended_eta(cfg, ctx.domain.size(), T, o.beta)};
      } else {
        try {
          std::size_t used = 0;
          cfg.eta = {std::stod(o.eta, &used)};
          if (used != o.eta.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw UsageError("--eta must be 'auto' or a number");
        }
      }
      const auto res = sparse_gumb_run(ctx.stream, Domain(ctx.domain), cfg, ctx.src);
      emit(o.out, out, [&](std::ostream& os) {
        CsvWriter csv(os, {"t", "selected_labels", "counts", "switch_flag"});
        for (std::size_t i = 0; i < res.rounds.size(); ++i) {
          std::vector<std::string> labels, counts;
          for (const auto& e : res.rounds[i].selected) {
            labels.push_back(e.label);
            counts.push_back(format_number(e.value));
          }
          csv.row({std::to_string(i + 1), join(labels, ';'), join(counts, ';'),
                   res.rounds[i].switched ? "1" : "0"});
        }
      });
      return kExitOk;
    }
    case MechanismKind::MetaKnownRestricted:
    case MechanismKind::MetaKnownUnrestricted:
    case MechanismKind::MetaUnknownRestricted:
    case MechanismKind::MetaUnknownUnrestricted: {
      MetaConfig cfg;
      cfg.quadrant = parse_quadrant(name.substr(5));
      cfg.tree = tree;
      cfg.delta = ctx.delta;
      cfg.delta0 = o.delta0;
      cfg.k = o.k;
      cfg.k_bar = o.k_bar;
      if (cfg.quadrant == Quadrant::KnownRestricted || cfg.quadrant == Quadrant::KnownUnrestricted)
        cfg.domain = ctx.domain;
      const auto rel = meta_run(ctx.stream, cfg, ctx.src);
      emit(o.out, out, [&](std::ostream& os) { write_releases(os, rel, 1); });
      return kExitOk;
    }
  }
  throw UsageError("simulate: unsupported mechanism " + name);
}

// ---- verify ----

struct VerifyOpts {
  std::string check;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};

json report_json(const CheckReport& r) {
  json metrics = json::object();
  for (const auto& m : r.metrics) metrics[m.name] = m.value;
  return {{"check", r.check}, {"passed", r.passed}, {"metrics", metrics}, {"failures", r.failures}};
}

int run_verify(const VerifyOpts& o, std::ostream& out) {
  const auto reports = run_check(o.check, o.trials, o.seed);
  bool passed = true;
  json list = json::array();
  for (const auto& r : reports) {
    passed = passed && r.passed;
    list.push_back(report_json(r));
  }
  const json j{{"check", o.check}, {"trials", o.trials}, {"seed", o.seed}, {"passed", passed}, {"reports", list}};
  out << j.dump(2) << '\n';
  return passed ? kExitOk : kExitCheckFailed;
}

// ---- experiment ----

struct ExperimentOpts {
  std::string name;
  std::optional<int> trials;
  std::uint64_t seed = 7;
  std::string out;
  std::int64_t t_max = 1000000;
  std::size_t d = 100;
  std::int64_t T = 1000;
};

int run_experiment(const ExperimentOpts& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const std::string path = o.out.empty() ? default_out_path(o.name + ".csv") : o.out;
  json summary;
  bool passed = true;
  summary["experiment"] = o.name;
  summary["seed"] = o.seed;
  summary["out"] = path;
  if (o.name == "fig1") {
    std::vector<BaseNoiseRow> rows;
    for (std::int64_t T : log_grid(2, o.t_max, 8)) {
      auto r = base_noise_rows(T, 16);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    double min_ratio = 1.0;
    for (const auto& r : rows) min_ratio = std::min(min_ratio, r.std_ratio_vs_base2);
    emit(path, out, [&](std::ostream& os) { write_base_noise_csv(os, rows, true); });
    summary["rows"] = rows.size();
    summary["min_std_ratio"] = min_ratio;
  } else if (o.name == "fig4") {
    Fig4Config cfg;
    cfg.trials = o.trials.value_or(cfg.trials);
    cfg.seed = o.seed;
    cfg.d = o.d;
    cfg.T = o.T;
    const Fig4Result res = run_fig4(cfg);
    emit(path, out, [&](std::ostream& os) { write_fig4_csv(os, res); });
    summary["trials"] = cfg.trials;
    json series = json::array();
    for (const auto& e : res.series)
      series.push_back({{"name", e.name}, {"s", e.s}, {"eta", e.eta}, {"mean_switches", e.mean_switches},
                        {"final_mean_error", e.mean_error.back()}});
    summary["series"] = series;
  } else if (o.name == "scaling") {
    ScalingConfig cfg;
    cfg.trials = o.trials.value_or(cfg.trials);
    cfg.seed = o.seed;
    const ScalingResult res = run_scaling(cfg);
    emit(path, out, [&](std::ostream& os) { write_scaling_csv(os, res); });
    summary["trials"] = cfg.trials;
    summary["constant"] = res.constant;
    for (const auto& c : res.cells) passed = passed && c.stream_valid && c.failure_fraction <= c.s * cfg.beta;
    summary["passed"] = passed;
  } else {
    throw UsageError("unknown experiment '" + o.name + "' (expected fig1, fig4 or scaling)");
  }
  out << summary.dump(2) << '\n';
  err << "wall_seconds " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
      << '\n';
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private running histograms under continual observation", "contmech"};
  app.require_subcommand(1);
  app.add_option("--config", "JSON file whose keys stand in for flags of the subcommand");

  CalibrateOpts cal;
  auto* c_cal = app.add_subcommand("calibrate", "Noise scale and budget breakdown for a target (epsilon, delta)");
  c_cal->add_option("--epsilon", cal.epsilon)->required();
  c_cal->add_option("--delta", cal.delta)->required();
  c_cal->add_option("--mechanism", cal.mechanism)->required();
  c_cal->add_option("--k", cal.k);
  c_cal->add_option("--k-bar,--kbar", cal.k_bar);
  c_cal->add_option("--delta0", cal.delta0);
  c_cal->add_option("--switches", cal.switches);

  OptimizeOpts opt;
  auto* c_opt = app.add_subcommand("optimize-base", "Tree-noise objective per base r");
  c_opt->add_option("--t-max", opt.t_max)->required();
  c_opt->add_flag("--sweep", opt.sweep, "Log grid of horizons up to --t-max (adds a t column)");
  c_opt->add_option("--r-max", opt.r_max);
  c_opt->add_option("--out", opt.out);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "Run one mechanism on a generated or loaded stream");
  c_sim->add_option("--mechanism", sim.mechanism)->required();
  c_sim->add_option("--quadrant", sim.quadrant);
  c_sim->add_option("--stream", sim.stream);
  c_sim->add_option("--d", sim.d);
  c_sim->add_option("--T,--t", sim.T);
  c_sim->add_option("--zipf-exponent", sim.zipf_exponent);
  c_sim->add_option("--switch-times", sim.switch_times);
  c_sim->add_option("--events-per-round", sim.events_per_round);
  c_sim->add_option("--stream-file", sim.stream_file);
  c_sim->add_option("--tau", sim.tau);
  c_sim->add_option("--epsilon", sim.epsilon);
  c_sim->add_option("--delta", sim.delta);
  c_sim->add_option("--delta0", sim.delta0);
  c_sim->add_option("--k", sim.k);
  c_sim->add_option("--k-bar,--kbar", sim.k_bar);
  c_sim->add_option("--switches", sim.switches);
  c_sim->add_option("--eta", sim.eta);
  c_sim->add_option("--beta", sim.beta);
  c_sim->add_option("--base", sim.base, "Tree base; 0 picks the optimal base for T");
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--out", sim.out);

  VerifyOpts ver;
  auto* c_ver = app.add_subcommand("verify", "Empirical privacy checks");
  c_ver->add_option("--check", ver.check)->required();
  c_ver->add_option("--trials", ver.trials);
  c_ver->add_option("--seed", ver.seed);

  ExperimentOpts exp;
  auto* c_exp = app.add_subcommand("experiment", "Reproduce an experiment as CSV");
  c_exp->add_option("name", exp.name, "fig1, fig4 or scaling")->required();
  c_exp->add_option("--trials", exp.trials);
  c_exp->add_option("--seed", exp.seed);
  c_exp->add_option("--out", exp.out);
  c_exp->add_option("--t-max", exp.t_max);
  c_exp->add_option("--d", exp.d);
  c_exp->add_option("--T,--t", exp.T);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (c_cal->parsed()) return run_calibrate(cal, out);
    if (c_opt->parsed()) return run_optimize(opt, out);
    if (c_sim->parsed()) return run_simulate(sim, out);
    if (c_ver->parsed()) return run_verify(ver, out);
    if (c_exp->parsed()) return run_experiment(exp, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace contmech::cli
