#include "contmech/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "contmech/error.hpp"
#include "contmech/stats.hpp"
#include "contmech/unknown_continual.hpp"
#include "contmech/unknown_oneshot.hpp"

namespace contmech {

bool is_histogram_neighbor(const LabeledHistogram& h0, const LabeledHistogram& h1, int delta0) {
  std::set<Label> labels;
  for (const auto& [l, c] : h0) labels.insert(l);
  for (const auto& [l, c] : h1) labels.insert(l);
  bool up = false, down = false;
  int changed = 0;
  for (const auto& l : labels) {
    const Count d = h0.get(l) - h1.get(l);
    if (d == 0) continue;
    if (d > 1 || d < -1) return false;
    (d > 0 ? up : down) = true;
    ++changed;
  }
  return !(up && down) && changed <= delta0;
}

bool is_stream_neighbor(const EventStream& s0, const EventStream& s1) {
  if (s0.size() != s1.size()) return false;
  int differing = 0;
  for (std::size_t t = 0; t < s0.size(); ++t) {
    std::set<Label> a(s0[t].begin(), s0[t].end()), b(s1[t].begin(), s1[t].end());
    if (a == b) continue;
    if (!a.empty() && !b.empty()) return false;
    ++differing;
  }
  return differing <= 1;
}

std::vector<Count> brute_force_prefix(std::span<const std::uint8_t> bits) {
  std::vector<Count> out(bits.size(), 0);
  for (std::size_t t = 0; t < bits.size(); ++t)
    for (std::size_t s = 0; s <= t; ++s) out[t] += bits[s];
  return out;
}

CellDiff brute_force_cell_diff(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                               int r, std::int64_t T) {
  require(r >= 2, "brute_force_cell_diff: r must be at least 2");
  auto bit = [](std::span<const std::uint8_t> s, std::int64_t pos) -> Count {
    return pos <= static_cast<std::int64_t>(s.size()) ? s[static_cast<std::size_t>(pos - 1)] : 0;
  };
  CellDiff out;
  for (std::int64_t width = 1; width <= T; width *= r) {
    for (std::int64_t first = 1; first + width - 1 <= T; first += width) {
      Count sa = 0, sb = 0;
      for (std::int64_t p = first; p < first + width; ++p) {
        sa += bit(a, p);
        sb += bit(b, p);
      }
      if (sa != sb) {
        ++out.cells_changed;
        out.max_diff = std::max(out.max_diff, sa > sb ? sa - sb : sb - sa);
      }
    }
    if (width > T / r) break;
  }
  return out;
}

CellDiff table_diff(const PartialSumTable& a, const PartialSumTable& b) {
  require(a.T() == b.T() && a.r() == b.r(), "table_diff: tables of different shape");
  CellDiff out;
  for (int level = 1; level <= a.levels(); ++level) {
    for (std::int64_t j = 1; j <= a.cells_at(level); ++j) {
      const Cell c{level, j};
      const Count d = a.at(c) - b.at(c);
      if (d != 0) {
        ++out.cells_changed;
        out.max_diff = std::max(out.max_diff, d > 0 ? d : -d);
      }
    }
  }
  return out;
}

namespace {

std::string dummy_name(int i) { return "#top" + std::to_string(i); }
bool is_dummy_name(const std::string& s) { return s.rfind("#top", 0) == 0; }

std::vector<std::pair<Label, Count>> positive_ranked(const LabeledHistogram& h) {
  std::vector<std::pair<Label, Count>> out;
  for (auto& e : h.ranked())
    if (e.second > 0) out.push_back(std::move(e));
  return out;
}

Count count_of(const LabeledHistogram& h, const std::string& name) {
  return is_dummy_name(name) ? 0 : h.get(name);
}

bool has_name(const std::vector<OracleBin>& bins, const std::string& name) {
  return std::any_of(bins.begin(), bins.end(), [&](const OracleBin& x) { return x.name == name; });
}

}  // namespace

std::vector<OracleBin> padded_domain(const LabeledHistogram& h, int k_bar) {
  require(k_bar >= 1, "padded_domain: k_bar must be at least 1");
  const auto pos = positive_ranked(h);
  std::vector<OracleBin> out;
  const std::size_t take = std::min(pos.size(), static_cast<std::size_t>(k_bar));
  for (std::size_t i = 0; i < take; ++i)
    out.push_back({pos[i].first, BinKind::Real, pos[i].first, static_cast<double>(pos[i].second)});
  for (int i = 1; out.size() < static_cast<std::size_t>(k_bar); ++i)
    out.push_back({dummy_name(i), BinKind::Dummy, dummy_name(i), 0.0});
  return out;
}

std::vector<OracleBin> relabel_bot(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                   int k_bar, double tau, double delta) {
  require(b == 0 || b == 1, "relabel_bot: b must be 0 or 1");
  const auto d0 = padded_domain(h0, k_bar);
  const auto d1 = padded_domain(h1, k_bar);
  const auto& mine = b == 0 ? d0 : d1;
  const auto& other = b == 0 ? d1 : d0;
  const LabeledHistogram& hb = b == 0 ? h0 : h1;
  std::vector<OracleBin> out, bad;
  for (const auto& bin : mine) {
    const double c = static_cast<double>(count_of(hb, bin.name));
    if (has_name(other, bin.name)) {
      out.push_back({bin.name, bin.kind, bin.name, c});
    } else {
      bad.push_back({"#bad" + std::to_string(bad.size() + 1), BinKind::Bad, bin.name, c});
    }
  }
  out.insert(out.end(), bad.begin(), bad.end());
  const auto pos = positive_ranked(hb);
  const Count cutoff = pos.size() > static_cast<std::size_t>(k_bar) ? pos[k_bar].second : 0;
  const double bottom =
      static_cast<double>(cutoff) + 1.0 + std::numbers::sqrt2 * tau * normal_upper_quantile(delta);
  out.push_back({"#bot", BinKind::Bottom, "#bot", bottom});
  return out;
}

std::vector<OracleBin> gauss_mech_bot(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                      int k_bar, double tau, double delta, const NoiseSource& src) {
  auto bins = relabel_bot(b, h0, h1, k_bar, tau, delta);
  for (auto& bin : bins) bin.count += src.gaussian({tag::kOracle, label_key(bin.name)}, tau);
  return bins;
}

OracleRelease gauss_mech_bot_release(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                     int k_bar, double tau, double delta, const NoiseSource& src) {
  const auto bins = gauss_mech_bot(b, h0, h1, k_bar, tau, delta, src);
  double bottom = 0.0;
  for (const auto& bin : bins)
    if (bin.kind == BinKind::Bottom) bottom = bin.count;
  OracleRelease out;
  out.release.threshold = bottom;
  for (const auto& bin : bins) {
    if (bin.kind == BinKind::Bottom || !(bin.count > bottom)) continue;
    if (is_dummy_name(bin.source)) continue;
    if (bin.kind == BinKind::Bad) out.good = false;
    out.release.entries.push_back({bin.source, bin.count});
  }
  sort_descending(out.release.entries);
  return out;
}

std::vector<OracleBin> padded_full_domain(const LabeledHistogram& h, int d_bar) {
  std::vector<OracleBin> out;
  for (const auto& [l, c] : h)
    if (c > 0) out.push_back({l, BinKind::Real, l, static_cast<double>(c)});
  require(out.size() <= static_cast<std::size_t>(d_bar), "padded_full_domain: more labels than d_bar");
  for (int i = 1; out.size() < static_cast<std::size_t>(d_bar); ++i)
    out.push_back({dummy_name(i), BinKind::Dummy, dummy_name(i), 0.0});
  return out;
}

std::vector<OracleBin> relabel_full(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                    int d_bar) {
  require(b == 0 || b == 1, "relabel_full: b must be 0 or 1");
  const auto d0 = padded_full_domain(h0, d_bar);
  const auto d1 = padded_full_domain(h1, d_bar);
  const auto& mine = b == 0 ? d0 : d1;
  const auto& other = b == 0 ? d1 : d0;
  const LabeledHistogram& hb = b == 0 ? h0 : h1;
  // Real labels the other side holds and this side lacks, label order.
  std::vector<std::string> pool;
  for (const auto& bin : other)
    if (bin.kind == BinKind::Real && !has_name(mine, bin.name)) pool.push_back(bin.name);
  std::size_t next = 0;
  std::vector<OracleBin> out;
  for (const auto& bin : mine) {
    if (has_name(other, bin.name) || bin.kind == BinKind::Real) {
      out.push_back({bin.name, bin.kind, bin.name, static_cast<double>(count_of(hb, bin.name))});
      continue;
    }
    require(next < pool.size(), "relabel_full: no real label left to pair with a dummy");
    out.push_back({pool[next++], BinKind::Bad, bin.name, 0.0});
  }
  return out;
}

std::vector<OracleBin> gauss_mech_full(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                       int d_bar, double tau, const NoiseSource& src) {
  auto bins = relabel_full(b, h0, h1, d_bar);
  for (auto& bin : bins) bin.count += src.gaussian({tag::kOracle, label_key(bin.name)}, tau);
  return bins;
}

namespace {

LabeledHistogram substream_histogram(const EventStream& s, const Cell& c, int r) {
  const auto [first, last] = cell_interval(c, r);
  LabeledHistogram h;
  for (std::int64_t t = first; t <= last; ++t)
    for (const auto& l : s[static_cast<std::size_t>(t - 1)]) h.add(l);
  return h;
}

struct OracleCell {
  std::map<std::string, double> values;  // current label -> noisy count
  std::set<std::string> reals;
  std::vector<std::string> dummies;      // ascending index; the back is relabelled first
};

int dummy_index(const std::string& s) { return std::stoi(s.substr(4)); }

}  // namespace

ReleaseSequence unk_base_oracle(int b, const EventStream& s0, const EventStream& s1,
                                const TreeParams& tree, double delta, int d_bar,
                                const NoiseSource& src) {
  require(is_stream_neighbor(s0, s1), "unk_base_oracle: streams are not neighbours");
  require(static_cast<std::int64_t>(s0.size()) <= tree.T, "unk_base_oracle: stream longer than T");
  const double m = unk_base_threshold(tree, delta);
  const double sigma = tree.cell_sigma();
  std::map<Cell, OracleCell> cells;
  auto get_cell = [&](const Cell& c) -> OracleCell& {
    auto it = cells.find(c);
    if (it != cells.end()) return it->second;
    const auto bins = gauss_mech_full(b, substream_histogram(s0, c, tree.r), substream_histogram(s1, c, tree.r),
                                      d_bar, sigma,
                                      src.fork(static_cast<std::uint64_t>(c.level), static_cast<std::uint64_t>(c.index)));
    OracleCell cell;
    for (const auto& bin : bins) {
      cell.values[bin.name] = bin.count;
      if (is_dummy_name(bin.name)) {
        cell.dummies.push_back(bin.name);
      } else {
        cell.reals.insert(bin.name);
      }
    }
    std::sort(cell.dummies.begin(), cell.dummies.end(),
              [](const std::string& x, const std::string& y) { return dummy_index(x) < dummy_index(y); });
    return cells.emplace(c, std::move(cell)).first->second;
  };

  ReleaseSequence out;
  for (std::int64_t t = 1; t <= static_cast<std::int64_t>(s0.size()); ++t) {
    const auto used = decompose(t, tree.r).cells;
    std::set<std::string> u_t;
    for (const Cell& c : used) {
      const auto& cell = get_cell(c);
      u_t.insert(cell.reals.begin(), cell.reals.end());
    }
    for (const Cell& c : used) {
      auto& cell = get_cell(c);
      for (const auto& u : u_t) {
        if (cell.reals.contains(u)) continue;
        require(!cell.dummies.empty(), "unk_base_oracle: d_bar too small for the stream");
        const std::string top = cell.dummies.back();
        cell.dummies.pop_back();
        cell.values[u] = cell.values.at(top);
        cell.values.erase(top);
        cell.reals.insert(u);
      }
    }
    NoisyRelease rel;
    rel.threshold = m;
    for (const auto& u : u_t) {
      double v = 0.0;
      for (const Cell& c : used) v += get_cell(c).values.at(u);
      if (v > m) rel.entries.push_back({u, v});
    }
    out.push_back(std::move(rel));
  }
  return out;
}

bool good_outcome(const ReleaseSequence& rel, const EventStream& s0, const EventStream& s1) {
  std::set<Label> seen0, seen1;
  for (std::size_t t = 0; t < rel.size(); ++t) {
    seen0.insert(s0[t].begin(), s0[t].end());
    seen1.insert(s1[t].begin(), s1[t].end());
    for (const auto& e : rel[t].entries)
      if (!seen0.contains(e.label) || !seen1.contains(e.label)) return false;
  }
  return true;
}

NoisyRelease unk_gauss_top(const LabeledHistogram& h, int k_bar, double tau, double delta,
                           const NoiseSource& src) {
  const auto bins = padded_domain(h, k_bar);
  const auto pos = positive_ranked(h);
  const Count cutoff = pos.size() > static_cast<std::size_t>(k_bar) ? pos[k_bar].second : 0;
  const double bottom = static_cast<double>(cutoff) + 1.0 +
                        std::numbers::sqrt2 * tau * normal_upper_quantile(delta) +
                        src.gaussian({tag::kOracle, label_key("#bot")}, tau);
  NoisyRelease out;
  out.threshold = bottom;
  for (const auto& bin : bins) {
    const double v = bin.count + src.gaussian({tag::kOracle, label_key(bin.name)}, tau);
    if (v > bottom && bin.kind == BinKind::Real) out.entries.push_back({bin.name, v});
  }
  sort_descending(out.entries);
  return out;
}

// ---- Check runners ----

namespace {

std::vector<std::uint8_t> bits_of(std::uint64_t mask, int T) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) s[static_cast<std::size_t>(i)] = (mask >> i) & 1U;
  return s;
}

struct SensitivityTally {
  std::uint64_t pairs = 0;
  std::uint64_t violations = 0;
  std::uint64_t oracle_mismatches = 0;
  int worst_cells = 0;
  Count worst_diff = 0;
};

void check_pair(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, const TreeParams& p,
                SensitivityTally& tally) {
  const CellDiff d = table_diff(build_table(a, p), build_table(b, p));
  ++tally.pairs;
  tally.worst_cells = std::max(tally.worst_cells, d.cells_changed);
  tally.worst_diff = std::max(tally.worst_diff, d.max_diff);
  if (d.cells_changed > p.levels() || d.max_diff > 1) ++tally.violations;
  const CellDiff o = brute_force_cell_diff(a, b, p.r, p.T);
  if (o.cells_changed != d.cells_changed || o.max_diff != d.max_diff) ++tally.oracle_mismatches;
}

bool contains_label(const NoisyRelease& r, const Label& l) { return r.find(l) != nullptr; }

}  // namespace

CheckReport check_sensitivity(int t_max, std::vector<int> rs, int exhaustive_t) {
  require(t_max >= 1 && t_max <= 64, "check_sensitivity: t_max must lie in [1, 64]");
  require(exhaustive_t <= 20, "check_sensitivity: exhaustive_t must be at most 20");
  CheckReport rep;
  rep.check = "sensitivity";
  SensitivityTally tally;
  const NoiseSource src(0x5e45171f);
  for (int r : rs) {
    for (int T = r; T <= t_max; ++T) {
      const TreeParams p(T, r, 0.0);
      if (T <= exhaustive_t) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << T); ++mask) {
          const auto a = bits_of(mask, T);
          for (int pos = 0; pos < T; ++pos) {
            if (!a[static_cast<std::size_t>(pos)]) continue;
            auto b = a;
            b[static_cast<std::size_t>(pos)] = 0;
            check_pair(a, b, p, tally);
          }
        }
        continue;
      }
      // The table difference depends only on the changed position, so a few
      // base streams per (T, r) cover every neighbour shape.
      for (int base = 0; base < 4; ++base) {
        std::vector<std::uint8_t> a(static_cast<std::size_t>(T), 1);
        if (base > 0)
          for (int i = 0; i < T; ++i)
            a[static_cast<std::size_t>(i)] =
                src.bits({tag::kStream, static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(r),
                          static_cast<std::uint64_t>(base * 64 + i)}) & 1U;
        for (int pos = 0; pos < T; ++pos) {
          if (!a[static_cast<std::size_t>(pos)]) continue;
          auto b = a;
          b[static_cast<std::size_t>(pos)] = 0;
          check_pair(a, b, p, tally);
        }
      }
    }
  }
  rep.metric("pairs", static_cast<double>(tally.pairs));
  rep.metric("violations", static_cast<double>(tally.violations));
  rep.metric("oracle_mismatches", static_cast<double>(tally.oracle_mismatches));
  rep.metric("max_cells_changed", tally.worst_cells);
  rep.metric("max_cell_diff", static_cast<double>(tally.worst_diff));
  if (tally.violations > 0) rep.fail("a neighbouring pair changed more than L_r cells or a cell by more than 1");
  if (tally.oracle_mismatches > 0) rep.fail("build_table disagrees with the brute-force cell sums");
  return rep;
}

CheckReport check_bad_outcomes_unkgauss(std::uint64_t trials, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const int k_bar = 3, delta0 = 2;
  const double tau = 1.0, delta = 0.02;
  const LabeledHistogram h0{{"a", 5}, {"x", 1}, {"y", 1}};
  const LabeledHistogram h1{{"a", 5}};
  require(is_histogram_neighbor(h0, h1, delta0), "bad-outcomes-unkgauss: instance is not a neighbour pair");
  CheckReport rep;
  rep.check = "bad-outcomes-unkgauss";
  const double bound = delta0 * delta;
  const NoiseSource root(seed);
  for (int b = 0; b <= 1; ++b) {
    const auto& hb = b == 0 ? h0 : h1;
    const auto& ho = b == 0 ? h1 : h0;
    std::set<Label> other_domain;
    for (const auto& bin : padded_domain(ho, k_bar))
      if (bin.kind == BinKind::Real) other_domain.insert(bin.name);
    const LimitedHistogram lim = LimitedHistogram::from_histogram(hb, k_bar);
    std::uint64_t bad = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const NoisyRelease rel = unk_gauss(lim, tau, delta, root.fork(static_cast<std::uint64_t>(b), i));
      for (const auto& e : rel.entries) {
        if (!other_domain.contains(e.label)) {
          ++bad;
          break;
        }
      }
    }
    const double cp = clopper_pearson_upper(bad, trials, 0.99);
    const std::string side = "b" + std::to_string(b);
    rep.metric(side + "_bad_frequency", static_cast<double>(bad) / static_cast<double>(trials));
    rep.metric(side + "_cp99_upper", cp);
    if (cp > bound) rep.fail(side + ": Clopper-Pearson upper bound exceeds delta0 * delta");
  }
  rep.metric("bound", bound);
  rep.metric("trials", static_cast<double>(trials));
  return rep;
}

namespace {

// Fresh items x, y at round 1 on one side only; a and b recur on both.
std::pair<EventStream, EventStream> unkbase_bad_instance(std::int64_t T) {
  EventStream s0, s1;
  for (std::int64_t t = 1; t <= T; ++t) {
    Event e;
    if (t == 1) {
      s0.push_back({"x", "y"});
      s1.push_back({});
      continue;
    }
    e.push_back("a");
    if (t % 4 == 0) e.push_back("b");
    s0.push_back(e);
    s1.push_back(e);
  }
  return {s0, s1};
}

}  // namespace

CheckReport check_bad_outcomes_unkbase(std::uint64_t trials, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const std::int64_t T = 32;
  const int r = 2, delta0 = 2;
  const double tau = 1.0, delta = 0.05;
  const auto [s0, s1] = unkbase_bad_instance(T);
  CheckReport rep;
  rep.check = "bad-outcomes-unkbase";
  const double bound = delta0 * delta;
  const NoiseSource root(seed);
  UnkBaseConfig cfg;
  cfg.tree = TreeParams(T, r, tau);
  cfg.delta = delta;
  cfg.delta0 = delta0;
  for (int b = 0; b <= 1; ++b) {
    const auto& sb = b == 0 ? s0 : s1;
    std::uint64_t bad = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto rel = unk_base(sb, cfg, root.fork(static_cast<std::uint64_t>(b), i));
      if (!good_outcome(rel, s0, s1)) ++bad;
    }
    const double cp = clopper_pearson_upper(bad, trials, 0.99);
    const std::string side = "b" + std::to_string(b);
    rep.metric(side + "_bad_frequency", static_cast<double>(bad) / static_cast<double>(trials));
    rep.metric(side + "_cp99_upper", cp);
    if (cp > bound) rep.fail(side + ": Clopper-Pearson upper bound exceeds delta0 * delta");
  }
  rep.metric("bound", bound);
  rep.metric("m_delta", unk_base_threshold(cfg.tree, delta));
  rep.metric("trials", static_cast<double>(trials));
  return rep;
}

namespace {

struct FrequencyTable {
  std::map<std::string, std::uint64_t> counts;
  void hit(const std::string& key) { ++counts[key]; }
  std::uint64_t get(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
};

void compare_tables(const std::string& side, const FrequencyTable& mech, const FrequencyTable& oracle,
                    const std::vector<std::string>& keys, std::uint64_t trials, CheckReport& rep) {
  double worst = 0.0;
  for (const auto& key : keys) {
    const double z = binomial_z(mech.get(key), trials, oracle.get(key), trials);
    worst = std::max(worst, std::fabs(z));
    rep.metric(side + "_" + key + "_mech", static_cast<double>(mech.get(key)) / static_cast<double>(trials));
    rep.metric(side + "_" + key + "_oracle", static_cast<double>(oracle.get(key)) / static_cast<double>(trials));
    if (std::fabs(z) > 3.0) rep.fail(side + ": frequency of '" + key + "' differs by more than 3 sigma");
  }
  rep.metric(side + "_max_abs_z", worst);
}

}  // namespace

CheckReport check_good_equivalence_unkgauss(std::uint64_t trials, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const int k_bar = 3, delta0 = 2;
  const double tau = 1.0, delta = 0.1;
  const LabeledHistogram h0{{"a", 4}, {"b", 3}, {"x", 1}};
  const LabeledHistogram h1{{"a", 4}, {"b", 2}};
  require(is_histogram_neighbor(h0, h1, delta0), "good-equivalence: instance is not a neighbour pair");
  std::set<Label> d0, d1;
  for (const auto& bin : padded_domain(h0, k_bar))
    if (bin.kind == BinKind::Real) d0.insert(bin.name);
  for (const auto& bin : padded_domain(h1, k_bar))
    if (bin.kind == BinKind::Real) d1.insert(bin.name);
  std::vector<std::string> keys{"good"};
  for (const auto& l : d0)
    if (d1.contains(l)) keys.push_back(l);

  CheckReport rep;
  rep.check = "good-equivalence-unkgauss";
  const NoiseSource root(seed);
  for (int b = 0; b <= 1; ++b) {
    const auto& hb = b == 0 ? h0 : h1;
    const LimitedHistogram lim = LimitedHistogram::from_histogram(hb, k_bar);
    FrequencyTable mech, oracle;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const NoisyRelease rel = unk_gauss(lim, tau, delta, root.fork(10 + static_cast<std::uint64_t>(b), i));
      const bool good = std::all_of(rel.entries.begin(), rel.entries.end(), [&](const NoisyEntry& e) {
        return d0.contains(e.label) && d1.contains(e.label);
      });
      if (good) {
        mech.hit("good");
        for (const auto& e : rel.entries) mech.hit(e.label);
      }
      const OracleRelease orc =
          gauss_mech_bot_release(b, h0, h1, k_bar, tau, delta, root.fork(20 + static_cast<std::uint64_t>(b), i));
      if (orc.good) {
        oracle.hit("good");
        for (const auto& e : orc.release.entries) oracle.hit(e.label);
      }
    }
    compare_tables("b" + std::to_string(b), mech, oracle, keys, trials, rep);
  }
  rep.metric("trials", static_cast<double>(trials));
  return rep;
}

namespace {

// Neighbours differing at round 4, where s1 is empty. x is fresh at round 4
// in s0 and first appears in s1 at round 6.
std::pair<EventStream, EventStream> unkbase_good_instance() {
  EventStream s0{{"a"}, {"a", "b"}, {"a"}, {"x", "b"}, {"a", "b"}, {"a", "x"}, {"a", "b"}, {"a", "x"}};
  EventStream s1 = s0;
  s1[3].clear();
  return {s0, s1};
}

}  // namespace

CheckReport check_good_equivalence_unkbase(std::uint64_t trials, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const std::int64_t T = 8;
  const int r = 2, d_bar = 4, delta0 = 2;
  const double tau = 0.25, delta = 0.05;
  const auto [s0, s1] = unkbase_good_instance();
  UnkBaseConfig cfg;
  cfg.tree = TreeParams(T, r, tau);
  cfg.delta = delta;
  cfg.delta0 = delta0;
  const std::vector<std::string> labels{"a", "b", "x"};
  std::vector<std::string> keys{"good"};
  for (const auto& l : labels) {
    keys.push_back(l + "@any");
    keys.push_back(l + "@T");
  }
  CheckReport rep;
  rep.check = "good-equivalence-unkbase";
  const NoiseSource root(seed);
  auto tally = [&](const ReleaseSequence& rel, FrequencyTable& tab) {
    if (!good_outcome(rel, s0, s1)) return;
    tab.hit("good");
    for (const auto& l : labels) {
      bool any = false;
      for (const auto& round : rel) any = any || contains_label(round, l);
      if (any) tab.hit(l + "@any");
      if (contains_label(rel.back(), l)) tab.hit(l + "@T");
    }
  };
  for (int b = 0; b <= 1; ++b) {
    const auto& sb = b == 0 ? s0 : s1;
    FrequencyTable mech, oracle;
    for (std::uint64_t i = 0; i < trials; ++i) {
      tally(unk_base(sb, cfg, root.fork(30 + static_cast<std::uint64_t>(b), i)), mech);
      tally(unk_base_oracle(b, s0, s1, cfg.tree, delta, d_bar, root.fork(40 + static_cast<std::uint64_t>(b), i)),
            oracle);
    }
    compare_tables("b" + std::to_string(b), mech, oracle, keys, trials, rep);
  }
  rep.metric("m_delta", unk_base_threshold(cfg.tree, delta));
  rep.metric("trials", static_cast<double>(trials));
  return rep;
}

CheckReport check_dummy_equivalence(std::uint64_t trials, std::uint64_t seed) {
  require(trials > 1, "trials must be at least 2");
  const int k_bar = 5;
  const double tau = 1.0, delta = 0.1;
  const LabeledHistogram h{{"a", 6}, {"b", 5}, {"c", 3}};
  const LimitedHistogram lim = LimitedHistogram::from_histogram(h, k_bar);
  CheckReport rep;
  rep.check = "dummy-equivalence";
  const NoiseSource root(seed);
  std::map<Label, std::vector<double>> plain, padded;
  for (std::uint64_t i = 0; i < trials; ++i) {
    for (const auto& e : unk_gauss(lim, tau, delta, root.fork(50, i)).entries) plain[e.label].push_back(e.value);
    for (const auto& e : unk_gauss_top(h, k_bar, tau, delta, root.fork(51, i)).entries)
      padded[e.label].push_back(e.value);
  }
  for (const auto& [l, c] : h) {
    const auto& x = plain[l];
    const auto& y = padded[l];
    const double z = binomial_z(x.size(), trials, y.size(), trials);
    rep.metric(l + "_release_z", z);
    if (std::fabs(z) > 3.0) rep.fail("release frequency of '" + l + "' differs by more than 3 sigma");
    if (x.empty() || y.empty()) continue;
    const KsResult ks = ks_two_sample(x, y);
    rep.metric(l + "_ks_statistic", ks.statistic);
    rep.metric(l + "_ks_p", ks.p_value);
    if (ks.p_value < 0.01) rep.fail("released counts of '" + l + "' rejected by KS at 0.01");
  }
  rep.metric("trials", static_cast<double>(trials));
  return rep;
}

std::vector<CheckReport> run_check(const std::string& name, std::uint64_t trials, std::uint64_t seed) {
  if (name == "sensitivity") return {check_sensitivity()};
  if (name == "bad-outcomes-unkgauss") return {check_bad_outcomes_unkgauss(trials, seed)};
  if (name == "bad-outcomes-unkbase") return {check_bad_outcomes_unkbase(trials, seed)};
  if (name == "good-equivalence")
    return {check_good_equivalence_unkgauss(trials, seed), check_good_equivalence_unkbase(trials, seed)};
  if (name == "dummy-equivalence") return {check_dummy_equivalence(trials, seed)};
  throw UsageError("unknown check '" + name + "'");
}

}  // namespace contmech
