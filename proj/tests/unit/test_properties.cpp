// Randomized invariants that cut across modules.
#include <doctest.h>

#include <random>
#include <set>

#include "contmech/known_domain.hpp"
#include "contmech/meta_algo.hpp"
#include "contmech/sparse_gumb.hpp"
#include "contmech/unknown_continual.hpp"
#include "contmech/unknown_oneshot.hpp"
#include "contmech/verify.hpp"
#include "oracles.hpp"

using namespace contmech;

namespace {
struct Instance {
  std::vector<Label> labels;
  EventStream stream;
  std::int64_t T = 0;
  int r = 2;
};

Instance draw(std::mt19937_64& rng, int max_d = 6, std::int64_t max_T = 80) {
  Instance in;
  in.labels = oracle::labels(1 + static_cast<int>(rng() % max_d));
  in.T = 2 + static_cast<std::int64_t>(rng() % (max_T - 1));
  in.r = 2 + static_cast<int>(rng() % std::min<std::int64_t>(4, in.T - 1));
  std::uniform_real_distribution<double> p(0.05, 0.8);
  in.stream = oracle::random_stream(rng, in.labels, in.T, p(rng));
  return in;
}

std::set<Label> present(const EventStream& s) {
  std::set<Label> out;
  for (const auto& ev : s) out.insert(ev.begin(), ev.end());
  return out;
}
}  // namespace

TEST_CASE("noiseless known base is the exact running histogram") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance in = draw(rng);
    const int delta0 = static_cast<int>(in.labels.size());
    const ReleaseSequence rel = known_base(in.stream, Domain(in.labels), TreeParams(in.T, in.r, 0), delta0, NoiseSource(rep));
    const auto truth = oracle::running(in.stream);
    for (std::int64_t t = 0; t < in.T; ++t)
      for (const auto& e : rel[t].entries) {
        const auto it = truth[t].find(e.label);
        REQUIRE(e.value == static_cast<double>(it == truth[t].end() ? 0 : it->second));
      }
  }
}

TEST_CASE("fixed seeds give bit-identical runs") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const Instance in = draw(rng);
    const NoiseSource src(rep);
    const int d = static_cast<int>(in.labels.size());
    UnkBaseConfig ub;
    ub.tree = TreeParams(in.T, in.r, 1.0);
    ub.delta0 = d;
    CHECK(unk_base(in.stream, ub, src) == unk_base(in.stream, ub, src));

    MetaConfig mc;
    mc.quadrant = Quadrant::UnknownUnrestricted;
    mc.tree = TreeParams(in.T, in.r, 1.0);
    mc.k_bar = 2;
    CHECK(meta_run(in.stream, mc, src) == meta_run(in.stream, mc, src));

    SparseGumbConfig sg;
    sg.s = 2;
    sg.T = in.T;
    sg.eta = {1.0};
    const auto a = sparse_gumb_run(in.stream, Domain(in.labels), sg, src);
    const auto b = sparse_gumb_run(in.stream, Domain(in.labels), sg, src);
    CHECK(a.switch_rounds == b.switch_rounds);
    for (std::size_t t = 0; t < a.rounds.size(); ++t) REQUIRE(a.rounds[t].selected == b.rounds[t].selected);
  }
}

TEST_CASE("unknown-domain releases only carry seen labels above the threshold") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const Instance in = draw(rng);
    UnkBaseConfig ub;
    ub.tree = TreeParams(in.T, in.r, 0.5 + (rng() % 4));
    ub.delta = 0.5;
    ub.delta0 = static_cast<int>(in.labels.size());
    UnkBase mech(ub, NoiseSource(rep));
    std::set<Label> seen;
    for (const auto& ev : in.stream) {
      seen.insert(ev.begin(), ev.end());
      for (const auto& e : mech.step(ev).entries) {
        REQUIRE(seen.contains(e.label));
        REQUIRE(e.value > mech.m_delta());
      }
    }

    const auto all = present(in.stream);
    MetaConfig mc;
    mc.quadrant = Quadrant::UnknownRestricted;
    mc.tree = TreeParams(in.T, in.r, 1.0);
    mc.delta0 = static_cast<int>(in.labels.size());
    mc.k_bar = 1 + static_cast<int>(rng() % 3);
    for (const auto& r : meta_run(in.stream, mc, NoiseSource(rep)))
      for (const auto& e : r.entries) REQUIRE(all.contains(e.label));
  }
}

TEST_CASE("zeroing one event changes at most L cells by at most one") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::int64_t T = 2 + static_cast<std::int64_t>(rng() % 63);
    const int r = 2 + static_cast<int>(rng() % std::min<std::int64_t>(9, T - 1));
    std::vector<std::uint8_t> a(T);
    for (auto& x : a) x = rng() & 1u;
    auto b = a;
    b[rng() % T] = 0;
    const TreeParams p(T, r, 0);
    const CellDiff diff = table_diff(build_table(a, p), build_table(b, p));
    REQUIRE(diff.cells_changed <= p.levels());
    REQUIRE(diff.max_diff <= 1);
  }
}

TEST_CASE("sparse selection respects budget, domain and k") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const Instance in = draw(rng, 8, 120);
    SparseGumbConfig sg;
    sg.s = static_cast<int>(rng() % 4);
    sg.k = 1 + static_cast<int>(rng() % in.labels.size());
    sg.tau = 0.5;
    sg.T = in.T;
    sg.eta = {static_cast<double>(rng() % 5)};
    sg.base = in.r;
    const auto res = sparse_gumb_run(in.stream, Domain(in.labels), sg, NoiseSource(rep));
    REQUIRE(static_cast<int>(res.switch_rounds.size()) <= sg.s);
    for (const auto& round : res.rounds) {
      REQUIRE(round.selected.size() == static_cast<std::size_t>(sg.k));
      std::set<Label> distinct;
      for (const auto& e : round.selected) distinct.insert(e.label);
      REQUIRE(distinct.size() == static_cast<std::size_t>(sg.k));
    }
  }
}

TEST_CASE("limited-domain release never exceeds k_bar items") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 2000; ++rep) {
    LabeledHistogram h;
    for (const auto& l : oracle::labels(1 + static_cast<int>(rng() % 8))) h.set(l, static_cast<Count>(rng() % 10));
    const int k_bar = 1 + static_cast<int>(rng() % 4);
    const LimitedHistogram lim = LimitedHistogram::from_histogram(h, k_bar);
    REQUIRE(unk_gauss(lim, 1.0, 0.1, NoiseSource(rep)).entries.size() <= static_cast<std::size_t>(k_bar));
    const int k = 1 + static_cast<int>(rng() % k_bar);
    const NoisyRelease g = unk_gumbel(lim, k, 1.0, 0.1, NoiseSource(rep));
    REQUIRE(g.entries.size() <= static_cast<std::size_t>(k));
    REQUIRE((g.bottom_present || g.entries.size() == static_cast<std::size_t>(k)));
  }
}
