#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "contmech/histogram.hpp"
#include "contmech/noise.hpp"
#include "contmech/tree_mechanism.hpp"

namespace contmech {

// ---- Neighbour relations ----

// One histogram dominates the other, every label differs by at most 1 and at
// most delta0 labels differ. Absent labels count as 0.
bool is_histogram_neighbor(const LabeledHistogram& h0, const LabeledHistogram& h1, int delta0);

// Same length; identical except at one round where one side is empty.
bool is_stream_neighbor(const EventStream& s0, const EventStream& s1);

// ---- Brute-force table oracles ----

std::vector<Count> brute_force_prefix(std::span<const std::uint8_t> bits);

struct CellDiff {
  int cells_changed = 0;
  Count max_diff = 0;
};

// Partial sums recomputed from cell intervals, independent of build_table.
CellDiff brute_force_cell_diff(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                               int r, std::int64_t T);
CellDiff table_diff(const PartialSumTable& a, const PartialSumTable& b);

// ---- Two-neighbour oracle mechanisms ----

enum class BinKind { Real, Dummy, Bad, Bottom };

// One bin of a relabelled histogram. `name` is the label the mechanism sees
// (a real label, "#top<i>", "#bad<l>" or "#bot"); `source` is the entry of
// h^(b) the count came from ("#top<i>" for a dummy).
struct OracleBin {
  std::string name;
  BinKind kind = BinKind::Real;
  std::string source;
  double count = 0.0;
};

// Padded top-k_bar domain of h in rank order (bottom excluded): the top-k_bar
// labels when h_(k_bar) > 0, otherwise the p positive labels and dummies
// #top1 .. #top(k_bar-p).
std::vector<OracleBin> padded_domain(const LabeledHistogram& h, int k_bar);

// Relabelled histogram v^(b) over the limited domain, before noise. Common
// bins keep their label, uncommon ones become #bad1, #bad2, ... in rank order
// and the bottom bin holds h_(k_bar+1) + 1 + sqrt(2) tau Phi^-1(1 - delta).
std::vector<OracleBin> relabel_bot(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                   int k_bar, double tau, double delta);

// relabel_bot plus N(0, tau^2) on every bin.
std::vector<OracleBin> gauss_mech_bot(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                      int k_bar, double tau, double delta, const NoiseSource& src);

struct OracleRelease {
  NoisyRelease release;
  bool good = true;  // no bin sourced from an uncommon real label survived
};

// Post-processing of gauss_mech_bot: keep bins strictly above the bottom,
// map bad bins back to their source, drop dummies, sort descending.
OracleRelease gauss_mech_bot_release(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                     int k_bar, double tau, double delta, const NoiseSource& src);

// Padded full domain: all positive labels of h (label order) and dummies up to d_bar.
std::vector<OracleBin> padded_full_domain(const LabeledHistogram& h, int d_bar);

// Full-domain relabelling v^(b) before noise. An uncommon real label keeps its
// count; an uncommon dummy takes the next real label of B with count 0.
std::vector<OracleBin> relabel_full(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                    int d_bar);

std::vector<OracleBin> gauss_mech_full(int b, const LabeledHistogram& h0, const LabeledHistogram& h1,
                                       int d_bar, double tau, const NoiseSource& src);

// Continual oracle A(b): gauss_mech_full on every cell of the partial
// histogram table at scale sqrt(L_r) tau, dummy relabelling to newly seen
// items per round, aggregation over I_t(r), threshold m_delta, dummies dropped.
ReleaseSequence unk_base_oracle(int b, const EventStream& s0, const EventStream& s1,
                                const TreeParams& tree, double delta, int d_bar,
                                const NoiseSource& src);

// Every label released at round t has appeared by round t in both streams.
bool good_outcome(const ReleaseSequence& rel, const EventStream& s0, const EventStream& s1);

// Limited-domain variant with dummies: pads to k_bar items, noises all of
// them and the bottom, cuts at the bottom and drops dummies.
NoisyRelease unk_gauss_top(const LabeledHistogram& h, int k_bar, double tau, double delta,
                           const NoiseSource& src);

// ---- Check runners ----

struct Metric {
  std::string name;
  double value = 0.0;
};

struct CheckReport {
  std::string check;
  bool passed = true;
  std::vector<Metric> metrics;
  std::vector<std::string> failures;

  void metric(std::string name, double value) { metrics.push_back({std::move(name), value}); }
  void fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
  }
};

// Neighbouring bit streams for every T <= t_max, r in rs and every changed
// position, plus all stream pairs for T <= exhaustive_t.
CheckReport check_sensitivity(int t_max = 64, std::vector<int> rs = {2, 3, 4}, int exhaustive_t = 12);
CheckReport check_bad_outcomes_unkgauss(std::uint64_t trials, std::uint64_t seed);
CheckReport check_bad_outcomes_unkbase(std::uint64_t trials, std::uint64_t seed);
CheckReport check_good_equivalence_unkgauss(std::uint64_t trials, std::uint64_t seed);
CheckReport check_good_equivalence_unkbase(std::uint64_t trials, std::uint64_t seed);
CheckReport check_dummy_equivalence(std::uint64_t trials, std::uint64_t seed);

// Names accepted by run_check: sensitivity, bad-outcomes-unkgauss,
// bad-outcomes-unkbase, good-equivalence, dummy-equivalence.
std::vector<CheckReport> run_check(const std::string& name, std::uint64_t trials, std::uint64_t seed);

}  // namespace contmech
