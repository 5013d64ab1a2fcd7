#include "contmech/stream_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "contmech/error.hpp"
#include "contmech/known_domain.hpp"
#include "contmech/noise.hpp"

namespace contmech {

std::vector<Label> make_domain(std::size_t d) {
  int width = 3;
  for (std::size_t m = 1000; m < d; m *= 10) ++width;
  std::vector<Label> out;
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::string digits = std::to_string(i);
    out.push_back("i" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(digits.size(), width), '0') +
                  digits);
  }
  return out;
}

std::string_view to_string(StreamKind k) {
  switch (k) {
    case StreamKind::Zipf: return "zipf";
    case StreamKind::SwitchingZipf: return "switching-zipf";
    case StreamKind::Assumption1: return "assumption1";
    case StreamKind::Adversarial: return "adversarial";
    case StreamKind::File: return "file";
  }
  return "?";
}

StreamKind parse_stream_kind(std::string_view name) {
  if (name == "zipf") return StreamKind::Zipf;
  if (name == "switching-zipf") return StreamKind::SwitchingZipf;
  if (name == "assumption1") return StreamKind::Assumption1;
  if (name == "adversarial") return StreamKind::Adversarial;
  if (name == "file") return StreamKind::File;
  throw UsageError("unknown stream kind '" + std::string(name) +
                   "' (expected zipf, switching-zipf, assumption1, adversarial or file)");
}

void StreamSpec::validate() const {
  if (kind == StreamKind::File) {
    require(!path.empty(), "stream: file streams need a path");
    return;
  }
  require(d >= 1, "stream: d must be at least 1");
  if (kind == StreamKind::Assumption1) {
    require(s >= 1, "stream: s must be at least 1");
    require(d > static_cast<std::size_t>(s), "stream: assumption1 needs d > s");
    require(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < alpha3,
            "stream: need 0 < alpha1 < alpha2 < alpha3");
    require(quiet_rounds >= 0, "stream: quiet_rounds must be non-negative");
    return;
  }
  require(T >= 1, "stream: T must be at least 1");
  require(zipf_exponent >= 0.0, "stream: zipf exponent must be non-negative");
  require(events_per_round >= 1 && static_cast<std::size_t>(events_per_round) <= d,
          "stream: events_per_round must lie in [1, d]");
  for (std::size_t i = 0; i < switch_times.size(); ++i) {
    require(switch_times[i] >= 1 && switch_times[i] < T, "stream: switch times must lie in [1, T)");
    if (i > 0) require(switch_times[i] > switch_times[i - 1], "stream: switch times must increase");
  }
}

std::vector<double> zipf_pmf(std::size_t d, double exponent) {
  std::vector<double> p(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) total += p[i] = std::pow(static_cast<double>(i + 1), -exponent);
  for (double& x : p) x /= total;
  return p;
}

std::vector<std::vector<std::size_t>> phase_rankings(std::size_t d, std::size_t phases, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> perm(d);
  for (std::size_t i = 0; i < d; ++i) perm[i] = i;
  out.push_back(perm);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t p = 1; p < phases; ++p) {
    const std::size_t prev_top = perm[0];
    std::shuffle(perm.begin(), perm.end(), rng);
    if (d > 1 && perm[0] == prev_top) std::swap(perm[0], perm[1 + rng() % (d - 1)]);
    out.push_back(perm);
  }
  return out;
}

namespace {

EventStream zipf_stream(const StreamSpec& spec) {
  const auto pmf = zipf_pmf(spec.d, spec.zipf_exponent);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  cdf.back() = 1.0;
  const std::vector<std::int64_t> switches =
      spec.kind == StreamKind::SwitchingZipf ? spec.switch_times : std::vector<std::int64_t>{};
  const auto rankings = phase_rankings(spec.d, switches.size() + 1, spec.seed);
  const auto domain = make_domain(spec.d);
  const NoiseSource src(spec.seed);

  EventStream out;
  out.reserve(static_cast<std::size_t>(spec.T));
  std::size_t phase = 0;
  std::vector<char> used(spec.d, 0);
  for (std::int64_t t = 1; t <= spec.T; ++t) {
    while (phase < switches.size() && t > switches[phase]) ++phase;
    Event ev;
    std::vector<std::size_t> picked;
    for (std::uint64_t lane = 0; picked.size() < static_cast<std::size_t>(spec.events_per_round); ++lane) {
      const double u = src.uniform({tag::kStream, 0, 0, static_cast<std::uint64_t>(t)}, lane);
      const auto rank = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::size_t item = rankings[phase][std::min(rank, spec.d - 1)];
      if (used[item]) continue;
      used[item] = 1;
      picked.push_back(item);
    }
    std::sort(picked.begin(), picked.end());
    for (std::size_t item : picked) {
      ev.push_back(domain[item]);
      used[item] = 0;
    }
    out.push_back(std::move(ev));
  }
  return out;
}

// Every item joins a round with probability 1/2 and a hot item, rotating every
// 32 rounds, is always present. The running maximum changes often.
EventStream adversarial_stream(const StreamSpec& spec) {
  const auto domain = make_domain(spec.d);
  const NoiseSource src(spec.seed);
  EventStream out;
  out.reserve(static_cast<std::size_t>(spec.T));
  for (std::int64_t t = 1; t <= spec.T; ++t) {
    const std::size_t hot = static_cast<std::size_t>((t - 1) / 32) % spec.d;
    Event ev;
    for (std::size_t i = 0; i < spec.d; ++i) {
      const double u = src.uniform({tag::kStream, i, 1, static_cast<std::uint64_t>(t)});
      if (i == hot || u < 0.5) ev.push_back(domain[i]);
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::int64_t lead_for(double alpha3) { return static_cast<std::int64_t>(std::ceil(alpha3)) + 1; }

}  // namespace

EventStream read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("stream: cannot open '" + path + "'");
  EventStream out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    std::istringstream words(line);
    Event ev;
    for (std::string w; words >> w;) ev.push_back(w);
    check_event(ev, static_cast<int>(ev.size()) + 1);
    out.push_back(std::move(ev));
  }
  return out;
}

EventStream generate(const StreamSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case StreamKind::Zipf:
    case StreamKind::SwitchingZipf:
      return zipf_stream(spec);
    case StreamKind::Adversarial:
      return adversarial_stream(spec);
    case StreamKind::Assumption1:
      return generate_assumption1(spec.s, spec.d, spec.alpha1, spec.alpha2, spec.alpha3, lead_for(spec.alpha3),
                                  spec.quiet_rounds, spec.seed)
          .stream;
    case StreamKind::File:
      return read_stream_file(spec.path);
  }
  return {};
}

// ---- Assumption-1 streams ----

std::int64_t assumption1_length(int s, std::int64_t lead, std::int64_t quiet_rounds) {
  // Phase l lasts l * lead rounds: the fresh leader climbs to l * lead.
  return quiet_rounds + lead * static_cast<std::int64_t>(s) * (s + 1) / 2 + lead / 2;
}

namespace {

std::vector<std::vector<Count>> count_table(const EventStream& stream, const std::vector<Label>& domain) {
  const Domain dom(domain);
  std::vector<std::vector<Count>> h(stream.size(), std::vector<Count>(domain.size(), 0));
  std::vector<Count> cur(domain.size(), 0);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (const auto& label : stream[t]) ++cur[dom.index(label)];
    h[t] = cur;
  }
  return h;
}

// S_t(alpha): items within alpha of the maximum.
std::vector<std::size_t> near_max(const std::vector<Count>& h, double alpha) {
  const Count mx = *std::max_element(h.begin(), h.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (static_cast<double>(h[i]) >= static_cast<double>(mx) - alpha) out.push_back(i);
  return out;
}

}  // namespace

Assumption1Stream generate_assumption1(int s, std::size_t d, double alpha1, double alpha2, double alpha3,
                                       std::int64_t lead, std::int64_t quiet_rounds, std::uint64_t seed) {
  require(s >= 1 && d > static_cast<std::size_t>(s), "assumption1: need s >= 1 and d > s");
  require(lead >= 1 && quiet_rounds >= 0, "assumption1: need lead >= 1 and quiet_rounds >= 0");
  Assumption1Stream out;
  out.domain = make_domain(d);
  out.layout.alpha1 = alpha1;
  out.layout.alpha2 = alpha2;
  out.layout.alpha3 = alpha3;

  std::vector<std::size_t> order(d);
  for (std::size_t i = 0; i < d; ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0xa55a5aa5c3c3c3c3ULL);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> leaders(order.begin(), order.begin() + s);
  for (std::size_t v : leaders) out.layout.leaders.push_back(out.domain[v]);

  auto& stream = out.stream;
  for (std::int64_t t = 0; t < quiet_rounds; ++t) stream.emplace_back();
  std::vector<std::int64_t> phase_start(static_cast<std::size_t>(s) + 1);
  for (int l = 1; l <= s; ++l) {
    phase_start[static_cast<std::size_t>(l - 1)] = static_cast<std::int64_t>(stream.size()) + 1;
    for (std::int64_t i = 0; i < l * lead; ++i) stream.push_back({out.domain[leaders[static_cast<std::size_t>(l - 1)]]});
  }
  for (std::int64_t i = 0; i < lead / 2; ++i) stream.push_back({out.domain[leaders.back()]});
  const auto T = static_cast<std::int64_t>(stream.size());

  // Derive the intervals from the realised counts.
  const auto h = count_table(stream, out.domain);
  auto row = [&](std::int64_t t) -> const std::vector<Count>& { return h[static_cast<std::size_t>(t - 1)]; };
  auto spread = [&](std::int64_t t) {
    const auto& r = row(t);
    return static_cast<double>(*std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end()));
  };

  out.layout.b0 = {1, 0};
  while (out.layout.b0.last < T && spread(out.layout.b0.last + 1) <= alpha2) ++out.layout.b0.last;

  for (int l = 1; l <= s; ++l) {
    const std::size_t u = leaders[static_cast<std::size_t>(l - 1)];
    auto sole = [&](std::int64_t t) {
      const auto S = near_max(row(t), alpha1);
      return S.size() == 1 && S[0] == u;
    };
    auto gap = [&](std::int64_t t) {
      Count other = 0;
      for (std::size_t v = 0; v < d; ++v)
        if (v != u) other = std::max(other, row(t)[v]);
      return static_cast<double>(row(t)[u] - other);
    };
    Interval a{phase_start[static_cast<std::size_t>(l - 1)], 0};
    while (a.first <= T && !sole(a.first)) ++a.first;
    a.last = a.first - 1;
    while (a.last < T && sole(a.last + 1)) ++a.last;

    Interval ap{a.first, a.first - 1};
    while (ap.first <= a.last && gap(ap.first) < alpha3) ++ap.first;
    ap.last = ap.first - 1;
    while (ap.last < a.last && gap(ap.last + 1) >= alpha3) ++ap.last;
    if (ap.empty()) ap = {1, 0};

    Interval b{a.first, a.first - 1};
    while (b.last < T && -gap(b.last + 1) <= alpha2) ++b.last;

    out.layout.a.push_back(a);
    out.layout.a_prime.push_back(ap);
    out.layout.b.push_back(b);
  }
  return out;
}

Assumption1Check validate_assumption1(const EventStream& stream, const std::vector<Label>& domain,
                                      const Assumption1Layout& layout) {
  Assumption1Check check;
  auto fail = [&](std::string why) {
    check.ok = false;
    check.violations.push_back(std::move(why));
  };
  const auto T = static_cast<std::int64_t>(stream.size());
  const std::size_t s = layout.a.size();
  if (!(layout.alpha1 < layout.alpha2 && layout.alpha2 < layout.alpha3)) fail("alphas not increasing");
  if (layout.a_prime.size() != s || layout.b.size() != s) {
    fail("layout has mismatched phase counts");
    return check;
  }
  const auto h = count_table(stream, domain);
  auto row = [&](std::int64_t t) -> const std::vector<Count>& { return h[static_cast<std::size_t>(t - 1)]; };
  auto clamp = [&](Interval iv) {
    iv.first = std::max<std::int64_t>(iv.first, 1);
    iv.last = std::min(iv.last, T);
    return iv;
  };

  // Coverage of [T].
  std::vector<char> covered(static_cast<std::size_t>(T), 0);
  auto mark = [&](Interval iv) {
    iv = clamp(iv);
    for (std::int64_t t = iv.first; t <= iv.last; ++t) covered[static_cast<std::size_t>(t - 1)] = 1;
  };
  mark(layout.b0);
  for (std::size_t l = 0; l < s; ++l) {
    mark(layout.a[l]);
    mark(layout.b[l]);
  }
  for (std::int64_t t = 1; t <= T; ++t)
    if (!covered[static_cast<std::size_t>(t - 1)]) {
      fail("round " + std::to_string(t) + " is not covered");
      break;
    }

  // B_0: all counts within alpha2 of each other.
  for (std::int64_t t = clamp(layout.b0).first; t <= clamp(layout.b0).last; ++t) {
    const auto& r = row(t);
    if (static_cast<double>(*std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end())) >
        layout.alpha2) {
      fail("B_0: spread above alpha2 at round " + std::to_string(t));
      break;
    }
  }

  for (std::size_t l = 0; l < s; ++l) {
    const std::string tag = "phase " + std::to_string(l + 1) + ": ";
    const Interval a = layout.a[l];
    if (a.empty() || a.first < 1 || a.last > T) {
      fail(tag + "A is empty or out of range");
      continue;
    }
    const auto S = near_max(row(a.first), layout.alpha1);
    std::vector<char> in_s(domain.size(), 0);
    for (std::size_t u : S) in_s[u] = 1;

    for (std::int64_t t = a.first; t <= a.last; ++t) {
      const auto& r = row(t);
      if (near_max(r, layout.alpha1) != S) {
        fail(tag + "S_t(alpha1) changes inside A at round " + std::to_string(t));
        break;
      }
      bool separated = true;
      for (std::size_t u : S)
        for (std::size_t v = 0; v < domain.size(); ++v)
          if (!in_s[v] && r[u] <= r[v]) separated = false;
      if (!separated) {
        fail(tag + "S_A does not strictly dominate at round " + std::to_string(t));
        break;
      }
    }

    const Interval b = clamp(layout.b[l]);
    for (std::int64_t t = b.first; t <= b.last; ++t) {
      const auto& r = row(t);
      bool ok = true;
      for (std::size_t u : S)
        for (std::size_t v = 0; v < domain.size(); ++v)
          if (v != u && static_cast<double>(r[u]) < static_cast<double>(r[v]) - layout.alpha2) ok = false;
      if (!ok) {
        fail(tag + "B: an S_A item trails by more than alpha2 at round " + std::to_string(t));
        break;
      }
    }

    const Interval ap = layout.a_prime[l];
    if (ap.empty()) {
      fail(tag + "A' is empty");
      continue;
    }
    if (ap.first < a.first || ap.last > a.last) fail(tag + "A' is not inside A");
    for (std::int64_t t = std::max(ap.first, a.first); t <= std::min(ap.last, a.last); ++t) {
      const auto& r = row(t);
      bool ok = true;
      for (std::size_t u : S)
        for (std::size_t v = 0; v < domain.size(); ++v)
          if (!in_s[v] && static_cast<double>(r[u]) < static_cast<double>(r[v]) + layout.alpha3) ok = false;
      if (!ok) {
        fail(tag + "A': gap below alpha3 at round " + std::to_string(t));
        break;
      }
    }
  }
  return check;
}

}  // namespace contmech
