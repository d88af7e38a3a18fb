// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slabtune/error.hpp"
#include "slabtune/experiment.hpp"
#include "slabtune/histogram.hpp"
#include "slabtune/memcached_client.hpp"
#include "slabtune/optimizer.hpp"
#include "slabtune/slab_config.hpp"
#include "support/brute_force.hpp"
#include "support/fake_memcached.hpp"

namespace {

using namespace slabtune;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Optimizer runs from criteria 3-6, re-checked by criterion 8.
struct EmittedRun {
  SizeHistogram hist;
  OptimizerResult result;
};
std::vector<EmittedRun> emitted_runs;

void record(const SizeHistogram& hist, const OptimizerResult& result) {
  emitted_runs.push_back({hist, result});
}

OptimizerParams params(std::uint64_t seed, std::uint32_t restarts,
                       std::uint64_t patience = 1000) {
  OptimizerParams p;
  p.seed = seed;
  p.restarts = restarts;
  p.patience = patience;
  return p;
}

bool contains_run(std::span<const Bytes> seq, const std::vector<Bytes>& run) {
  return std::search(seq.begin(), seq.end(), run.begin(), run.end()) != seq.end();
}

Outcome golden_defaults() {
  const auto d = default_classes(96, 1.25, 1024 * 1024, 8);
  const std::vector<std::vector<Bytes>> rows = {
      {304, 384, 480, 600, 752, 944},
      {944, 1184, 1480, 1856},
      {1856, 2320, 2904},
      {4544, 5680},
      {8880},
  };
  Outcome o;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!contains_run(d.chunk_sizes(), rows[i])) {
      o.pass = false;
      o.detail += "missing run " + join_chunk_sizes(rows[i]) + "; ";
    }
  if (o.pass) o.detail = "all five published old configurations present";
  return o;
}

Outcome oracle_agreement() {
  std::mt19937_64 rng(20240501);
  const auto defaults = default_classes();
  int dp_mismatch = 0, exact = 0, within = 0, outside = 0;
  double worst_gap = 0;
  for (int t = 0; t < 100; ++t) {
    // Sizes in (192, 480] reach at most the four classes 240/304/384/480.
    const auto h = test_support::random_histogram(rng, 12, 193, 480, 100);
    const auto start = restrict_to_occupied(defaults, h);
    const auto k = start.size();
    const auto dp = dp_optimal(h, k);
    const auto bf = test_support::brute_force_optimal(h, k);
    if (dp.wasted_bytes != bf.wasted_bytes) ++dp_mismatch;

    const auto r = optimize(h, defaults, params(1000 + t, 5));
    if (r.wasted_bytes == dp.wasted_bytes) {
      ++exact;
    } else {
      const double gap = dp.wasted_bytes == 0
                             ? 1e9
                             : (static_cast<double>(r.wasted_bytes) - dp.wasted_bytes) /
                                   dp.wasted_bytes;
      worst_gap = std::max(worst_gap, gap);
      if (gap <= 0.05)
        ++within;
      else
        ++outside;
    }
  }
  Outcome o;
  o.pass = dp_mismatch == 0 && exact >= 95 && outside == 0;
  std::ostringstream s;
  s << "dp/brute mismatches " << dp_mismatch << "; optimizer exact " << exact
    << "/100, within 5% " << within << ", beyond 5% " << outside
    << " (worst gap " << worst_gap * 100 << "%)";
  o.detail = s.str();
  return o;
}

Outcome best_case() {
  std::mt19937_64 rng(77);
  const auto defaults = default_classes();
  const auto d = defaults.chunk_sizes();
  int zero = 0;
  std::size_t largest_k = 0;
  for (int t = 0; t < 20; ++t) {
    // One size inside each of k distinct default classes (up to 8880).
    const auto k = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    std::vector<std::size_t> idx(20);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i + 1;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::map<Bytes, Count> counts;
    for (auto i : idx) {
      const auto s = std::uniform_int_distribution<Bytes>(d[i - 1] + 1, d[i])(rng);
      counts[s] = std::uniform_int_distribution<Count>(1, 1000)(rng);
    }
    const SizeHistogram h(counts);
    if (restrict_to_occupied(defaults, h).size() != h.distinct_sizes())
      return {false, "generator produced a histogram with distinct != k"};
    const auto r = optimize(h, defaults, params(500 + t, 5));
    record(h, r);
    largest_k = std::max(largest_k, k);
    if (r.wasted_bytes == 0) ++zero;
  }
  Outcome o;
  o.pass = zero == 20;
  o.detail = std::to_string(zero) + "/20 instances reached zero waste (k up to " +
             std::to_string(largest_k) + ")";
  return o;
}

Outcome recovery(double mean, double sd, std::uint64_t seed,
                 std::size_t min_classes, std::size_t max_classes,
                 double threshold) {
  WorkloadSpec spec{.mean = mean, .sd = sd, .item_count = 1'000'000, .seed = seed};
  const auto h = generate_lognormal(spec);
  const auto defaults = default_classes();
  const auto occupied = restrict_to_occupied(defaults, h);
  const auto r = optimize(h, defaults, params(seed, 1));
  record(h, r);
  const double pct = percent_recovered(r.initial_wasted_bytes, r.wasted_bytes);
  Outcome o;
  o.pass = occupied.size() >= min_classes && occupied.size() <= max_classes &&
           pct >= threshold;
  std::ostringstream s;
  s << "mean " << mean << " sd " << sd << ": occupied "
    << join_chunk_sizes(occupied.chunk_sizes()) << " -> "
    << join_chunk_sizes(r.config.chunk_sizes()) << ", waste "
    << r.initial_wasted_bytes << " -> " << r.wasted_bytes << ", recovered "
    << pct << "% (need >= " << threshold << "%)";
  o.detail = s.str();
  return o;
}

Outcome no_regression() {
  std::mt19937_64 rng(5150);
  const auto defaults = default_classes();
  int regressions = 0, count_changes = 0, nondeterministic = 0;
  for (int t = 0; t < 500; ++t) {
    const Bytes lo = std::uniform_int_distribution<Bytes>(1, 5000)(rng);
    const Bytes hi = lo + std::uniform_int_distribution<Bytes>(0, 4000)(rng);
    const auto h = test_support::random_histogram(rng, 40, lo, hi, 500);
    auto p = params(rng(), std::uniform_int_distribution<std::uint32_t>(1, 4)(rng),
                    std::uniform_int_distribution<std::uint64_t>(1, 1000)(rng));
    const auto r = optimize(h, defaults, p);
    record(h, r);
    if (r.wasted_bytes > r.initial_wasted_bytes ||
        r.wasted_bytes != wasted_bytes(r.config, h))
      ++regressions;
    if (r.config.size() != restrict_to_occupied(defaults, h).size()) ++count_changes;
    if (!(optimize(h, defaults, p) == r) || !(optimize_serial(h, defaults, p) == r))
      ++nondeterministic;
  }
  Outcome o;
  o.pass = regressions == 0 && count_changes == 0 && nondeterministic == 0;
  o.detail = "500 runs: regressions " + std::to_string(regressions) +
             ", class-count changes " + std::to_string(count_changes) +
             ", non-identical repeats " + std::to_string(nondeterministic);
  return o;
}

Outcome wire_conformance() {
  using Bucket = StatsSizesSample::Bucket;
  Outcome o;
  auto fail = [&](const std::string& why) {
    o.pass = false;
    o.detail += why + "; ";
  };
  if (parse_stats_sizes("STAT 96 3\r\nSTAT 128 1\r\nEND\r\n") !=
      std::vector<Bucket>{{96, 3}, {128, 1}})
    fail("STAT payload");
  if (!parse_stats_sizes("END\r\n").empty()) fail("bare END");
  try {
    parse_stats_sizes("ERROR\r\n");
    fail("ERROR accepted");
  } catch (const ProtocolError&) {
  }

  test_support::FakeMemcached server("STAT 96 3\r\nSTAT 128 1\r\nSTAT 480 6\r\nEND\r\n");
  const auto sample = fetch_stats_sizes(parse_endpoint(server.endpoint()),
                                        std::chrono::seconds(2));
  const auto h = sample_to_histogram(sample);
  if (server.request() != "stats sizes\r\n") fail("request bytes");
  if (h.total_items() != 10 || h.distinct_sizes() != 3) fail("loopback histogram");
  if (o.pass)
    o.detail = "3 payloads parsed as specified; loopback 3-bucket sample -> " +
               std::to_string(h.total_items()) + " items";
  return o;
}

Outcome emission_contract() {
  int mismatched = 0, misaligned = 0, infeasible = 0;
  for (const auto& run : emitted_runs) {
    const auto& cfg = run.result.config;
    const auto payload = format_slab_sizes(cfg);
    if (!(parse_slab_sizes(payload, cfg.bounds()) == cfg)) ++mismatched;

    const auto aligned = align_up_config(cfg, 8);
    const auto aligned_back = parse_slab_sizes(format_slab_sizes(aligned),
                                               aligned.bounds());
    for (auto c : aligned_back.chunk_sizes())
      if (c % 8 != 0) ++misaligned;
    if (!(aligned_back == aligned) || aligned_back.largest() < run.hist.max_size() ||
        !SlabConfig::valid(aligned_back.chunk_sizes(), aligned_back.bounds()))
      ++infeasible;
  }
  Outcome o;
  o.pass = !emitted_runs.empty() && mismatched == 0 && misaligned == 0 &&
           infeasible == 0;
  o.detail = std::to_string(emitted_runs.size()) + " payloads: mismatched " +
             std::to_string(mismatched) + ", misaligned " +
             std::to_string(misaligned) + ", infeasible " +
             std::to_string(infeasible);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "golden default classes", 1, golden_defaults},
      {2, "oracle agreement", 60, oracle_agreement},
      {3, "best case reaches zero waste", 30, best_case},
      {4, "multi-class recovery >= 40%", 300,
       [] { return recovery(518, 50, 4, 4, 1000, 40.0); }},
      {5, "single-class recovery >= 20%", 120,
       [] { return recovery(8131, 15.2, 5, 1, 1, 20.0); }},
      {6, "no regression and determinism", 120, no_regression},
      {7, "wire conformance", 5, wire_conformance},
      {8, "emission contract", 60, emission_contract},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += " [over time limit " + std::to_string(c.limit_seconds) + " s]";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL",
                c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
