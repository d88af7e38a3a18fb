#include <algorithm>
#include <exception>
#include <random>
#include <set>

#include "climb.hpp"
#include "slabtune/error.hpp"

namespace slabtune {

namespace {

// Spreads k classes over the count quantiles of the histogram. Sizes below
// the minimum chunk are lifted to it first.
SlabConfig quantile_config(const SizeHistogram& hist, const SlabBounds& bounds,
                           std::size_t k) {
  std::vector<SizeHistogram::Entry> pool;
  for (const auto& e : hist.entries()) {
    const Bytes s = std::max(e.size, bounds.min_chunk);
    if (!pool.empty() && pool.back().size == s)
      pool.back().count += e.count;
    else
      pool.push_back({s, e.count});
  }
  if (k > pool.size())
    throw ValidationError("cannot place " + std::to_string(k) +
                          " classes over " + std::to_string(pool.size()) +
                          " distinct sizes");

  std::vector<bool> chosen(pool.size(), false);
  const Count total = hist.total_items();
  Count cum = 0;
  std::size_t idx = 0;
  for (std::size_t q = 1; q <= k; ++q) {
    const Count target = (q * total + k - 1) / k;
    while (cum + pool[idx].count < target) cum += pool[idx++].count;
    chosen[idx] = true;
  }
  chosen.back() = true;
  auto picked = static_cast<std::size_t>(std::count(chosen.begin(), chosen.end(), true));
  for (std::size_t i = pool.size(); picked < k && i-- > 0;) {
    if (!chosen[i]) {
      chosen[i] = true;
      ++picked;
    }
  }
  std::vector<Bytes> sizes;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (chosen[i]) sizes.push_back(pool[i].size);
  return SlabConfig(std::move(sizes), bounds);
}

// k distinct sizes drawn uniformly from the observed range, largest forced to
// the largest observed size. Empty when the range holds fewer than k values.
std::optional<SlabConfig> random_config(const SizeHistogram& hist,
                                        const SlabBounds& bounds, std::size_t k,
                                        std::uint64_t seed) {
  const Bytes lo = std::max(hist.min_size(), bounds.min_chunk);
  const Bytes hi = std::max(hist.max_size(), lo);
  const Bytes range = hi - lo + 1;
  if (range < k) return std::nullopt;

  // Floyd's sampling without replacement.
  std::mt19937_64 rng(seed);
  std::set<Bytes> drawn;
  for (Bytes j = range - k; j < range; ++j) {
    const Bytes t = std::uniform_int_distribution<Bytes>(0, j)(rng);
    drawn.insert(drawn.contains(t) ? j : t);
  }
  std::vector<Bytes> sizes;
  sizes.reserve(k);
  for (auto d : drawn) sizes.push_back(lo + d);
  sizes.back() = hi;
  return SlabConfig(std::move(sizes), bounds);
}

struct Plan {
  WasteEvaluator eval;
  std::vector<SlabConfig> starts;
};

Plan plan_restarts(const SizeHistogram& hist, const SlabConfig& defaults,
                   const OptimizerParams& params) {
  params.validate();
  if (hist.empty()) throw ValidationError("cannot optimize an empty histogram");
  if (hist.max_size() > defaults.largest())
    throw OversizeError(hist.max_size(), defaults.largest());

  Plan plan{WasteEvaluator(hist), {}};
  plan.starts.reserve(params.restarts);
  plan.starts.push_back(initial_config(hist, defaults, params.classes));
  const std::size_t k = plan.starts.front().size();
  for (std::uint32_t r = 1; r < params.restarts; ++r) {
    auto start = random_config(hist, defaults.bounds(), k, params.seed + r);
    plan.starts.push_back(start ? *std::move(start) : plan.starts.front());
  }
  return plan;
}

OptimizerParams restart_params(const OptimizerParams& params, std::uint32_t r) {
  auto p = params;
  p.seed = params.seed + r;
  return p;
}

OptimizerResult pick_best(std::vector<OptimizerResult> results,
                          Bytes baseline_waste) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].wasted_bytes < results[best].wasted_bytes) best = r;
  auto out = std::move(results[best]);
  out.restart_index_of_best = static_cast<std::uint32_t>(best);
  out.initial_wasted_bytes = baseline_waste;
  return out;
}

}  // namespace

SlabConfig initial_config(const SizeHistogram& hist, const SlabConfig& defaults,
                          std::optional<std::size_t> classes) {
  auto occupied = restrict_to_occupied(defaults, hist);
  if (!classes || *classes == occupied.size()) return occupied;
  if (*classes < 1) throw ValidationError("class count must be at least 1");
  return quantile_config(hist, defaults.bounds(), *classes);
}

OptimizerResult optimize_serial(const SizeHistogram& hist,
                                const SlabConfig& defaults,
                                const OptimizerParams& params) {
  const auto plan = plan_restarts(hist, defaults, params);
  std::vector<OptimizerResult> results;
  results.reserve(plan.starts.size());
  for (std::uint32_t r = 0; r < plan.starts.size(); ++r)
    results.push_back(
        detail::climb(plan.starts[r], plan.eval, restart_params(params, r)));
  const Bytes baseline = results.front().initial_wasted_bytes;
  return pick_best(std::move(results), baseline);
}

OptimizerResult optimize(const SizeHistogram& hist, const SlabConfig& defaults,
                         const OptimizerParams& params) {
  const auto plan = plan_restarts(hist, defaults, params);
  const auto n = static_cast<std::int64_t>(plan.starts.size());
  std::vector<std::optional<OptimizerResult>> slots(plan.starts.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < n; ++r) {
    try {
      const auto idx = static_cast<std::size_t>(r);
      slots[idx] = detail::climb(plan.starts[idx], plan.eval,
                                 restart_params(params, static_cast<std::uint32_t>(r)));
    } catch (...) {
#pragma omp critical(slabtune_optimize_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<OptimizerResult> results;
  results.reserve(slots.size());
  for (auto& s : slots) results.push_back(*std::move(s));
  const Bytes baseline = results.front().initial_wasted_bytes;
  return pick_best(std::move(results), baseline);
}

}  // namespace slabtune
