#pragma once

#include <cstdint>
#include <optional>

#include "slabtune/histogram.hpp"
#include "slabtune/slab_config.hpp"

namespace slabtune {

struct OptimizerParams {
  // Consecutive rejected moves tolerated before stopping.
  std::uint64_t patience = 1000;
  std::uint64_t seed = 0;
  std::uint32_t restarts = 1;
  // Hard cap on attempted moves per climb.
  std::uint64_t max_iterations = 10'000'000;
  // Overrides the class count taken from the occupied default classes.
  std::optional<std::size_t> classes;

  void validate() const;
};

struct OptimizerResult {
  SlabConfig config;
  Bytes wasted_bytes = 0;
  Bytes initial_wasted_bytes = 0;
  std::uint64_t iterations = 0;
  std::uint64_t accepted_moves = 0;
  std::uint32_t restart_index_of_best = 0;

  friend bool operator==(const OptimizerResult&, const OptimizerResult&) = default;
};

/// Randomized hill climbing over chunk sizes.
///
/// Each step moves one uniformly chosen class up or down by one byte. The
/// move is kept when waste does not increase, which resets the rejection
/// counter; otherwise it is undone and the counter grows. Moves that break
/// ordering, bounds, or coverage of the largest item count as rejections.
/// Stops once the counter exceeds `params.patience` or after
/// `params.max_iterations` attempts. `params.restarts` and `params.classes`
/// are ignored here.
OptimizerResult hill_climb(const SlabConfig& initial, const SizeHistogram& hist,
                           const OptimizerParams& params);

/// Starting configuration of restart 0: the occupied default classes, or,
/// when `classes` is set to a different count, `classes` sizes spread over
/// the histogram's count quantiles.
SlabConfig initial_config(const SizeHistogram& hist, const SlabConfig& defaults,
                          std::optional<std::size_t> classes);

/// Runs `params.restarts` climbs and returns the lowest-waste result (ties go
/// to the lower restart index). Restart 0 starts from initial_config(); the
/// others start from sorted random draws over the observed size range, each
/// seeded with params.seed + restart index. `initial_wasted_bytes` is the
/// waste of restart 0's start. Restarts run in parallel with OpenMP.
OptimizerResult optimize(const SizeHistogram& hist, const SlabConfig& defaults,
                         const OptimizerParams& params);

/// Same contract as optimize(), restarts executed one after another. Kept as
/// the reference the parallel path is tested against.
OptimizerResult optimize_serial(const SizeHistogram& hist,
                                const SlabConfig& defaults,
                                const OptimizerParams& params);

struct OracleResult {
  SlabConfig config;
  Bytes wasted_bytes = 0;
};

/// Exact minimum-waste configuration with exactly k classes, by dynamic
/// programming over contiguous groups of the sorted distinct sizes. Among
/// optimal answers the lexicographically smallest size list wins.
/// O(m^2 k) for m distinct sizes; each layer is parallelized over its start
/// index. Throws ValidationError unless 1 <= k <= distinct sizes.
OracleResult dp_optimal(const SizeHistogram& hist, std::size_t k);

/// Serial reference for dp_optimal().
OracleResult dp_optimal_serial(const SizeHistogram& hist, std::size_t k);

}  // namespace slabtune
