#pragma once

#include <array>
#include <string>
#include <vector>

#include "slabtune/histogram.hpp"
#include "slabtune/optimizer.hpp"
#include "slabtune/slab_config.hpp"

namespace slabtune {

struct ExperimentReport {
  std::string label;
  SlabConfig old_config;
  SlabConfig new_config;
  Bytes old_waste = 0;
  Bytes new_waste = 0;
  double percent_recovered = 0.0;
  Count item_count = 0;
  std::uint64_t seed = 0;
};

/// 100 * (1 - new/old); 0 when there was nothing to recover.
double percent_recovered(Bytes old_waste, Bytes new_waste);

/// Optimizes `hist` against `defaults` and reports before/after. With
/// `align` > 1 the optimized sizes are rounded up to that multiple; if the
/// rounded configuration wastes more than the baseline, the baseline is
/// reported as the new configuration.
ExperimentReport run_experiment(std::string label, const SizeHistogram& hist,
                                const SlabConfig& defaults,
                                const OptimizerParams& params, Bytes align = 1);

// Published log-normal workloads and their reported before/after numbers.
struct PublishedCase {
  int id;
  double mean;
  double sd;
  std::vector<Bytes> old_sizes;
  std::vector<Bytes> new_sizes;
  Bytes old_waste;
  Bytes new_waste;
  double percent_recovered;
};

const std::vector<PublishedCase>& published_cases();

}  // namespace slabtune
