#pragma once

// Internal entry points shared by hill_climb() and the restart drivers.

#include "slabtune/optimizer.hpp"
#include "slabtune/waste_evaluator.hpp"

namespace slabtune::detail {

// `initial` must already be known to cover `eval.max_size()`.
OptimizerResult climb(const SlabConfig& initial, const WasteEvaluator& eval,
                      const OptimizerParams& params);

}  // namespace slabtune::detail
