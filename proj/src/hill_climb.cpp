#include <random>

#include "climb.hpp"
#include "slabtune/error.hpp"

namespace slabtune {

void OptimizerParams::validate() const {
  if (patience < 1) throw ValidationError("patience must be at least 1");
  if (restarts < 1) throw ValidationError("restarts must be at least 1");
  if (max_iterations < patience)
    throw ValidationError("max iterations must be at least the patience");
  if (classes && *classes < 1)
    throw ValidationError("class count must be at least 1");
}

namespace detail {

OptimizerResult climb(const SlabConfig& initial, const WasteEvaluator& eval,
                      const OptimizerParams& params) {
  std::vector<Bytes> sizes(initial.chunk_sizes().begin(),
                           initial.chunk_sizes().end());
  const auto& bounds = initial.bounds();
  const std::size_t k = sizes.size();
  const Bytes floor = bounds.min_chunk;
  const Bytes ceiling = bounds.page_size;
  const Bytes cover = eval.max_size();

  std::mt19937_64 rng(params.seed);
  // One draw per step: move index / 2 is the class, the low bit the direction.
  std::uniform_int_distribution<std::size_t> pick_move(0, 2 * k - 1);

  const Bytes initial_waste = eval.total(sizes);
  std::int64_t current = static_cast<std::int64_t>(initial_waste);
  std::uint64_t rejections = 0;
  std::uint64_t iterations = 0;
  std::uint64_t accepted = 0;

  while (rejections <= params.patience && iterations < params.max_iterations) {
    ++iterations;
    const std::size_t move = pick_move(rng);
    const std::size_t i = move >> 1;
    const bool up = (move & 1) != 0;
    const Bytes old = sizes[i];
    const Bytes cand = up ? old + 1 : old - 1;
    const bool last = i + 1 == k;

    const bool valid = cand >= floor && cand <= ceiling &&
                       (i == 0 || cand > sizes[i - 1]) &&
                       (last ? cand >= cover : cand < sizes[i + 1]);
    if (!valid) {
      ++rejections;
      continue;
    }

    // A one-byte move adds or removes a byte from every item already in
    // class i, and shifts the items sitting exactly at the boundary between
    // class i and class i + 1.
    const Bytes lower = i == 0 ? 0 : sizes[i - 1];
    const auto members = static_cast<std::int64_t>(eval.count_le(old) - eval.count_le(lower));
    const Bytes edge = up ? cand : old;
    const auto at_edge = last ? 0 : static_cast<std::int64_t>(eval.count_at(edge));
    const auto gap = last ? 0 : static_cast<std::int64_t>(sizes[i + 1] - edge);
    const std::int64_t delta = up ? members - at_edge * gap
                                  : at_edge * gap - (members - at_edge);

    if (delta <= 0) {
      sizes[i] = cand;
      current += delta;
      rejections = 0;
      ++accepted;
    } else {
      ++rejections;
    }
  }

  return OptimizerResult{
      .config = SlabConfig(std::move(sizes), bounds),
      .wasted_bytes = static_cast<Bytes>(current),
      .initial_wasted_bytes = initial_waste,
      .iterations = iterations,
      .accepted_moves = accepted,
      .restart_index_of_best = 0,
  };
}

}  // namespace detail

OptimizerResult hill_climb(const SlabConfig& initial, const SizeHistogram& hist,
                           const OptimizerParams& params) {
  params.validate();
  if (hist.empty()) throw ValidationError("cannot optimize an empty histogram");
  if (hist.max_size() > initial.largest())
    throw OversizeError(hist.max_size(), initial.largest());
  const WasteEvaluator eval(hist);
  return detail::climb(initial, eval, params);
}

}  // namespace slabtune
