#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slabtune/histogram.hpp"

namespace slabtune {

// Constant-time range queries over a histogram, used by the optimizer to
// score single-byte moves without rescanning every entry.
//
// Backed by dense prefix arrays over [min_size, max_size], so memory is
// proportional to the size span (at most one page).
class WasteEvaluator {
 public:
  explicit WasteEvaluator(const SizeHistogram& hist);

  bool empty() const noexcept { return counts_le_.empty(); }
  Bytes min_size() const noexcept { return min_size_; }
  Bytes max_size() const noexcept { return max_size_; }

  // Items with size <= x.
  Count count_le(Bytes x) const noexcept;
  // Items with size exactly x.
  Count count_at(Bytes x) const noexcept;
  // Sum of sizes of items with size <= x.
  Bytes bytes_le(Bytes x) const noexcept;

  // Waste of the class with chunk `chunk` that holds sizes in (lower, chunk].
  std::int64_t class_waste(Bytes lower, Bytes chunk) const noexcept;

  // Total waste of strictly increasing `chunks`. Caller guarantees the last
  // chunk covers max_size().
  Bytes total(std::span<const Bytes> chunks) const noexcept;

 private:
  Bytes min_size_ = 0;
  Bytes max_size_ = 0;
  std::vector<Count> counts_le_;
  std::vector<Bytes> bytes_le_;
};

}  // namespace slabtune
