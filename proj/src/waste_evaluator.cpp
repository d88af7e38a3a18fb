#include "slabtune/waste_evaluator.hpp"

namespace slabtune {

WasteEvaluator::WasteEvaluator(const SizeHistogram& hist) {
  if (hist.empty()) return;
  min_size_ = hist.min_size();
  max_size_ = hist.max_size();
  const auto span = static_cast<std::size_t>(max_size_ - min_size_ + 1);
  counts_le_.assign(span, 0);
  bytes_le_.assign(span, 0);
  for (const auto& e : hist.entries()) {
    counts_le_[e.size - min_size_] = e.count;
    bytes_le_[e.size - min_size_] = e.size * e.count;
  }
  for (std::size_t i = 1; i < span; ++i) {
    counts_le_[i] += counts_le_[i - 1];
    bytes_le_[i] += bytes_le_[i - 1];
  }
}

Count WasteEvaluator::count_le(Bytes x) const noexcept {
  if (counts_le_.empty() || x < min_size_) return 0;
  if (x >= max_size_) return counts_le_.back();
  return counts_le_[x - min_size_];
}

Count WasteEvaluator::count_at(Bytes x) const noexcept {
  if (counts_le_.empty() || x < min_size_ || x > max_size_) return 0;
  const auto i = x - min_size_;
  return i == 0 ? counts_le_[0] : counts_le_[i] - counts_le_[i - 1];
}

Bytes WasteEvaluator::bytes_le(Bytes x) const noexcept {
  if (bytes_le_.empty() || x < min_size_) return 0;
  if (x >= max_size_) return bytes_le_.back();
  return bytes_le_[x - min_size_];
}

std::int64_t WasteEvaluator::class_waste(Bytes lower, Bytes chunk) const noexcept {
  const auto n = count_le(chunk) - count_le(lower);
  const auto b = bytes_le(chunk) - bytes_le(lower);
  return static_cast<std::int64_t>(chunk * n) - static_cast<std::int64_t>(b);
}

Bytes WasteEvaluator::total(std::span<const Bytes> chunks) const noexcept {
  std::int64_t sum = 0;
  Bytes lower = 0;
  for (auto c : chunks) {
    sum += class_waste(lower, c);
    lower = c;
  }
  return static_cast<Bytes>(sum);
}

}  // namespace slabtune
