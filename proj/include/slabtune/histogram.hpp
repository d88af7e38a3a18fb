#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace slabtune {

using Bytes = std::uint64_t;
using Count = std::uint64_t;

/// Item-size frequency distribution: how many items of each total size
/// (key + value + item header) were observed or generated.
///
/// Entries are kept sorted by size, and every stored count is at least 1.
/// Values are immutable once built.
class SizeHistogram {
 public:
  struct Entry {
    Bytes size;
    Count count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SizeHistogram() = default;

  /// Zero-count entries are dropped. Throws ValidationError on size 0.
  explicit SizeHistogram(const std::map<Bytes, Count>& counts);

  std::span<const Entry> entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t distinct_sizes() const noexcept { return entries_.size(); }
  Count total_items() const noexcept { return total_items_; }
  /// Undefined on an empty histogram.
  Bytes min_size() const noexcept { return entries_.front().size; }
  Bytes max_size() const noexcept { return entries_.back().size; }
  /// Sum of size * count over all entries.
  Bytes total_bytes() const noexcept { return total_bytes_; }

  /// Returns 0 when `size` was never observed.
  Count count_of(Bytes size) const noexcept;

  friend bool operator==(const SizeHistogram&, const SizeHistogram&) = default;

 private:
  std::vector<Entry> entries_;
  Count total_items_ = 0;
  Bytes total_bytes_ = 0;
};

// How WorkloadSpec::mean / sd are read.
enum class LogNormalParams {
  // Arithmetic mean and standard deviation of the item sizes in bytes.
  kArithmetic,
  // Mean and standard deviation of the underlying normal (log space).
  kLogSpace,
};

struct WorkloadSpec {
  double mean = 0.0;
  double sd = 0.0;
  Count item_count = 0;
  std::uint64_t seed = 0;
  Bytes overhead = 0;
  LogNormalParams params = LogNormalParams::kArithmetic;
};

/// One item size per non-empty line; `overhead` is added to every size.
SizeHistogram histogram_from_trace(std::span<const std::string> lines,
                                   Bytes overhead = 0);
SizeHistogram histogram_from_trace(std::istream& in, Bytes overhead = 0);

/// Duplicate sizes are merged and zero counts dropped.
SizeHistogram histogram_from_rows(std::span<const std::pair<Bytes, Count>> rows);

/// Parses `size,count` rows. A leading `size,count` header is optional.
SizeHistogram histogram_from_csv(std::istream& in);

/// Writes the `size,count` header followed by ascending rows.
std::string to_csv(const SizeHistogram& hist);

/// Draws spec.item_count log-normal sizes. Deterministic in `spec`.
SizeHistogram generate_lognormal(const WorkloadSpec& spec);

}  // namespace slabtune
