#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slabtune/histogram.hpp"

namespace slabtune {

inline constexpr Bytes kDefaultPageSize = 1024 * 1024;
inline constexpr Bytes kDefaultMinChunk = 96;
inline constexpr Bytes kDefaultAlign = 8;
inline constexpr double kDefaultGrowth = 1.25;

struct SlabBounds {
  Bytes page_size = kDefaultPageSize;
  Bytes min_chunk = kDefaultMinChunk;
  Bytes align = kDefaultAlign;
  friend bool operator==(const SlabBounds&, const SlabBounds&) = default;
};

/// A set of slab classes, identified by their chunk sizes.
///
/// Invariants (checked on construction): non-empty, strictly increasing,
/// min_chunk <= first, last <= page_size.
class SlabConfig {
 public:
  explicit SlabConfig(std::vector<Bytes> chunk_sizes, SlabBounds bounds = {});

  /// True when `chunk_sizes` would satisfy the constructor's invariants.
  static bool valid(std::span<const Bytes> chunk_sizes,
                    const SlabBounds& bounds) noexcept;

  std::span<const Bytes> chunk_sizes() const noexcept { return chunk_sizes_; }
  std::size_t size() const noexcept { return chunk_sizes_.size(); }
  Bytes largest() const noexcept { return chunk_sizes_.back(); }
  const SlabBounds& bounds() const noexcept { return bounds_; }

  friend bool operator==(const SlabConfig&, const SlabConfig&) = default;

 private:
  std::vector<Bytes> chunk_sizes_;
  SlabBounds bounds_;
};

struct ClassWaste {
  Bytes chunk_size;
  Count item_count;
  Bytes wasted_bytes;
  friend bool operator==(const ClassWaste&, const ClassWaste&) = default;
};

struct WasteReport {
  Bytes wasted_bytes = 0;
  Bytes used_bytes = 0;
  Bytes allocated_bytes = 0;
  // One row per class of the evaluated configuration, in class order.
  std::vector<ClassWaste> per_class;
  // used / allocated; 1 for an empty histogram.
  double efficiency = 1.0;
};

/// Memcached's default geometry: start at align_up(min_chunk), multiply by
/// `growth` and round up to `align` until the next size would pass page_size.
SlabConfig default_classes(Bytes min_chunk = kDefaultMinChunk,
                           double growth = kDefaultGrowth,
                           Bytes page_size = kDefaultPageSize,
                           Bytes align = kDefaultAlign);

/// Smallest chunk size >= size. Throws OversizeError past the largest chunk.
Bytes class_for(const SlabConfig& config, Bytes size);

/// Internal fragmentation of storing every histogram item in its class.
/// Reference implementation: one pass over the histogram.
WasteReport waste(const SlabConfig& config, const SizeHistogram& hist);

/// Just the wasted byte total; throws OversizeError like waste().
Bytes wasted_bytes(const SlabConfig& config, const SizeHistogram& hist);

/// Keeps only the classes at least one histogram size maps to.
SlabConfig restrict_to_occupied(const SlabConfig& config,
                                const SizeHistogram& hist);

/// Memcached `-o slab_sizes=` payload: "slab_sizes=96-120-152".
std::string format_slab_sizes(const SlabConfig& config);
/// Hyphen-joined sizes without the option name.
std::string join_chunk_sizes(std::span<const Bytes> sizes,
                             std::string_view sep = "-");

/// Accepts either "96-120-152" or "slab_sizes=96-120-152".
SlabConfig parse_slab_sizes(std::string_view text, SlabBounds bounds = {});

/// Rounds every chunk up to a multiple of `align` and drops duplicates.
/// Throws ValidationError if rounding would exceed page_size.
SlabConfig align_up_config(const SlabConfig& config, Bytes align);

}  // namespace slabtune
