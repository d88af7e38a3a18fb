#include "slabtune/slab_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "slabtune/error.hpp"

namespace slabtune {

namespace {

Bytes align_up(Bytes value, Bytes align) {
  const auto rem = value % align;
  return rem == 0 ? value : value + (align - rem);
}

}  // namespace

SlabConfig::SlabConfig(std::vector<Bytes> chunk_sizes, SlabBounds bounds)
    : chunk_sizes_(std::move(chunk_sizes)), bounds_(bounds) {
  if (chunk_sizes_.empty())
    throw ValidationError("slab configuration needs at least one class");
  if (std::adjacent_find(chunk_sizes_.begin(), chunk_sizes_.end(),
                         std::greater_equal<>()) != chunk_sizes_.end())
    throw ValidationError("chunk sizes must be strictly increasing: " +
                          join_chunk_sizes(chunk_sizes_));
  if (chunk_sizes_.front() < bounds_.min_chunk)
    throw ValidationError("chunk size " + std::to_string(chunk_sizes_.front()) +
                          " is below the minimum chunk " +
                          std::to_string(bounds_.min_chunk));
  if (chunk_sizes_.back() > bounds_.page_size)
    throw ValidationError("chunk size " + std::to_string(chunk_sizes_.back()) +
                          " exceeds the page size " +
                          std::to_string(bounds_.page_size));
}

bool SlabConfig::valid(std::span<const Bytes> chunk_sizes,
                       const SlabBounds& bounds) noexcept {
  if (chunk_sizes.empty()) return false;
  if (chunk_sizes.front() < bounds.min_chunk) return false;
  if (chunk_sizes.back() > bounds.page_size) return false;
  for (std::size_t i = 1; i < chunk_sizes.size(); ++i)
    if (chunk_sizes[i] <= chunk_sizes[i - 1]) return false;
  return true;
}

SlabConfig default_classes(Bytes min_chunk, double growth, Bytes page_size,
                           Bytes align) {
  if (min_chunk < 1) throw ValidationError("min chunk must be at least 1");
  if (!(growth > 1.0)) throw ValidationError("growth factor must exceed 1");
  if (align < 1) throw ValidationError("alignment must be at least 1");
  if (page_size < min_chunk)
    throw ValidationError("page size must be at least the min chunk");

  std::vector<Bytes> sizes;
  Bytes size = align_up(min_chunk, align);
  if (size > page_size)
    throw ValidationError("aligned min chunk exceeds the page size");
  while (size <= page_size) {
    sizes.push_back(size);
    auto next = align_up(
        static_cast<Bytes>(std::ceil(static_cast<double>(size) * growth)), align);
    if (next <= size) next = size + align;
    size = next;
  }
  return SlabConfig(std::move(sizes), {page_size, min_chunk, align});
}

Bytes class_for(const SlabConfig& config, Bytes size) {
  const auto sizes = config.chunk_sizes();
  auto it = std::lower_bound(sizes.begin(), sizes.end(), size);
  if (it == sizes.end()) throw OversizeError(size, config.largest());
  return *it;
}

WasteReport waste(const SlabConfig& config, const SizeHistogram& hist) {
  const auto sizes = config.chunk_sizes();
  WasteReport report;
  report.per_class.reserve(sizes.size());
  for (auto c : sizes) report.per_class.push_back({c, 0, 0});

  for (const auto& e : hist.entries()) {
    auto it = std::lower_bound(sizes.begin(), sizes.end(), e.size);
    if (it == sizes.end()) throw OversizeError(e.size, config.largest());
    auto& row = report.per_class[static_cast<std::size_t>(it - sizes.begin())];
    const Bytes hole = (*it - e.size) * e.count;
    row.item_count += e.count;
    row.wasted_bytes += hole;
    report.wasted_bytes += hole;
    report.used_bytes += e.size * e.count;
  }
  report.allocated_bytes = report.used_bytes + report.wasted_bytes;
  if (report.allocated_bytes != 0)
    report.efficiency = static_cast<double>(report.used_bytes) /
                        static_cast<double>(report.allocated_bytes);
  return report;
}

Bytes wasted_bytes(const SlabConfig& config, const SizeHistogram& hist) {
  const auto sizes = config.chunk_sizes();
  Bytes total = 0;
  auto it = sizes.begin();
  for (const auto& e : hist.entries()) {
    // Histogram entries are ascending, so the class cursor only moves forward.
    while (it != sizes.end() && *it < e.size) ++it;
    if (it == sizes.end()) throw OversizeError(e.size, config.largest());
    total += (*it - e.size) * e.count;
  }
  return total;
}

SlabConfig restrict_to_occupied(const SlabConfig& config,
                                const SizeHistogram& hist) {
  if (hist.empty())
    throw ValidationError("cannot restrict classes to an empty histogram");
  std::vector<Bytes> occupied;
  for (const auto& e : hist.entries()) {
    const auto c = class_for(config, e.size);
    if (occupied.empty() || occupied.back() != c) occupied.push_back(c);
  }
  return SlabConfig(std::move(occupied), config.bounds());
}

std::string join_chunk_sizes(std::span<const Bytes> sizes,
                             std::string_view sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out << sep;
    out << sizes[i];
  }
  return out.str();
}

std::string format_slab_sizes(const SlabConfig& config) {
  return "slab_sizes=" + join_chunk_sizes(config.chunk_sizes());
}

SlabConfig parse_slab_sizes(std::string_view text, SlabBounds bounds) {
  constexpr std::string_view kPrefix = "slab_sizes=";
  if (text.starts_with(kPrefix)) text.remove_prefix(kPrefix.size());
  std::vector<Bytes> sizes;
  std::size_t field = 0;
  while (true) {
    ++field;
    const auto dash = text.find('-');
    const auto token = text.substr(0, dash);
    Bytes v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || p != token.data() + token.size())
      throw ParseError("malformed chunk size '" + std::string(token) +
                           "' in field " + std::to_string(field),
                       0);
    sizes.push_back(v);
    if (dash == std::string_view::npos) break;
    text.remove_prefix(dash + 1);
  }
  return SlabConfig(std::move(sizes), bounds);
}

SlabConfig align_up_config(const SlabConfig& config, Bytes align) {
  if (align < 1) throw ValidationError("alignment must be at least 1");
  std::vector<Bytes> sizes;
  for (auto c : config.chunk_sizes()) {
    const auto a = align_up(c, align);
    if (sizes.empty() || sizes.back() != a) sizes.push_back(a);
  }
  return SlabConfig(std::move(sizes), config.bounds());
}

}  // namespace slabtune
