#include "slabtune/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <random>
#include <sstream>

#include "slabtune/error.hpp"

namespace slabtune {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

// Parses an unsigned decimal field. Negative numbers are reported as a
// validation error rather than a parse error.
std::uint64_t parse_uint(std::string_view field, std::size_t line,
                         const char* what) {
  field = trim(field);
  if (field.empty()) throw ParseError(std::string("empty ") + what, line);
  if (field.front() == '-') {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec == std::errc() && p == field.data() + field.size())
      throw ValidationError("line " + std::to_string(line) + ": negative " +
                            what + " " + std::string(field));
    throw ParseError(std::string("malformed ") + what + " '" +
                         std::string(field) + "'",
                     line);
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ParseError(std::string("malformed ") + what + " '" +
                         std::string(field) + "'",
                     line);
  return v;
}

}  // namespace

SizeHistogram::SizeHistogram(const std::map<Bytes, Count>& counts) {
  entries_.reserve(counts.size());
  for (const auto& [size, count] : counts) {
    if (count == 0) continue;
    if (size == 0) throw ValidationError("item size must be at least 1 byte");
    entries_.push_back({size, count});
    total_items_ += count;
    total_bytes_ += size * count;
  }
}

Count SizeHistogram::count_of(Bytes size) const noexcept {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), size,
      [](const Entry& e, Bytes s) { return e.size < s; });
  return it != entries_.end() && it->size == size ? it->count : 0;
}

SizeHistogram histogram_from_trace(std::span<const std::string> lines,
                                   Bytes overhead) {
  std::map<Bytes, Count> counts;
  std::size_t lineno = 0;
  for (const auto& raw : lines) {
    ++lineno;
    auto text = trim(raw);
    if (text.empty()) continue;
    const auto size = parse_uint(text, lineno, "size");
    if (size == 0)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": item size must be at least 1 byte");
    ++counts[size + overhead];
  }
  return SizeHistogram(counts);
}

SizeHistogram histogram_from_trace(std::istream& in, Bytes overhead) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return histogram_from_trace(lines, overhead);
}

SizeHistogram histogram_from_rows(
    std::span<const std::pair<Bytes, Count>> rows) {
  std::map<Bytes, Count> counts;
  for (const auto& [size, count] : rows) {
    if (size == 0) throw ValidationError("item size must be at least 1 byte");
    if (count != 0) counts[size] += count;
  }
  return SizeHistogram(counts);
}

SizeHistogram histogram_from_csv(std::istream& in) {
  std::vector<std::pair<Bytes, Count>> rows;
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (lineno == 1 && line == "size,count") continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos)
      throw ParseError("expected 'size,count'", lineno);
    const auto size = parse_uint(line.substr(0, comma), lineno, "size");
    const auto count = parse_uint(line.substr(comma + 1), lineno, "count");
    if (size == 0)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": item size must be at least 1 byte");
    rows.emplace_back(size, count);
  }
  return histogram_from_rows(rows);
}

std::string to_csv(const SizeHistogram& hist) {
  std::ostringstream out;
  out << "size,count\n";
  for (const auto& e : hist.entries()) out << e.size << ',' << e.count << '\n';
  return out.str();
}

SizeHistogram generate_lognormal(const WorkloadSpec& spec) {
  if (!(spec.mean > 0.0) || !std::isfinite(spec.mean))
    throw ValidationError("workload mean must be positive");
  if (!(spec.sd >= 0.0) || !std::isfinite(spec.sd))
    throw ValidationError("workload sd must be non-negative");
  if (spec.item_count == 0)
    throw ValidationError("workload item count must be at least 1");

  double mu = spec.mean;
  double sigma = spec.sd;
  if (spec.params == LogNormalParams::kArithmetic) {
    const double m2 = spec.mean * spec.mean;
    const double v = spec.sd * spec.sd;
    mu = std::log(m2 / std::sqrt(m2 + v));
    sigma = std::sqrt(std::log1p(v / m2));
  }

  // Anything past 2^53 cannot be represented exactly and is far beyond a page.
  constexpr double kMaxSample = 9007199254740992.0;
  auto to_size = [&](double x) -> Bytes {
    if (!std::isfinite(x) || x >= kMaxSample)
      throw ValidationError("log-normal sample overflows; check the workload "
                            "parameters");
    return std::max<Bytes>(1, static_cast<Bytes>(std::llround(x))) +
           spec.overhead;
  };

  std::map<Bytes, Count> counts;
  if (sigma == 0.0) {
    counts[to_size(std::exp(mu))] = spec.item_count;
    return SizeHistogram(counts);
  }

  std::mt19937_64 rng(spec.seed);
  std::lognormal_distribution<double> dist(mu, sigma);
  // Accumulate densely first; sizes cluster tightly around the mean.
  std::vector<Bytes> draws(spec.item_count);
  for (auto& d : draws) d = to_size(dist(rng));
  std::sort(draws.begin(), draws.end());
  for (std::size_t i = 0; i < draws.size();) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    counts.emplace_hint(counts.end(), draws[i], j - i);
    i = j;
  }
  return SizeHistogram(counts);
}

}  // namespace slabtune
