#include <algorithm>
#include <limits>

#include "slabtune/error.hpp"
#include "slabtune/optimizer.hpp"

namespace slabtune {

namespace {

constexpr Bytes kInfinity = std::numeric_limits<Bytes>::max();

// Suffix formulation: best[l][i] is the least waste of covering distinct
// sizes i..m-1 with l classes, the first of which starts at i. Solving from
// the back lets reconstruction walk forward and take the smallest feasible
// first chunk at every step, which yields the lexicographically smallest
// optimal list.
template <bool Parallel>
OracleResult solve(const SizeHistogram& hist, std::size_t k) {
  const std::size_t m = hist.distinct_sizes();
  if (k < 1 || k > m)
    throw ValidationError("class count " + std::to_string(k) +
                          " must be between 1 and the " + std::to_string(m) +
                          " distinct sizes");

  const auto entries = hist.entries();
  std::vector<Bytes> size(m);
  std::vector<Count> count_prefix(m + 1, 0);
  std::vector<Bytes> bytes_prefix(m + 1, 0);
  for (std::size_t t = 0; t < m; ++t) {
    size[t] = entries[t].size;
    count_prefix[t + 1] = count_prefix[t] + entries[t].count;
    bytes_prefix[t + 1] = bytes_prefix[t] + entries[t].size * entries[t].count;
  }
  // Waste of one class with chunk size[j] holding sizes i..j.
  auto group = [&](std::size_t i, std::size_t j) -> Bytes {
    return size[j] * (count_prefix[j + 1] - count_prefix[i]) -
           (bytes_prefix[j + 1] - bytes_prefix[i]);
  };

  std::vector<Bytes> prev(m, kInfinity), cur(m, kInfinity);
  std::vector<std::vector<std::size_t>> split(k + 1);
  for (std::size_t i = 0; i < m; ++i) prev[i] = group(i, m - 1);

  for (std::size_t l = 2; l <= k; ++l) {
    split[l].assign(m, m);
    std::fill(cur.begin(), cur.end(), kInfinity);
    const auto last_start = static_cast<std::int64_t>(m - l);
    auto relax = [&](std::int64_t is) {
      const auto i = static_cast<std::size_t>(is);
      Bytes best = kInfinity;
      std::size_t arg = m;
      for (std::size_t j = i; j + l <= m; ++j) {
        const Bytes c = group(i, j) + prev[j + 1];
        if (c < best) {
          best = c;
          arg = j;
        }
      }
      cur[i] = best;
      split[l][i] = arg;
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i <= last_start; ++i) relax(i);
    } else {
      for (std::int64_t i = 0; i <= last_start; ++i) relax(i);
    }
    std::swap(prev, cur);
  }

  std::vector<Bytes> chunks;
  chunks.reserve(k);
  std::size_t i = 0;
  for (std::size_t l = k; l >= 2; --l) {
    const auto j = split[l][i];
    chunks.push_back(size[j]);
    i = j + 1;
  }
  chunks.push_back(size[m - 1]);

  const SlabBounds bounds{std::max(kDefaultPageSize, size.back()),
                          std::min(kDefaultMinChunk, size.front()), 1};
  return OracleResult{SlabConfig(std::move(chunks), bounds), prev[0]};
}

}  // namespace

OracleResult dp_optimal(const SizeHistogram& hist, std::size_t k) {
  return solve<true>(hist, k);
}

OracleResult dp_optimal_serial(const SizeHistogram& hist, std::size_t k) {
  return solve<false>(hist, k);
}

}  // namespace slabtune
