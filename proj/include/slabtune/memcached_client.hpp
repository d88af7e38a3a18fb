#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slabtune/histogram.hpp"

namespace slabtune {

// Result of a `stats sizes` request. Buckets are 32-byte rounded by the
// server; the bucket value stands in for the item size.
struct StatsSizesSample {
  struct Bucket {
    Bytes size;
    Count count;
    friend bool operator==(const Bucket&, const Bucket&) = default;
  };

  std::vector<Bucket> buckets;
  std::chrono::system_clock::time_point captured_at;
  std::string server;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 11211;
};

// "host:port" or "host" (default port). IPv6 literals go in brackets.
Endpoint parse_endpoint(std::string_view text);

// Parses a complete `stats sizes` reply. The reply must end with END;
// ERROR, SERVER_ERROR, CLIENT_ERROR, truncated, or malformed replies throw
// ProtocolError carrying the raw payload. `STAT sizes_status ...` lines
// (servers with size tracking disabled) are skipped.
std::vector<StatsSizesSample::Bucket> parse_stats_sizes(std::string_view payload);

// True once `payload` holds a terminal reply line (END or an error).
bool stats_reply_complete(std::string_view payload);

// Sends `stats sizes` over one TCP connection. The whole exchange, connect
// included, is bounded by `timeout`.
StatsSizesSample fetch_stats_sizes(const Endpoint& endpoint,
                                   std::chrono::milliseconds timeout);

SizeHistogram sample_to_histogram(const StatsSizesSample& sample);

}  // namespace slabtune
