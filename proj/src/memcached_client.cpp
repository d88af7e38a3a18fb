#include "slabtune/memcached_client.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <map>
#include <memory>
#include <utility>

#include "slabtune/error.hpp"

namespace slabtune {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view kCrlf = "\r\n";

bool parse_u64(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && p == text.data() + text.size();
}

bool is_error_line(std::string_view line) {
  return line == "ERROR" || line.starts_with("SERVER_ERROR") ||
         line.starts_with("CLIENT_ERROR");
}

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket& operator=(Socket&&) = delete;
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

// Waits for `events` on fd; throws TransportError on timeout.
void wait_for(int fd, short events, Clock::time_point deadline,
              const std::string& server, const char* phase) {
  while (true) {
    pollfd pfd{fd, events, 0};
    const int ms = remaining_ms(deadline);
    if (ms == 0) throw TransportError(server + ": timed out while " + phase);
    const int rc = ::poll(&pfd, 1, ms);
    if (rc > 0) return;
    if (rc == 0) throw TransportError(server + ": timed out while " + phase);
    if (errno != EINTR)
      throw TransportError(server + ": poll failed: " + std::strerror(errno));
  }
}

Socket connect_any(const Endpoint& ep, Clock::time_point deadline,
                   const std::string& server) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const auto port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &found); rc != 0)
    throw TransportError(server + ": cannot resolve host: " + ::gai_strerror(rc));
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> list(found, ::freeaddrinfo);

  std::string last_error = "no addresses";
  for (auto* ai = list.get(); ai; ai = ai->ai_next) {
    Socket sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC,
                         ai->ai_protocol));
    if (sock.get() < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    if (::connect(sock.get(), ai->ai_addr, ai->ai_addrlen) != 0) {
      if (errno != EINPROGRESS) {
        last_error = std::strerror(errno);
        continue;
      }
      wait_for(sock.get(), POLLOUT, deadline, server, "connecting");
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(sock.get(), SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) {
        last_error = std::strerror(err);
        continue;
      }
    }
    return sock;
  }
  throw TransportError(server + ": connect failed: " + last_error);
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  std::string_view host = text;
  std::string_view port;
  if (text.starts_with('[')) {
    const auto close = text.find(']');
    if (close == std::string_view::npos)
      throw ValidationError("bad endpoint '" + std::string(text) + "'");
    host = text.substr(1, close - 1);
    auto rest = text.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':')
        throw ValidationError("bad endpoint '" + std::string(text) + "'");
      port = rest.substr(1);
    }
  } else if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  if (host.empty())
    throw ValidationError("endpoint '" + std::string(text) + "' has no host");
  ep.host = std::string(host);
  if (!port.empty()) {
    std::uint64_t p = 0;
    if (!parse_u64(port, p) || p == 0 || p > 65535)
      throw ValidationError("bad port in endpoint '" + std::string(text) + "'");
    ep.port = static_cast<std::uint16_t>(p);
  }
  return ep;
}

bool stats_reply_complete(std::string_view payload) {
  if (!payload.ends_with(kCrlf)) return false;
  auto body = payload.substr(0, payload.size() - kCrlf.size());
  const auto prev = body.rfind(kCrlf);
  const auto line =
      prev == std::string_view::npos ? body : body.substr(prev + kCrlf.size());
  return line == "END" || is_error_line(line);
}

std::vector<StatsSizesSample::Bucket> parse_stats_sizes(std::string_view payload) {
  const std::string raw(payload);
  std::vector<StatsSizesSample::Bucket> buckets;
  std::string_view rest = payload;
  while (!rest.empty()) {
    const auto eol = rest.find(kCrlf);
    if (eol == std::string_view::npos)
      throw ProtocolError("truncated stats sizes reply", raw);
    const auto line = rest.substr(0, eol);
    rest.remove_prefix(eol + kCrlf.size());

    if (line == "END") {
      if (!rest.empty())
        throw ProtocolError("unexpected data after END", raw);
      return buckets;
    }
    if (is_error_line(line))
      throw ProtocolError("server rejected stats sizes: " + std::string(line), raw);
    if (!line.starts_with("STAT "))
      throw ProtocolError("malformed stats line '" + std::string(line) + "'", raw);

    const auto fields = line.substr(5);
    const auto space = fields.find(' ');
    if (space == std::string_view::npos)
      throw ProtocolError("malformed stats line '" + std::string(line) + "'", raw);
    const auto key = fields.substr(0, space);
    const auto value = fields.substr(space + 1);
    if (key == "sizes_status") continue;

    StatsSizesSample::Bucket b{};
    if (!parse_u64(key, b.size) || !parse_u64(value, b.count))
      throw ProtocolError("malformed stats line '" + std::string(line) + "'", raw);
    if (!buckets.empty() && b.size <= buckets.back().size)
      throw ProtocolError("bucket sizes not increasing at " + std::to_string(b.size),
                          raw);
    buckets.push_back(b);
  }
  throw ProtocolError("stats sizes reply missing END", raw);
}

StatsSizesSample fetch_stats_sizes(const Endpoint& endpoint,
                                   std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  const std::string server = endpoint.host + ":" + std::to_string(endpoint.port);
  Socket sock(connect_any(endpoint, deadline, server));

  constexpr std::string_view request = "stats sizes\r\n";
  std::size_t sent = 0;
  while (sent < request.size()) {
    wait_for(sock.get(), POLLOUT, deadline, server, "sending");
    const auto n = ::send(sock.get(), request.data() + sent, request.size() - sent,
                          MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw TransportError(server + ": send failed: " + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  std::string reply;
  char buf[4096];
  while (!stats_reply_complete(reply)) {
    wait_for(sock.get(), POLLIN, deadline, server, "reading");
    const auto n = ::recv(sock.get(), buf, sizeof(buf), 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      throw TransportError(server + ": receive failed: " + std::strerror(errno));
    }
    if (n == 0) break;
    reply.append(buf, static_cast<std::size_t>(n));
  }

  StatsSizesSample sample;
  sample.buckets = parse_stats_sizes(reply);
  sample.captured_at = std::chrono::system_clock::now();
  sample.server = server;
  return sample;
}

SizeHistogram sample_to_histogram(const StatsSizesSample& sample) {
  std::map<Bytes, Count> counts;
  for (const auto& b : sample.buckets)
    if (b.count != 0 && b.size != 0) counts[b.size] += b.count;
  return SizeHistogram(counts);
}

}  // namespace slabtune
