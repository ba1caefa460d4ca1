// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/rcon.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <thread>

#include "voxcraft/error.hpp"

namespace voxcraft::rcon {

namespace {

constexpr std::size_t kHeader = 12;  // length, id, type
constexpr std::int32_t kMinLength = 10;

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(u >> shift));
}

std::int32_t get_i32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t u = 0;
  for (int i = 3; i >= 0; --i) u = (u << 8) | in[at + static_cast<std::size_t>(i)];
  return static_cast<std::int32_t>(u);
}

}  // namespace

std::vector<std::uint8_t> encode_packet(const Packet& p) {
  if (p.body.size() > kMaxBody) {
    fail(ErrorCode::BodyTooLarge, "rcon body of " + std::to_string(p.body.size()) +
                                      " bytes exceeds " + std::to_string(kMaxBody));
  }
  if (p.body.find('\0') != std::string::npos) {
    fail(ErrorCode::FormatError, "rcon body contains a NUL byte");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeader + p.body.size() + 2);
  put_i32(out, static_cast<std::int32_t>(kMinLength + p.body.size()));
  put_i32(out, p.request_id);
  put_i32(out, p.type);
  out.insert(out.end(), p.body.begin(), p.body.end());
  out.push_back(0);
  out.push_back(0);
  return out;
}

std::optional<std::pair<Packet, std::size_t>> try_decode_packet(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) return std::nullopt;
  const auto length = get_i32(bytes, 0);
  if (length < 0) fail(ErrorCode::NegativeLength, "rcon length field " + std::to_string(length));
  if (length < kMinLength) {
    fail(ErrorCode::Truncated, "rcon length field " + std::to_string(length) + " below minimum");
  }
  if (static_cast<std::size_t>(length) - kMinLength > kMaxResponseBody) {
    fail(ErrorCode::BodyTooLarge, "rcon length field " + std::to_string(length));
  }
  const auto total = 4 + static_cast<std::size_t>(length);
  if (bytes.size() < total) return std::nullopt;
  if (bytes[total - 2] != 0 || bytes[total - 1] != 0) {
    fail(ErrorCode::BadTerminator, "rcon packet is not terminated by two NUL bytes");
  }
  Packet p;
  p.request_id = get_i32(bytes, 4);
  p.type = get_i32(bytes, 8);
  const auto body = bytes.subspan(kHeader, total - kHeader - 2);
  if (std::find(body.begin(), body.end(), std::uint8_t{0}) != body.end()) {
    fail(ErrorCode::BadTerminator, "rcon body contains a NUL byte");
  }
  p.body.assign(body.begin(), body.end());
  return std::pair{std::move(p), total};
}

Packet decode_packet(std::span<const std::uint8_t> bytes) {
  auto decoded = try_decode_packet(bytes);
  if (!decoded) {
    fail(ErrorCode::Truncated, "rcon packet truncated at " + std::to_string(bytes.size()) + " bytes");
  }
  if (decoded->second != bytes.size()) {
    fail(ErrorCode::BodyTooLarge, "rcon packet followed by " +
                                      std::to_string(bytes.size() - decoded->second) +
                                      " trailing bytes");
  }
  return std::move(decoded->first);
}

bool is_failure_response(std::string_view body) noexcept {
  static constexpr std::array<std::string_view, 7> kPrefixes = {
      "Unknown or incomplete command", "Incorrect argument",      "That position is not loaded",
      "Cannot place blocks outside",   "Too many blocks",         "Unknown block type",
      "Could not set the block",
  };
  return std::any_of(kPrefixes.begin(), kPrefixes.end(),
                     [&](std::string_view p) { return body.starts_with(p); });
}

// Session ------------------------------------------------------------------

namespace {

int connect_with_timeout(const std::string& host, std::uint16_t port,
                         std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    fail(ErrorCode::ConnectionError, "resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no address";
  int fd = -1;
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 0) {
        ::close(fd);
        ::freeaddrinfo(res);
        fail(ErrorCode::Timeout, "connect to " + host + ":" + service + " timed out");
      }
      int err = 0;
      socklen_t len = sizeof err;
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err == 0 ? 0 : -1;
      errno = err;
    }
    if (rc == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) fail(ErrorCode::ConnectionError, "connect to " + host + ":" + service + ": " + last_error);
  return fd;
}

}  // namespace

Session Session::connect_and_auth(const std::string& host, std::uint16_t port,
                                  const std::string& password, SessionOptions options) {
  Session s(connect_with_timeout(host, port, options.timeout), options);
  const auto id = s.next_id_++;
  s.send_packet({id, kTypeAuth, password});
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  for (;;) {
    auto reply = s.read_packet(deadline);
    // Some servers precede the auth response with an empty response packet.
    if (reply.type == kTypeResponse) continue;
    if (reply.request_id == -1) fail(ErrorCode::AuthFailed, "rcon authentication rejected");
    if (reply.request_id != id) {
      fail(ErrorCode::IdMismatch, "auth response id " + std::to_string(reply.request_id) +
                                      ", expected " + std::to_string(id));
    }
    return s;
  }
}

Session::Session(Session&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      options_(other.options_),
      next_id_(other.next_id_),
      inbox_(std::move(other.inbox_)) {}

Session& Session::operator=(Session&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    options_ = other.options_;
    next_id_ = other.next_id_;
    inbox_ = std::move(other.inbox_);
  }
  return *this;
}

Session::~Session() { close(); }

void Session::close() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  inbox_.clear();
}

void Session::send_packet(const Packet& p) {
  if (fd_ < 0) fail(ErrorCode::ConnectionLost, "rcon session is closed");
  const auto bytes = encode_packet(p);
  std::size_t off = 0;
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (off < bytes.size()) {
    const auto n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n > 0) {
      off += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      pollfd pfd{fd_, POLLOUT, 0};
      if (left.count() <= 0 || ::poll(&pfd, 1, static_cast<int>(left.count())) == 0) {
        fail(ErrorCode::Timeout, "rcon send timed out");
      }
      continue;
    }
    close();
    fail(ErrorCode::ConnectionLost, std::string("rcon send: ") + std::strerror(errno));
  }
}

Packet Session::read_packet(std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (auto decoded = try_decode_packet(inbox_)) {
      inbox_.erase(inbox_.begin(), inbox_.begin() + static_cast<std::ptrdiff_t>(decoded->second));
      return std::move(decoded->first);
    }
    if (fd_ < 0) fail(ErrorCode::ConnectionLost, "rcon session is closed");
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = left.count() > 0 ? ::poll(&pfd, 1, static_cast<int>(left.count())) : 0;
    if (rc == 0) fail(ErrorCode::Timeout, "rcon response timed out");
    if (rc < 0) {
      if (errno == EINTR) continue;
      close();
      fail(ErrorCode::ConnectionLost, std::string("rcon poll: ") + std::strerror(errno));
    }
    std::array<std::uint8_t, 4096> buf{};
    const auto n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n == 0) {
      close();
      fail(ErrorCode::ConnectionLost, "rcon connection closed by peer");
    }
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
      close();
      fail(ErrorCode::ConnectionLost, std::string("rcon recv: ") + std::strerror(errno));
    }
    inbox_.insert(inbox_.end(), buf.begin(), buf.begin() + n);
  }
}

std::string Session::exec(std::string_view command) {
  if (fd_ < 0) fail(ErrorCode::ConnectionLost, "rcon session is closed");
  if (command.size() > kMaxBody) {
    fail(ErrorCode::BodyTooLarge, "command of " + std::to_string(command.size()) + " bytes");
  }
  const auto id = next_id_++;
  const auto sentinel = next_id_++;
  send_packet({id, kTypeExec, std::string(command)});
  send_packet({sentinel, kTypeResponse, {}});
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  std::string response;
  for (;;) {
    auto p = read_packet(deadline);
    if (p.request_id == sentinel) return response;
    if (p.request_id == id) {
      response += p.body;
    } else if (p.request_id > sentinel || p.request_id < 0) {
      fail(ErrorCode::IdMismatch, "rcon response id " + std::to_string(p.request_id) +
                                      ", expected " + std::to_string(id));
    }
    // Lower ids are late replies to an earlier timed-out command.
  }
}

// Dispatch -----------------------------------------------------------------

namespace {

// Sleeps until `when` unless a stop is requested first.
bool sleep_until(std::chrono::steady_clock::time_point when, const std::stop_token& stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  return !cv.wait_until(lock, stop, when, [] { return false; });
}

}  // namespace

DispatchReport dispatch_commands(Session& session, std::span<const std::string> commands,
                                 const DispatchOptions& options) {
  if (!(options.throttle > 0.0)) {
    fail(ErrorCode::InvalidParameter, "throttle must be positive");
  }
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (commands[i].size() > kMaxBody) {
      fail(ErrorCode::BodyTooLarge, "command " + std::to_string(i) + " is " +
                                        std::to_string(commands[i].size()) + " bytes");
    }
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto interval = std::chrono::duration<double>(1.0 / options.throttle);
  std::size_t sends = 0;
  int consecutive_failures = 0;

  DispatchReport report;
  report.total = commands.size();
  DispatchProgress progress{0, commands.size(), 0};

  for (const auto& command : commands) {
    if (options.stop.stop_requested()) {
      report.cancelled = true;
      break;
    }
    CommandResult result;
    result.command = command;
    bool lost = false;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      const auto slot =
          start + std::chrono::duration_cast<clock::duration>(interval * static_cast<double>(sends));
      if (!sleep_until(slot, options.stop)) {
        report.cancelled = true;
        break;
      }
      ++sends;
      ++result.attempts;
      try {
        result.response = session.exec(command);
        if (!is_failure_response(result.response)) {
          result.ok = true;
          result.error.clear();
          break;
        }
        result.error = result.response;
      } catch (const Error& e) {
        result.error = std::string(to_string(e.code())) + ": " + e.what();
        if (e.code() == ErrorCode::ConnectionLost) {
          lost = true;
          break;
        }
      }
    }
    if (report.cancelled && result.attempts == 0) break;

    ++progress.sent;
    if (result.ok) {
      ++report.succeeded;
      consecutive_failures = 0;
    } else {
      ++report.failed;
      ++progress.failed;
      ++consecutive_failures;
    }
    report.results.push_back(std::move(result));
    if (options.on_progress) options.on_progress(progress);
    if (report.cancelled) break;
    if (lost || consecutive_failures >= options.abort_after_failures) {
      report.aborted = true;
      break;
    }
  }
  report.duration = clock::now() - start;
  return report;
}

DispatchReport apply_plan(Session& session, const BuildPlan& plan, const DispatchOptions& options) {
  const auto commands = render_commands(plan, Dialect::Vanilla);
  return dispatch_commands(session, commands, options);
}

}  // namespace voxcraft::rcon
