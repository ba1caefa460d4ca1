// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_RCON_HPP
#define VOXCRAFT_RCON_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/build_plan.hpp"

namespace voxcraft::rcon {

inline constexpr std::int32_t kTypeResponse = 0;
inline constexpr std::int32_t kTypeExec = 2;
inline constexpr std::int32_t kTypeAuth = 3;
inline constexpr std::int32_t kTypeAuthResponse = 2;

inline constexpr std::size_t kMaxBody = 1446;
// Servers split long replies into bodies of at most this size.
inline constexpr std::size_t kMaxResponseBody = 4096;
inline constexpr std::uint16_t kDefaultPort = 25575;

struct Packet {
  std::int32_t request_id = 0;
  std::int32_t type = 0;
  std::string body;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// little-endian i32 length | i32 id | i32 type | body | 00 00
// Throws BodyTooLarge, or FormatError for a NUL inside the body.
std::vector<std::uint8_t> encode_packet(const Packet& p);

// Exactly one complete packet. Throws Truncated, NegativeLength,
// BadTerminator, or BodyTooLarge for trailing bytes past the length field.
Packet decode_packet(std::span<const std::uint8_t> bytes);

// Streaming variant: the first packet in `bytes` and its encoded size, or
// nullopt if more bytes are needed.
std::optional<std::pair<Packet, std::size_t>> try_decode_packet(
    std::span<const std::uint8_t> bytes);

// Responses the vanilla server sends for commands that did nothing.
bool is_failure_response(std::string_view body) noexcept;

struct SessionOptions {
  std::chrono::milliseconds timeout{5000};
};

// One authenticated TCP connection. Move-only and not thread-safe.
class Session {
 public:
  // Throws ConnectionError, Timeout, AuthFailed or IdMismatch.
  static Session connect_and_auth(const std::string& host, std::uint16_t port,
                                  const std::string& password, SessionOptions options = {});

  Session(Session&& other) noexcept;
  Session& operator=(Session&& other) noexcept;
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session();

  // Sends `command` under a fresh id followed by an empty sentinel packet and
  // joins every response body carrying the command's id until the sentinel
  // comes back. Throws BodyTooLarge, Timeout, IdMismatch or ConnectionLost.
  std::string exec(std::string_view command);

  bool connected() const noexcept { return fd_ >= 0; }
  std::int32_t last_request_id() const noexcept { return next_id_ - 1; }
  void close() noexcept;

 private:
  Session(int fd, SessionOptions options) : fd_(fd), options_(options) {}

  void send_packet(const Packet& p);
  Packet read_packet(std::chrono::steady_clock::time_point deadline);

  int fd_ = -1;
  SessionOptions options_;
  std::int32_t next_id_ = 1;
  std::vector<std::uint8_t> inbox_;
};

struct CommandResult {
  std::string command;
  bool ok = false;
  int attempts = 0;
  std::string response;
  std::string error;
};

struct DispatchProgress {
  std::size_t sent = 0;
  std::size_t total = 0;
  std::size_t failed = 0;
};

struct DispatchOptions {
  // Commands per second; every attempt, retries included, is paced.
  double throttle = 20.0;
  int max_retries = 3;
  int abort_after_failures = 10;
  std::function<void(const DispatchProgress&)> on_progress;
  std::stop_token stop;
};

struct DispatchReport {
  // One entry per command that was attempted, in plan order.
  std::vector<CommandResult> results;
  std::size_t total = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  bool aborted = false;
  bool cancelled = false;
  std::chrono::duration<double> duration{0};
};

// Throws InvalidParameter for a non-positive throttle and BodyTooLarge before
// anything is sent if any command exceeds the body limit.
DispatchReport dispatch_commands(Session& session, std::span<const std::string> commands,
                                 const DispatchOptions& options = {});

// Renders the plan in the vanilla dialect and dispatches it in order.
DispatchReport apply_plan(Session& session, const BuildPlan& plan,
                          const DispatchOptions& options = {});

}  // namespace voxcraft::rcon

#endif  // VOXCRAFT_RCON_HPP
