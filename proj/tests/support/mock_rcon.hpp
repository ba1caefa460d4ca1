// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_TESTS_MOCK_RCON_HPP
#define VOXCRAFT_TESTS_MOCK_RCON_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace voxcraft::testing {

// In-process RCON server speaking the real wire codec. Serves one client at
// a time and records every exec body it receives.
class MockRconServer {
 public:
  struct Options {
    std::string password = "hunter2";
    // Reply to auth with id -1 regardless of the password.
    bool reject_auth = false;
    // Precede the auth response with an empty type-0 packet.
    bool empty_packet_before_auth = false;
    // Reply body for the n-th exec (0-based, retries included).
    std::function<std::string(std::size_t, const std::string&)> respond;
    // Split reply bodies into packets of at most this many bytes (0: one packet).
    std::size_t chunk = 0;
    std::chrono::milliseconds reply_delay{0};
    // Close the connection instead of answering the n-th exec.
    std::size_t drop_at = static_cast<std::size_t>(-1);
  };

  MockRconServer();
  explicit MockRconServer(Options options);
  MockRconServer(const MockRconServer&) = delete;
  MockRconServer& operator=(const MockRconServer&) = delete;
  ~MockRconServer();

  std::uint16_t port() const noexcept { return port_; }
  std::vector<std::string> transcript() const;
  std::vector<std::int32_t> exec_ids() const;
  std::size_t auth_attempts() const;

 private:
  void serve();
  void handle(int fd);

  Options options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  mutable std::mutex mu_;
  std::vector<std::string> transcript_;
  std::vector<std::int32_t> exec_ids_;
  std::size_t auth_attempts_ = 0;
  std::thread thread_;
};

// A port with nothing listening on it.
std::uint16_t closed_port();

}  // namespace voxcraft::testing

#endif  // VOXCRAFT_TESTS_MOCK_RCON_HPP
