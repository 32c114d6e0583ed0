#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "radarkit/instrument.hpp"

// CRLF-framed SCPI-over-TCP front for the instrument emulator. One client
// session at a time; newcomers are refused with a busy message while a
// session is active. A new session starts from reset state.

namespace radarkit::server {

inline constexpr std::uint16_t kDefaultPort = 5025;
inline constexpr std::size_t kMaxLineBytes = 4 * 1024 * 1024;

class TcpServer {
  public:
    /// Binds and listens immediately; throws std::runtime_error on
    /// failure. Port 0 selects an ephemeral port, reported by port().
    TcpServer(Instrument& instrument, std::uint16_t port);
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const { return port_; }

    /// Serves until stop() is called. Blocking; run from a dedicated
    /// thread when embedding.
    void run();

    /// Thread-safe shutdown request; run() returns promptly.
    void stop();

  private:
    void serve_client(int client_fd);

    Instrument& instrument_;
    int listen_fd_ = -1;
    int wake_pipe_[2] = {-1, -1};
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
};

}  // namespace radarkit::server
