#include "radarkit/tcp_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace radarkit::server {

namespace {

bool send_all(int fd, std::string_view data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

std::string framed(std::string_view payload) {
    return std::string(payload) + std::string(scpi::kTerminator);
}

}  // namespace

TcpServer::TcpServer(Instrument& instrument, std::uint16_t port) : instrument_(instrument) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(listen_fd_);
        throw std::runtime_error("cannot bind port " + std::to_string(port) + ": " +
                                 std::strerror(errno));
    }
    if (::listen(listen_fd_, 4) < 0) {
        ::close(listen_fd_);
        throw std::runtime_error("listen() failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    if (::pipe(wake_pipe_) < 0) {
        ::close(listen_fd_);
        throw std::runtime_error("pipe() failed");
    }
}

TcpServer::~TcpServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
    for (int fd : wake_pipe_) {
        if (fd >= 0) ::close(fd);
    }
}

void TcpServer::stop() {
    stopping_.store(true);
    const char byte = 'x';
    [[maybe_unused]] ssize_t n = ::write(wake_pipe_[1], &byte, 1);
}

void TcpServer::run() {
    while (!stopping_.load()) {
        pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
        const int rc = ::poll(fds, 2, -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (fds[1].revents & POLLIN) break;
        if (!(fds[0].revents & POLLIN)) continue;

        const int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) continue;
        instrument_.reset_session();
        serve_client(client);
        ::close(client);
    }
}

void TcpServer::serve_client(int client_fd) {
    std::string buffer;
    bool discarding = false;  // oversized line: swallow until terminator
    char chunk[65536];

    while (!stopping_.load()) {
        pollfd fds[3] = {{client_fd, POLLIN, 0},
                         {wake_pipe_[0], POLLIN, 0},
                         {listen_fd_, POLLIN, 0}};
        const int rc = ::poll(fds, 3, -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            return;
        }
        if (fds[1].revents & POLLIN) return;
        if (fds[2].revents & POLLIN) {
            // Refuse a second client while this session is active.
            const int other = ::accept(listen_fd_, nullptr, nullptr);
            if (other >= 0) {
                send_all(other, framed("ERR:" + std::to_string(kErrBusy) +
                                       ",busy: another session is active"));
                ::close(other);
            }
        }
        if (!(fds[0].revents & (POLLIN | POLLHUP | POLLERR))) continue;

        const ssize_t n = ::recv(client_fd, chunk, sizeof(chunk), 0);
        if (n <= 0) return;  // client gone

        for (ssize_t i = 0; i < n; ++i) {
            const char c = chunk[i];
            if (c == '\n') {
                if (discarding) {
                    discarding = false;
                    if (!send_all(client_fd, framed("ERR:" + std::to_string(kErrSyntax) +
                                                    ",message exceeds the line limit")))
                        return;
                } else {
                    if (!buffer.empty() && buffer.back() == '\r') buffer.pop_back();
                    if (!buffer.empty()) {
                        const Response resp = instrument_.handle_line(buffer);
                        if (!send_all(client_fd, framed(resp.payload))) return;
                    }
                }
                buffer.clear();
            } else if (!discarding) {
                buffer.push_back(c);
                if (buffer.size() > kMaxLineBytes) {
                    buffer.clear();
                    discarding = true;
                }
            }
        }
    }
}

}  // namespace radarkit::server
