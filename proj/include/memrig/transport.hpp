#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace memrig::transport {

/// Owning file descriptor.
class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd& operator=(Fd&& other) noexcept;
    ~Fd();

    int get() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void reset();

private:
    int fd_ = -1;
};

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Parses "host:port"; throws ParameterError.
Endpoint parse_endpoint(const std::string& text);

Fd connect_tcp(const Endpoint& endpoint);
Fd listen_tcp(const Endpoint& endpoint, int backlog = 1);
std::uint16_t local_port(int fd);

/// Connected pair for in-process client/server wiring.
std::pair<Fd, Fd> socket_pair();

/// Writes everything or throws TransportError.
void write_all(int fd, std::span<const std::uint8_t> data);

/// Waits up to timeout_ms for input. nullopt: timeout. Empty vector: end of stream.
std::optional<std::vector<std::uint8_t>> read_some(int fd, int timeout_ms);

} // namespace memrig::transport
