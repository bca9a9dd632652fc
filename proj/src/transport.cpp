#include "memrig/transport.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "memrig/error.hpp"

namespace memrig::transport {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

sockaddr_in to_sockaddr(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    const std::string host = ep.host == "localhost" ? "127.0.0.1" : ep.host;
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw ParameterError("not an IPv4 address: " + ep.host);
    }
    return addr;
}

} // namespace

Fd& Fd::operator=(Fd&& other) noexcept {
    if (this != &other) {
        reset();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Fd::~Fd() { reset(); }

void Fd::reset() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Endpoint parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw ParameterError("endpoint must look like host:port, got '" + text + "'");
    }
    Endpoint ep;
    ep.host = text.substr(0, colon);
    const std::string port = text.substr(colon + 1);
    char* end = nullptr;
    const long value = std::strtol(port.c_str(), &end, 10);
    if (*end != '\0' || value < 0 || value > 65535) {
        throw ParameterError("bad port in endpoint '" + text + "'");
    }
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

Fd connect_tcp(const Endpoint& endpoint) {
    const sockaddr_in addr = to_sockaddr(endpoint);
    Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd.valid()) {
        fail("socket");
    }
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        fail("connect to " + endpoint.host + ":" + std::to_string(endpoint.port));
    }
    int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

Fd listen_tcp(const Endpoint& endpoint, int backlog) {
    const sockaddr_in addr = to_sockaddr(endpoint);
    Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd.valid()) {
        fail("socket");
    }
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        fail("bind " + endpoint.host + ":" + std::to_string(endpoint.port));
    }
    if (::listen(fd.get(), backlog) != 0) {
        fail("listen");
    }
    return fd;
}

std::uint16_t local_port(int fd) {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        fail("getsockname");
    }
    return ntohs(addr.sin_port);
}

std::pair<Fd, Fd> socket_pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        fail("socketpair");
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

void write_all(int fd, std::span<const std::uint8_t> data) {
    bool sock = true;
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = sock ? ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL)
                               : ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (sock && errno == ENOTSOCK) {
                sock = false;
                continue;
            }
            fail("write");
        }
        done += static_cast<std::size_t>(n);
    }
}

std::optional<std::vector<std::uint8_t>> read_some(int fd, int timeout_ms) {
    pollfd p{fd, POLLIN, 0};
    for (;;) {
        const int ready = ::poll(&p, 1, timeout_ms);
        if (ready < 0) {
            if (errno == EINTR) {
                return std::nullopt;
            }
            fail("poll");
        }
        if (ready == 0) {
            return std::nullopt;
        }
        std::vector<std::uint8_t> buf(4096);
        const ssize_t n = ::read(fd, buf.data(), buf.size());
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) {
                continue;
            }
            if (errno == ECONNRESET) {
                return std::vector<std::uint8_t>{};
            }
            fail("read");
        }
        buf.resize(static_cast<std::size_t>(n));
        return buf;
    }
}

} // namespace memrig::transport
