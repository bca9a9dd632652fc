#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "memrig/frontend.hpp"
#include "memrig/protocol.hpp"
#include "memrig/transport.hpp"

namespace memrig::firmware {

enum class Phase { Boot, Ready };

struct Stats {
    std::uint64_t requests = 0;
    std::uint64_t errors = 0;
};

/// Control-board logic: setup, then Receive Request -> Process Command -> Send Response.
class Firmware {
public:
    explicit Firmware(frontend::CrossbarFixture fixture);

    /// DAC cleared, every mux to ground, every TIA to its highest feedback resistor.
    void setup();

    /// Executes one request. Requires phase() == Ready.
    wire::Message handle_request(const wire::Message& request);

    /// Feeds received bytes and returns the encoded responses, in request order.
    std::vector<std::uint8_t> process(std::span<const std::uint8_t> bytes);

    Phase phase() const { return phase_; }
    const Stats& stats() const { return stats_; }
    frontend::CrossbarFixture& fixture() { return fixture_; }
    const frontend::CrossbarFixture& fixture() const { return fixture_; }

    /// Starts a fresh deframer, e.g. for a new connection.
    void reset_stream() { deframer_ = {}; }

private:
    wire::Message run_program(const wire::ProgramRequest& req);
    wire::Message run_read(const wire::ReadRequest& req);
    wire::Message error(wire::ErrorCode code, std::string detail);

    frontend::CrossbarFixture fixture_;
    Phase phase_ = Phase::Boot;
    Stats stats_;
    wire::Deframer deframer_;
};

/// Serves one byte stream until end of stream or `stop`. Strictly serial.
void serve(Firmware& fw, int in_fd, int out_fd, const std::atomic<bool>& stop);

/// Accepts one client at a time on `listener`; connections arriving while a
/// client is active are closed immediately.
void serve_listener(Firmware& fw, int listener_fd, const std::atomic<bool>& stop);

} // namespace memrig::firmware
