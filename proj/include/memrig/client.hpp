#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "memrig/programming.hpp"
#include "memrig/protocol.hpp"
#include "memrig/transport.hpp"

namespace memrig::host {

struct CellAddress {
    int sl = 0;
    int bl = 0;

    /// Throws AddressError outside the 12x7 grid.
    void validate() const;

    auto operator<=>(const CellAddress&) const = default;
};

/// Ramp and targets for one program operation.
struct ProgramSettings {
    double v_gate = 1.5;
    double i_target = 80e-6;
    double v_gate_read = 1.5;
    double v_start = 0.5;
    double v_step = 0.1;
    double v_stop = 2.0;
    double t_pulse = 10e-6;
};

struct ClientConfig {
    transport::Endpoint endpoint;
    ProgramSettings form{1.8, 80e-6, 1.5, 2.0, 0.1, 3.2, 10e-6};
    ProgramSettings reset{2.7, 5e-6, 1.5, 0.5, 0.1, 2.0, 10e-6};
    ProgramSettings set{1.5, 80e-6, 1.5, 0.5, 0.1, 2.0, 10e-6};
    double read_gate = 1.5;
    /// Upper bound on one round trip.
    int timeout_ms = 10000;
};

/// ERROR_RESP returned by the firmware.
class RemoteError : public std::runtime_error {
public:
    RemoteError(std::uint8_t code, const std::string& detail);
    std::uint8_t code() const { return code_; }

private:
    std::uint8_t code_;
};

/// The read current did not fit even the least sensitive TIA range.
class SaturatedError : public RemoteError {
public:
    using RemoteError::RemoteError;
};

/// Synchronous request/response client over one stream connection.
class Client {
public:
    Client(transport::Fd stream, ClientConfig config = {});

    static Client connect(const ClientConfig& config);

    const ClientConfig& config() const { return config_; }

    programming::ProgramResult form_cell(CellAddress addr) { return form_cell(addr, config_.form); }
    programming::ProgramResult set_cell(CellAddress addr) { return set_cell(addr, config_.set); }
    programming::ProgramResult reset_cell(CellAddress addr) { return reset_cell(addr, config_.reset); }

    programming::ProgramResult form_cell(CellAddress addr, const ProgramSettings& s);
    programming::ProgramResult set_cell(CellAddress addr, const ProgramSettings& s);
    programming::ProgramResult reset_cell(CellAddress addr, const ProgramSettings& s);

    /// Signed current in amps at the signed read voltage.
    double read_cell(CellAddress addr, double v_read) { return read_cell(addr, v_read, config_.read_gate); }
    double read_cell(CellAddress addr, double v_read, double v_gate_read);

    std::uint16_t ping();

    /// Sends one request and waits for its response. ERROR_RESP is returned as is.
    wire::Message transact(const wire::Message& request);

private:
    programming::ProgramResult program(wire::ProgramOp op, CellAddress addr,
                                       const ProgramSettings& s);
    wire::Message expect(const wire::Message& request);

    transport::Fd stream_;
    ClientConfig config_;
    wire::Deframer deframer_;
};

} // namespace memrig::host
