#include "memrig/firmware.hpp"

#include <algorithm>
#include <cmath>
#include <poll.h>
#include <sys/socket.h>

#include "memrig/error.hpp"
#include "memrig/programming.hpp"

namespace memrig::firmware {

namespace {

using frontend::CrossbarFixture;
using wire::ErrorCode;

constexpr std::uint16_t kMaxMillivolts = 5000;
constexpr int kMaxPulses = 255;

programming::Mode mode_of(wire::ProgramOp op) {
    switch (op) {
    case wire::ProgramOp::Form:
        return programming::Mode::Form;
    case wire::ProgramOp::Reset:
        return programming::Mode::Reset;
    case wire::ProgramOp::Set:
        break;
    }
    return programming::Mode::Set;
}

bool in_grid(int sl, int bl) {
    return sl >= 0 && sl < frontend::kRows && bl >= 0 && bl < frontend::kCols;
}

std::string address_text(int sl, int bl) {
    return "cell (" + std::to_string(sl) + "," + std::to_string(bl) + ") outside 12x7";
}

} // namespace

Firmware::Firmware(CrossbarFixture fixture) : fixture_(std::move(fixture)) {}

void Firmware::setup() {
    for (int ch = 0; ch < frontend::kDacChannels; ++ch) {
        fixture_.set_dac(ch, 0);
    }
    for (int r = 0; r < frontend::kRows; ++r) {
        fixture_.route(frontend::wl_pin(r), frontend::Source::Ground);
        fixture_.route(frontend::sl_pin(r), frontend::Source::Ground);
    }
    for (int c = 0; c < frontend::kCols; ++c) {
        fixture_.route(frontend::bl_pin(c), frontend::Source::Ground);
        fixture_.set_tia(c, frontend::TiaConfig{frontend::kFeedbackOhms.back(), 1.0, false});
    }
    phase_ = Phase::Ready;
}

wire::Message Firmware::error(ErrorCode code, std::string detail) {
    ++stats_.errors;
    return wire::ErrorResponse{static_cast<std::uint8_t>(code), std::move(detail)};
}

wire::Message Firmware::handle_request(const wire::Message& request) {
    if (phase_ != Phase::Ready) {
        throw ParameterError("firmware not set up");
    }
    ++stats_.requests;
    if (const auto* p = std::get_if<wire::ProgramRequest>(&request)) {
        return run_program(*p);
    }
    if (const auto* r = std::get_if<wire::ReadRequest>(&request)) {
        return run_read(*r);
    }
    if (std::holds_alternative<wire::PingRequest>(request)) {
        return wire::Pong{};
    }
    return error(ErrorCode::UnknownType, "not a request type");
}

wire::Message Firmware::run_program(const wire::ProgramRequest& req) {
    if (!in_grid(req.sl, req.bl)) {
        return error(ErrorCode::AddressError, address_text(req.sl, req.bl));
    }
    if (req.v_step_mv == 0) {
        return error(ErrorCode::InvalidField, "v_step must be > 0");
    }
    if (req.v_start_mv > req.v_stop_mv) {
        return error(ErrorCode::InvalidField, "v_start exceeds v_stop");
    }
    if (req.t_pulse_us == 0) {
        return error(ErrorCode::InvalidField, "t_pulse must be > 0");
    }
    if (req.i_target_na == 0) {
        return error(ErrorCode::InvalidField, "i_target must be > 0");
    }
    if (std::max({req.v_gate_mv, req.v_gate_read_mv, req.v_stop_mv}) > kMaxMillivolts) {
        return error(ErrorCode::InvalidField, "voltage above 5000 mV");
    }

    programming::IspvaParams params;
    params.mode = mode_of(req.op);
    params.v_start = req.v_start_mv * 1e-3;
    params.v_step = req.v_step_mv * 1e-3;
    params.v_stop = req.v_stop_mv * 1e-3;
    params.t_pulse = req.t_pulse_us * 1e-6;
    params.v_gate_prog = req.v_gate_mv * 1e-3;
    params.v_gate_read = req.v_gate_read_mv * 1e-3;
    params.i_target = req.i_target_na * 1e-9;
    if (params.ramp_length() > kMaxPulses) {
        return error(ErrorCode::InvalidField, "ramp longer than 255 pulses");
    }

    const programming::ProgramResult result = programming::ispva(fixture_, req.sl, req.bl, params);
    wire::ProgramResponse resp;
    resp.op = req.op;
    resp.status = static_cast<std::uint8_t>(result.status);
    resp.pulses = static_cast<std::uint8_t>(result.pulses);
    resp.final_v_mv = wire::to_mv_u16(result.final_voltage);
    resp.final_i_na = wire::to_na_u32(std::max(0.0, result.final_current));
    return resp;
}

wire::Message Firmware::run_read(const wire::ReadRequest& req) {
    if (!in_grid(req.sl, req.bl)) {
        return error(ErrorCode::AddressError, address_text(req.sl, req.bl));
    }
    if (req.v_gate_read_mv > kMaxMillivolts || std::abs(req.v_read_mv) > kMaxMillivolts) {
        return error(ErrorCode::InvalidField, "voltage above 5000 mV");
    }
    const frontend::AdcReading reading = fixture_.measure_bl_current(
        req.bl, req.v_read_mv * 1e-3, req.v_gate_read_mv * 1e-3, req.sl);
    if (reading.tia.saturated) {
        return error(ErrorCode::DeviceSaturated, "ADC saturated on the smallest range");
    }
    return wire::ReadResponse{0, wire::to_na_i32(reading.amps)};
}

std::vector<std::uint8_t> Firmware::process(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> out;
    for (const wire::Decoded& item : deframer_.feed(bytes)) {
        wire::Message response;
        if (const auto* err = std::get_if<wire::FrameError>(&item)) {
            ++stats_.requests;
            response = *err == wire::FrameError::UnknownType
                           ? error(ErrorCode::UnknownType, "unknown message type")
                           : error(ErrorCode::BadFrame, wire::to_string(*err));
        } else {
            response = handle_request(std::get<wire::Message>(item));
        }
        const auto frame = wire::encode(response);
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

void serve(Firmware& fw, int in_fd, int out_fd, const std::atomic<bool>& stop) {
    fw.reset_stream();
    while (!stop.load()) {
        const auto chunk = transport::read_some(in_fd, 50);
        if (!chunk) {
            continue;
        }
        if (chunk->empty()) {
            return;
        }
        const auto reply = fw.process(*chunk);
        if (!reply.empty()) {
            transport::write_all(out_fd, reply);
        }
    }
}

void serve_listener(Firmware& fw, int listener_fd, const std::atomic<bool>& stop) {
    transport::Fd client;
    while (!stop.load()) {
        pollfd fds[2] = {{listener_fd, POLLIN, 0}, {client.get(), POLLIN, 0}};
        const int ready = ::poll(fds, client.valid() ? 2 : 1, 50);
        if (ready <= 0) {
            continue;
        }
        // Hang-ups first, so a reconnect in the same wakeup is not refused.
        if (client.valid() && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
            try {
                const auto chunk = transport::read_some(client.get(), 0);
                if (chunk && chunk->empty()) {
                    client.reset();
                } else if (chunk) {
                    const auto reply = fw.process(*chunk);
                    if (!reply.empty()) {
                        transport::write_all(client.get(), reply);
                    }
                }
            } catch (const TransportError&) {
                client.reset();
            }
        }
        if (fds[0].revents & POLLIN) {
            transport::Fd incoming(::accept4(listener_fd, nullptr, nullptr, SOCK_CLOEXEC));
            if (incoming.valid() && !client.valid()) {
                client = std::move(incoming);
                fw.reset_stream();
            }
            // A second connection is closed by going out of scope.
        }
    }
}

} // namespace memrig::firmware
