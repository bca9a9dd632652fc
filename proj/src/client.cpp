#include "memrig/client.hpp"

#include "memrig/error.hpp"
#include "memrig/frontend.hpp"

namespace memrig::host {

void CellAddress::validate() const { frontend::CrossbarFixture::check_address(sl, bl); }

RemoteError::RemoteError(std::uint8_t code, const std::string& detail)
    : std::runtime_error("firmware error " + std::to_string(code) + ": " + detail), code_(code) {}

Client::Client(transport::Fd stream, ClientConfig config)
    : stream_(std::move(stream)), config_(std::move(config)) {}

Client Client::connect(const ClientConfig& config) {
    return Client(transport::connect_tcp(config.endpoint), config);
}

wire::Message Client::transact(const wire::Message& request) {
    transport::write_all(stream_.get(), wire::encode(request));
    for (;;) {
        const auto chunk = transport::read_some(stream_.get(), config_.timeout_ms);
        if (!chunk) {
            throw TransportError("no response within " + std::to_string(config_.timeout_ms) + " ms");
        }
        if (chunk->empty()) {
            throw TransportError("connection closed by firmware");
        }
        auto items = deframer_.feed(*chunk);
        if (items.empty()) {
            continue;
        }
        if (items.size() > 1) {
            throw TransportError("more than one response to a single request");
        }
        if (const auto* err = std::get_if<wire::FrameError>(&items.front())) {
            throw TransportError(std::string("corrupt response frame: ") + wire::to_string(*err));
        }
        return std::get<wire::Message>(items.front());
    }
}

wire::Message Client::expect(const wire::Message& request) {
    wire::Message response = transact(request);
    if (const auto* err = std::get_if<wire::ErrorResponse>(&response)) {
        if (err->code == static_cast<std::uint8_t>(wire::ErrorCode::DeviceSaturated)) {
            throw SaturatedError(err->code, err->detail);
        }
        throw RemoteError(err->code, err->detail);
    }
    return response;
}

programming::ProgramResult Client::program(wire::ProgramOp op, CellAddress addr,
                                           const ProgramSettings& s) {
    addr.validate();
    wire::ProgramRequest req;
    req.op = op;
    req.sl = static_cast<std::uint8_t>(addr.sl);
    req.bl = static_cast<std::uint8_t>(addr.bl);
    req.v_gate_mv = wire::to_mv_u16(s.v_gate);
    req.i_target_na = wire::to_na_u32(s.i_target);
    req.v_gate_read_mv = wire::to_mv_u16(s.v_gate_read);
    req.v_start_mv = wire::to_mv_u16(s.v_start);
    req.v_step_mv = wire::to_mv_u16(s.v_step);
    req.v_stop_mv = wire::to_mv_u16(s.v_stop);
    req.t_pulse_us = wire::to_us_u32(s.t_pulse);

    const wire::Message response = expect(req);
    const auto* resp = std::get_if<wire::ProgramResponse>(&response);
    if (resp == nullptr || resp->op != op) {
        throw TransportError("unexpected response type to a program request");
    }
    if (resp->status > static_cast<std::uint8_t>(programming::Status::CellBroken)) {
        throw TransportError("unknown program status " + std::to_string(resp->status));
    }
    programming::ProgramResult result;
    result.status = static_cast<programming::Status>(resp->status);
    result.pulses = resp->pulses;
    result.final_voltage = resp->final_v_mv * 1e-3;
    result.final_current = resp->final_i_na * 1e-9;
    return result;
}

programming::ProgramResult Client::form_cell(CellAddress addr, const ProgramSettings& s) {
    return program(wire::ProgramOp::Form, addr, s);
}

programming::ProgramResult Client::set_cell(CellAddress addr, const ProgramSettings& s) {
    return program(wire::ProgramOp::Set, addr, s);
}

programming::ProgramResult Client::reset_cell(CellAddress addr, const ProgramSettings& s) {
    return program(wire::ProgramOp::Reset, addr, s);
}

double Client::read_cell(CellAddress addr, double v_read, double v_gate_read) {
    addr.validate();
    wire::ReadRequest req;
    req.sl = static_cast<std::uint8_t>(addr.sl);
    req.bl = static_cast<std::uint8_t>(addr.bl);
    req.v_gate_read_mv = wire::to_mv_u16(v_gate_read);
    req.v_read_mv = wire::to_mv_i16(v_read);
    const wire::Message response = expect(req);
    const auto* resp = std::get_if<wire::ReadResponse>(&response);
    if (resp == nullptr) {
        throw TransportError("unexpected response type to a read request");
    }
    return resp->i_na * 1e-9;
}

std::uint16_t Client::ping() {
    const wire::Message response = expect(wire::PingRequest{});
    const auto* pong = std::get_if<wire::Pong>(&response);
    if (pong == nullptr) {
        throw TransportError("unexpected response type to a ping");
    }
    return pong->firmware_version;
}

} // namespace memrig::host
