#pragma once

// Framed request/response codec.
//
//   A5 5A | version | msg_type | payload_len (u16 LE) | payload | crc (u16 LE)
//
// The CRC is CRC-16/CCITT-FALSE over version..payload. All multi-byte fields
// are little-endian; units are mV, nA and us exactly as named.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace memrig::wire {

inline constexpr std::uint8_t kMagic0 = 0xA5;
inline constexpr std::uint8_t kMagic1 = 0x5A;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 6;
inline constexpr std::size_t kCrcSize = 2;
inline constexpr std::size_t kMaxPayload = 1024;
inline constexpr std::uint16_t kFirmwareVersion = 0x0100;

enum class MsgType : std::uint8_t {
    FormReq = 0x01,
    SetReq = 0x02,
    ResetReq = 0x03,
    ReadReq = 0x04,
    PingReq = 0x05,
    FormResp = 0x81,
    SetResp = 0x82,
    ResetResp = 0x83,
    ReadResp = 0x84,
    Pong = 0x85,
    ErrorResp = 0xFF,
};

enum class ProgramOp : std::uint8_t { Form, Set, Reset };

struct ProgramRequest {
    ProgramOp op = ProgramOp::Set;
    std::uint8_t sl = 0;
    std::uint8_t bl = 0;
    std::uint16_t v_gate_mv = 0;
    std::uint32_t i_target_na = 0;  // lower bound for form/set, upper bound for reset
    std::uint16_t v_gate_read_mv = 0;
    std::uint16_t v_start_mv = 0;
    std::uint16_t v_step_mv = 0;
    std::uint16_t v_stop_mv = 0;
    std::uint32_t t_pulse_us = 0;

    bool operator==(const ProgramRequest&) const = default;
};

struct ReadRequest {
    std::uint8_t sl = 0;
    std::uint8_t bl = 0;
    std::uint16_t v_gate_read_mv = 0;
    std::int16_t v_read_mv = 0;

    bool operator==(const ReadRequest&) const = default;
};

struct PingRequest {
    bool operator==(const PingRequest&) const = default;
};

struct ProgramResponse {
    ProgramOp op = ProgramOp::Set;
    std::uint8_t status = 0;
    std::uint8_t pulses = 0;
    std::uint16_t final_v_mv = 0;
    std::uint32_t final_i_na = 0;

    bool operator==(const ProgramResponse&) const = default;
};

struct ReadResponse {
    std::uint8_t status = 0;
    std::int32_t i_na = 0;

    bool operator==(const ReadResponse&) const = default;
};

struct Pong {
    std::uint16_t firmware_version = kFirmwareVersion;

    bool operator==(const Pong&) const = default;
};

enum class ErrorCode : std::uint8_t {
    BadFrame = 1,
    UnknownType = 2,
    InvalidField = 3,
    AddressError = 4,
    DeviceSaturated = 5,
};

struct ErrorResponse {
    std::uint8_t code = 0;
    std::string detail;  // ASCII, at most 255 bytes

    bool operator==(const ErrorResponse&) const = default;
};

using Message = std::variant<ProgramRequest, ReadRequest, PingRequest, ProgramResponse,
                             ReadResponse, Pong, ErrorResponse>;

MsgType type_of(const Message& msg);
bool is_request(const Message& msg);

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

/// Throws EncodeError when a field does not fit the wire layout.
std::vector<std::uint8_t> encode(const Message& msg);

enum class FrameError : std::uint8_t { BadMagic, BadVersion, BadLength, BadCrc, UnknownType };

const char* to_string(FrameError err);

using Decoded = std::variant<Message, FrameError>;

/// Incremental stream parser. Accepts arbitrary bytes; corrupt input is reported
/// as FrameError values and parsing resumes at the next magic.
class Deframer {
public:
    std::vector<Decoded> feed(std::span<const std::uint8_t> bytes);

    /// Bytes held while waiting for the rest of a frame.
    std::size_t buffered() const { return buf_.size(); }

private:
    std::vector<std::uint8_t> buf_;
    std::uint64_t consumed_ = 0;     // stream offset of buf_[0]
    std::uint64_t quiet_until_ = 0;  // end of the last frame rejected by CRC
    bool in_garbage_ = false;        // already reported the current bad stretch
};

// Unit conversions; throw EncodeError on overflow.
std::uint16_t to_mv_u16(double volts);
std::int16_t to_mv_i16(double volts);
std::uint32_t to_na_u32(double amps);
std::int32_t to_na_i32(double amps);
std::uint32_t to_us_u32(double seconds);

} // namespace memrig::wire
