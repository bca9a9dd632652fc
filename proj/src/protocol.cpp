#include "memrig/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "memrig/error.hpp"

namespace memrig::wire {

namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
    std::array<std::uint16_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto crc = static_cast<std::uint16_t>(i << 8);
        for (int b = 0; b < 8; ++b) {
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

constexpr std::size_t kProgramReqLen = 20;
constexpr std::size_t kReadReqLen = 6;
constexpr std::size_t kProgramRespLen = 8;
constexpr std::size_t kReadRespLen = 5;
constexpr std::size_t kPongLen = 2;
constexpr std::size_t kErrorRespMinLen = 2;
constexpr std::size_t kErrorRespMaxLen = 2 + 255;

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v & 0xFF));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v & 0xFFFF));
        u16(static_cast<std::uint16_t>(v >> 16));
    }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void bytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }

    std::vector<std::uint8_t>& data() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return in_[pos_++]; }
    std::uint16_t u16() {
        const std::uint16_t lo = u8();
        const std::uint16_t hi = u8();
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::uint32_t u32() {
        const std::uint32_t lo = u16();
        const std::uint32_t hi = u16();
        return lo | (hi << 16);
    }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::string rest() {
        std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.end());
        pos_ = in_.size();
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

MsgType program_req_type(ProgramOp op) {
    switch (op) {
    case ProgramOp::Form:
        return MsgType::FormReq;
    case ProgramOp::Set:
        return MsgType::SetReq;
    case ProgramOp::Reset:
        return MsgType::ResetReq;
    }
    throw EncodeError("bad program op");
}

MsgType program_resp_type(ProgramOp op) {
    return static_cast<MsgType>(static_cast<std::uint8_t>(program_req_type(op)) | 0x80);
}

bool known_type(std::uint8_t t) {
    return (t >= 0x01 && t <= 0x05) || (t >= 0x81 && t <= 0x85) || t == 0xFF;
}

bool length_fits(std::uint8_t type, std::size_t len) {
    switch (static_cast<MsgType>(type)) {
    case MsgType::FormReq:
    case MsgType::SetReq:
    case MsgType::ResetReq:
        return len == kProgramReqLen;
    case MsgType::ReadReq:
        return len == kReadReqLen;
    case MsgType::PingReq:
        return len == 0;
    case MsgType::FormResp:
    case MsgType::SetResp:
    case MsgType::ResetResp:
        return len == kProgramRespLen;
    case MsgType::ReadResp:
        return len == kReadRespLen;
    case MsgType::Pong:
        return len == kPongLen;
    case MsgType::ErrorResp:
        return len >= kErrorRespMinLen && len <= kErrorRespMaxLen;
    }
    return false;
}

void write_payload(Writer& w, const Message& msg) {
    std::visit(
        [&w](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProgramRequest>) {
                w.u8(m.sl);
                w.u8(m.bl);
                w.u16(m.v_gate_mv);
                w.u32(m.i_target_na);
                w.u16(m.v_gate_read_mv);
                w.u16(m.v_start_mv);
                w.u16(m.v_step_mv);
                w.u16(m.v_stop_mv);
                w.u32(m.t_pulse_us);
            } else if constexpr (std::is_same_v<T, ReadRequest>) {
                w.u8(m.sl);
                w.u8(m.bl);
                w.u16(m.v_gate_read_mv);
                w.i16(m.v_read_mv);
            } else if constexpr (std::is_same_v<T, PingRequest>) {
            } else if constexpr (std::is_same_v<T, ProgramResponse>) {
                w.u8(m.status);
                w.u8(m.pulses);
                w.u16(m.final_v_mv);
                w.u32(m.final_i_na);
            } else if constexpr (std::is_same_v<T, ReadResponse>) {
                w.u8(m.status);
                w.i32(m.i_na);
            } else if constexpr (std::is_same_v<T, Pong>) {
                w.u16(m.firmware_version);
            } else if constexpr (std::is_same_v<T, ErrorResponse>) {
                if (m.detail.size() > 255) {
                    throw EncodeError("error detail longer than 255 bytes");
                }
                for (char c : m.detail) {
                    if (static_cast<unsigned char>(c) > 0x7F) {
                        throw EncodeError("error detail must be ASCII");
                    }
                }
                w.u8(m.code);
                w.u8(static_cast<std::uint8_t>(m.detail.size()));
                w.bytes(m.detail);
            }
        },
        msg);
}

std::optional<Message> read_payload(std::uint8_t type, std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto t = static_cast<MsgType>(type);
    switch (t) {
    case MsgType::FormReq:
    case MsgType::SetReq:
    case MsgType::ResetReq: {
        ProgramRequest m;
        m.op = static_cast<ProgramOp>(type - 0x01);
        m.sl = r.u8();
        m.bl = r.u8();
        m.v_gate_mv = r.u16();
        m.i_target_na = r.u32();
        m.v_gate_read_mv = r.u16();
        m.v_start_mv = r.u16();
        m.v_step_mv = r.u16();
        m.v_stop_mv = r.u16();
        m.t_pulse_us = r.u32();
        return m;
    }
    case MsgType::ReadReq: {
        ReadRequest m;
        m.sl = r.u8();
        m.bl = r.u8();
        m.v_gate_read_mv = r.u16();
        m.v_read_mv = r.i16();
        return m;
    }
    case MsgType::PingReq:
        return PingRequest{};
    case MsgType::FormResp:
    case MsgType::SetResp:
    case MsgType::ResetResp: {
        ProgramResponse m;
        m.op = static_cast<ProgramOp>(type - 0x81);
        m.status = r.u8();
        m.pulses = r.u8();
        m.final_v_mv = r.u16();
        m.final_i_na = r.u32();
        return m;
    }
    case MsgType::ReadResp: {
        ReadResponse m;
        m.status = r.u8();
        m.i_na = r.i32();
        return m;
    }
    case MsgType::Pong:
        return Pong{r.u16()};
    case MsgType::ErrorResp: {
        ErrorResponse m;
        m.code = r.u8();
        const std::size_t n = r.u8();
        if (r.remaining() != n) {
            return std::nullopt;
        }
        m.detail = r.rest();
        return m;
    }
    }
    return std::nullopt;
}

template <typename T>
T checked(double value, const char* what) {
    const double r = std::round(value);
    if (!std::isfinite(r) || r < static_cast<double>(std::numeric_limits<T>::min()) ||
        r > static_cast<double>(std::numeric_limits<T>::max())) {
        throw EncodeError(std::string(what) + " out of range for its wire field");
    }
    return static_cast<T>(r);
}

} // namespace

MsgType type_of(const Message& msg) {
    return std::visit(
        [](const auto& m) -> MsgType {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ProgramRequest>) {
                return program_req_type(m.op);
            } else if constexpr (std::is_same_v<T, ReadRequest>) {
                return MsgType::ReadReq;
            } else if constexpr (std::is_same_v<T, PingRequest>) {
                return MsgType::PingReq;
            } else if constexpr (std::is_same_v<T, ProgramResponse>) {
                return program_resp_type(m.op);
            } else if constexpr (std::is_same_v<T, ReadResponse>) {
                return MsgType::ReadResp;
            } else if constexpr (std::is_same_v<T, Pong>) {
                return MsgType::Pong;
            } else {
                return MsgType::ErrorResp;
            }
        },
        msg);
}

bool is_request(const Message& msg) {
    return std::holds_alternative<ProgramRequest>(msg) ||
           std::holds_alternative<ReadRequest>(msg) || std::holds_alternative<PingRequest>(msg);
}

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        crc = static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFF]);
    }
    return crc;
}

std::vector<std::uint8_t> encode(const Message& msg) {
    Writer payload;
    write_payload(payload, msg);
    const auto& body = payload.data();
    if (body.size() > kMaxPayload) {
        throw EncodeError("payload exceeds 1024 bytes");
    }

    Writer frame;
    frame.u8(kMagic0);
    frame.u8(kMagic1);
    frame.u8(kVersion);
    frame.u8(static_cast<std::uint8_t>(type_of(msg)));
    frame.u16(static_cast<std::uint16_t>(body.size()));
    auto& out = frame.data();
    out.insert(out.end(), body.begin(), body.end());
    const auto crc = crc16_ccitt_false(std::span(out).subspan(2));
    frame.u16(crc);
    return std::move(out);
}

const char* to_string(FrameError err) {
    switch (err) {
    case FrameError::BadMagic:
        return "BAD_MAGIC";
    case FrameError::BadVersion:
        return "BAD_VERSION";
    case FrameError::BadLength:
        return "BAD_LENGTH";
    case FrameError::BadCrc:
        return "BAD_CRC";
    case FrameError::UnknownType:
        return "UNKNOWN_TYPE";
    }
    return "?";
}

std::vector<Decoded> Deframer::feed(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    std::vector<Decoded> out;
    std::size_t pos = 0;

    auto reject = [&](FrameError err) {
        if (consumed_ + pos >= quiet_until_) {
            out.emplace_back(err);
        }
        in_garbage_ = true;
        pos += 1;
    };

    while (pos < buf_.size()) {
        const bool magic_head = buf_[pos] == kMagic0;
        if (!magic_head || (pos + 1 < buf_.size() && buf_[pos + 1] != kMagic1)) {
            if (!in_garbage_) {
                out.emplace_back(FrameError::BadMagic);
                in_garbage_ = true;
            }
            const auto next = std::find(buf_.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                                        buf_.end(), kMagic0);
            pos = static_cast<std::size_t>(next - buf_.begin());
            continue;
        }
        if (buf_.size() - pos < kHeaderSize) {
            break;
        }
        const std::uint8_t version = buf_[pos + 2];
        const std::uint8_t type = buf_[pos + 3];
        const std::size_t len = static_cast<std::size_t>(buf_[pos + 4]) |
                                (static_cast<std::size_t>(buf_[pos + 5]) << 8);
        if (version != kVersion) {
            reject(FrameError::BadVersion);
            continue;
        }
        if (!known_type(type)) {
            reject(FrameError::UnknownType);
            continue;
        }
        if (len > kMaxPayload || !length_fits(type, len)) {
            reject(FrameError::BadLength);
            continue;
        }
        const std::size_t total = kHeaderSize + len + kCrcSize;
        if (buf_.size() - pos < total) {
            break;
        }
        const std::span<const std::uint8_t> frame(buf_.data() + pos, total);
        const std::uint16_t want = static_cast<std::uint16_t>(frame[total - 2] |
                                                              (frame[total - 1] << 8));
        if (crc16_ccitt_false(frame.subspan(2, 4 + len)) != want) {
            const std::uint64_t end = consumed_ + pos + total;
            reject(FrameError::BadCrc);
            quiet_until_ = std::max(quiet_until_, end);
            continue;
        }
        auto msg = read_payload(type, frame.subspan(kHeaderSize, len));
        if (!msg) {
            reject(FrameError::BadLength);
            continue;
        }
        out.emplace_back(std::move(*msg));
        in_garbage_ = false;
        pos += total;
    }

    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos));
    consumed_ += pos;
    return out;
}

std::uint16_t to_mv_u16(double volts) { return checked<std::uint16_t>(volts * 1e3, "voltage"); }
std::int16_t to_mv_i16(double volts) { return checked<std::int16_t>(volts * 1e3, "voltage"); }
std::uint32_t to_na_u32(double amps) { return checked<std::uint32_t>(amps * 1e9, "current"); }
std::int32_t to_na_i32(double amps) { return checked<std::int32_t>(amps * 1e9, "current"); }
std::uint32_t to_us_u32(double seconds) {
    return checked<std::uint32_t>(seconds * 1e6, "duration");
}

} // namespace memrig::wire
