#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "memrig/error.hpp"
#include "memrig/protocol.hpp"

using namespace memrig;
using namespace memrig::wire;

namespace {

using Bytes = std::vector<std::uint8_t>;

// Bit-at-a-time CRC-16/CCITT-FALSE, independent of the table-driven codec.
std::uint16_t crc_bitwise(const Bytes& data) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        for (int bit = 7; bit >= 0; --bit) {
            const bool in = ((byte >> bit) & 1) != 0;
            const bool top = (crc & 0x8000) != 0;
            crc = static_cast<std::uint16_t>(crc << 1);
            if (in != top) {
                crc ^= 0x1021;
            }
        }
    }
    return crc;
}

Bytes frame_by_hand(std::uint8_t type, const Bytes& payload) {
    Bytes body = {0x01, type, static_cast<std::uint8_t>(payload.size() & 0xFF),
                  static_cast<std::uint8_t>(payload.size() >> 8)};
    body.insert(body.end(), payload.begin(), payload.end());
    const auto crc = crc_bitwise(body);
    Bytes f(body.size() + 2);
    f[0] = 0xA5;
    f[1] = 0x5A;
    std::copy(body.begin(), body.end(), f.begin() + 2);
    f.push_back(static_cast<std::uint8_t>(crc & 0xFF));
    f.push_back(static_cast<std::uint8_t>(crc >> 8));
    return f;
}

Message random_message(std::mt19937_64& rng) {
    auto u8 = [&] { return static_cast<std::uint8_t>(rng()); };
    auto u16 = [&] { return static_cast<std::uint16_t>(rng()); };
    auto u32 = [&] { return static_cast<std::uint32_t>(rng()); };
    switch (rng() % 7) {
    case 0: {
        ProgramRequest m;
        m.op = static_cast<ProgramOp>(rng() % 3);
        m.sl = u8();
        m.bl = u8();
        m.v_gate_mv = u16();
        m.i_target_na = u32();
        m.v_gate_read_mv = u16();
        m.v_start_mv = u16();
        m.v_step_mv = u16();
        m.v_stop_mv = u16();
        m.t_pulse_us = u32();
        return m;
    }
    case 1:
        return ReadRequest{u8(), u8(), u16(), static_cast<std::int16_t>(u16())};
    case 2:
        return PingRequest{};
    case 3:
        return ProgramResponse{static_cast<ProgramOp>(rng() % 3), u8(), u8(), u16(), u32()};
    case 4:
        return ReadResponse{u8(), static_cast<std::int32_t>(u32())};
    case 5:
        return Pong{u16()};
    default: {
        ErrorResponse e;
        e.code = u8();
        const auto n = rng() % 256;
        for (std::size_t i = 0; i < n; ++i) {
            e.detail.push_back(static_cast<char>(0x20 + rng() % 95));
        }
        return e;
    }
    }
}

std::vector<Message> messages_of(const std::vector<Decoded>& items) {
    std::vector<Message> out;
    for (const auto& d : items) {
        if (const auto* m = std::get_if<Message>(&d)) {
            out.push_back(*m);
        }
    }
    return out;
}

std::size_t errors_of(const std::vector<Decoded>& items) {
    std::size_t n = 0;
    for (const auto& d : items) {
        n += std::holds_alternative<FrameError>(d) ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("crc of the standard check string") {
    const std::string s = "123456789";
    const Bytes data(s.begin(), s.end());
    CHECK(crc_bitwise(data) == 0x29B1);
    CHECK(crc16_ccitt_false(data) == 0x29B1);
}

TEST_CASE("table crc equals bitwise crc on random buffers") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        Bytes data(rng() % 64);
        for (auto& b : data) {
            b = static_cast<std::uint8_t>(rng());
        }
        CHECK(crc16_ccitt_false(data) == crc_bitwise(data));
    }
}

TEST_CASE("ping frame layout") {
    const Bytes expected = frame_by_hand(0x05, {});
    CHECK(encode(PingRequest{}) == expected);
    // Frozen from the bitwise oracle over 01 05 00 00.
    const std::uint16_t crc = crc_bitwise({0x01, 0x05, 0x00, 0x00});
    CHECK(expected == Bytes{0xA5, 0x5A, 0x01, 0x05, 0x00, 0x00,
                            static_cast<std::uint8_t>(crc & 0xFF),
                            static_cast<std::uint8_t>(crc >> 8)});
}

TEST_CASE("read request payload layout") {
    const ReadRequest req{1, 5, 1500, -200};
    CHECK(encode(req) == frame_by_hand(0x04, {0x01, 0x05, 0xDC, 0x05, 0x38, 0xFF}));
}

TEST_CASE("set request with default ramp") {
    ProgramRequest req;
    req.op = ProgramOp::Set;
    req.sl = 3;
    req.bl = 4;
    req.v_gate_mv = 1500;
    req.i_target_na = 80000;
    req.v_gate_read_mv = 1500;
    req.v_start_mv = 500;
    req.v_step_mv = 100;
    req.v_stop_mv = 2000;
    req.t_pulse_us = 10;
    const Bytes payload = {0x03, 0x04, 0xDC, 0x05, 0x80, 0x38, 0x01, 0x00, 0xDC, 0x05,
                           0xF4, 0x01, 0x64, 0x00, 0xD0, 0x07, 0x0A, 0x00, 0x00, 0x00};
    CHECK(encode(req) == frame_by_hand(0x02, payload));

    req.op = ProgramOp::Reset;
    CHECK(encode(req) == frame_by_hand(0x03, payload));
    req.op = ProgramOp::Form;
    CHECK(encode(req) == frame_by_hand(0x01, payload));
}

TEST_CASE("response layouts") {
    CHECK(encode(ProgramResponse{ProgramOp::Reset, 2, 7, 1100, 0x01020304}) ==
          frame_by_hand(0x83, {0x02, 0x07, 0x4C, 0x04, 0x04, 0x03, 0x02, 0x01}));
    CHECK(encode(ReadResponse{0, -2}) == frame_by_hand(0x84, {0x00, 0xFE, 0xFF, 0xFF, 0xFF}));
    CHECK(encode(Pong{}) == frame_by_hand(0x85, {0x00, 0x01}));
    CHECK(encode(ErrorResponse{4, "ab"}) == frame_by_hand(0xFF, {0x04, 0x02, 'a', 'b'}));
}

TEST_CASE("encode rejects fields that do not fit") {
    CHECK_THROWS_AS(encode(ErrorResponse{1, std::string(256, 'x')}), EncodeError);
    CHECK_THROWS_AS(encode(ErrorResponse{1, std::string(1, static_cast<char>(0xC3))}),
                    EncodeError);
    CHECK_NOTHROW(encode(ErrorResponse{1, std::string(255, 'x')}));
    CHECK_THROWS_AS(to_mv_u16(65.536), EncodeError);
    CHECK_THROWS_AS(to_mv_u16(-0.001), EncodeError);
    CHECK_THROWS_AS(to_mv_i16(-32.769), EncodeError);
    CHECK_THROWS_AS(to_na_u32(4.3), EncodeError);
    CHECK(to_mv_i16(-0.2) == -200);
    CHECK(to_na_u32(80e-6) == 80000);
    CHECK(to_na_i32(-1.5e-9) == -2);
    CHECK(to_us_u32(10e-6) == 10);
}

TEST_CASE("round trip of random messages") {
    std::mt19937_64 rng(11);
    Deframer d;
    for (int i = 0; i < 2000; ++i) {
        const Message m = random_message(rng);
        const auto items = d.feed(encode(m));
        REQUIRE(items.size() == 1);
        REQUIRE(std::holds_alternative<Message>(items[0]));
        CHECK(std::get<Message>(items[0]) == m);
    }
    CHECK(d.buffered() == 0);
}

TEST_CASE("two frames split at every boundary") {
    const Bytes a = encode(ReadRequest{2, 3, 1500, 300});
    const Bytes b = encode(ErrorResponse{3, "bad field"});
    Bytes both = a;
    both.insert(both.end(), b.begin(), b.end());
    for (std::size_t cut = 0; cut <= both.size(); ++cut) {
        Deframer d;
        auto first = d.feed(std::span(both).first(cut));
        auto second = d.feed(std::span(both).subspan(cut));
        first.insert(first.end(), second.begin(), second.end());
        REQUIRE(errors_of(first) == 0);
        const auto msgs = messages_of(first);
        REQUIRE(msgs.size() == 2);
        CHECK(msgs[0] == Message{ReadRequest{2, 3, 1500, 300}});
        CHECK(msgs[1] == Message{ErrorResponse{3, "bad field"}});
    }
}

TEST_CASE("byte at a time feeding") {
    const Bytes f = encode(Pong{0x0203});
    Deframer d;
    std::vector<Decoded> all;
    for (std::uint8_t b : f) {
        auto items = d.feed(std::span(&b, 1));
        all.insert(all.end(), items.begin(), items.end());
    }
    REQUIRE(all.size() == 1);
    CHECK(std::get<Message>(all[0]) == Message{Pong{0x0203}});
}

TEST_CASE("single flipped payload bit reports one bad crc") {
    Bytes f = encode(ReadRequest{1, 5, 1500, -200});
    f[8] ^= 0x10;
    Deframer d;
    const auto items = d.feed(f);
    REQUIRE(items.size() == 1);
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadCrc);
}

TEST_CASE("every single-bit flip in a frame is detected") {
    const Bytes good = encode(ProgramResponse{ProgramOp::Set, 0, 4, 900, 81234});
    const Bytes next = encode(PingRequest{});
    for (std::size_t byte = 0; byte < good.size(); ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            Bytes f = good;
            f[byte] ^= static_cast<std::uint8_t>(1 << bit);
            f.insert(f.end(), next.begin(), next.end());
            Deframer d;
            const auto items = d.feed(f);
            const auto msgs = messages_of(items);
            REQUIRE(!msgs.empty());
            CHECK(msgs.back() == Message{PingRequest{}});
            CHECK(msgs.size() == 1);
            CHECK(errors_of(items) >= 1);
        }
    }
}

TEST_CASE("garbage then a valid frame") {
    Bytes stream = {0x00, 0x13, 0xA5, 0x77, 0xFF, 0x5A};
    const Bytes ping = encode(PingRequest{});
    stream.insert(stream.end(), ping.begin(), ping.end());
    Deframer d;
    const auto items = d.feed(stream);
    REQUIRE(items.size() == 2);
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadMagic);
    CHECK(std::get<Message>(items[1]) == Message{PingRequest{}});
}

TEST_CASE("header errors") {
    Deframer d;
    auto bad_version = encode(PingRequest{});
    bad_version[2] = 0x02;
    auto items = d.feed(bad_version);
    REQUIRE(!items.empty());
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadVersion);

    Deframer d2;
    items = d2.feed(frame_by_hand(0x42, {}));
    REQUIRE(!items.empty());
    CHECK(std::get<FrameError>(items[0]) == FrameError::UnknownType);

    Deframer d3;
    items = d3.feed(frame_by_hand(0x05, {0x00}));
    REQUIRE(!items.empty());
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadLength);

    Deframer d4;
    Bytes huge = {0xA5, 0x5A, 0x01, 0xFF, 0x01, 0x04};
    items = d4.feed(huge);
    REQUIRE(!items.empty());
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadLength);
}

TEST_CASE("error detail length must match the payload") {
    Deframer d;
    const auto items = d.feed(frame_by_hand(0xFF, {0x01, 0x05, 'a'}));
    REQUIRE(!items.empty());
    CHECK(std::get<FrameError>(items[0]) == FrameError::BadLength);
}

TEST_CASE("random bytes never break the deframer") {
    std::mt19937_64 rng(99);
    Deframer d;
    for (int chunk = 0; chunk < 200; ++chunk) {
        Bytes junk(1 + rng() % 300);
        for (auto& b : junk) {
            b = static_cast<std::uint8_t>(rng());
        }
        d.feed(junk);
        CHECK(d.buffered() <= kHeaderSize + kMaxPayload + kCrcSize);
    }
    // The stream recovers once a clean frame arrives, even after a truncated header.
    const Bytes stale = {0xA5, 0x5A, 0x01, 0x05, 0x00, 0x00};
    d.feed(stale);
    const auto items = d.feed(encode(PingRequest{}));
    const auto msgs = messages_of(items);
    REQUIRE(!msgs.empty());
    CHECK(msgs.back() == Message{PingRequest{}});
}

TEST_CASE("type helpers") {
    CHECK(type_of(ProgramRequest{ProgramOp::Form}) == MsgType::FormReq);
    CHECK(type_of(ProgramResponse{ProgramOp::Reset}) == MsgType::ResetResp);
    CHECK(is_request(ReadRequest{}));
    CHECK_FALSE(is_request(Pong{}));
    CHECK(std::string(to_string(FrameError::BadCrc)) == "BAD_CRC");
}
