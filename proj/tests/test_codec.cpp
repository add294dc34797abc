#include <doctest.h>

#include <bit>
#include <cstring>
#include <functional>
#include <limits>
#include <string>

#include "distbh/codec.hpp"
#include "distbh/errors.hpp"
#include "distbh/rng.hpp"

using namespace distbh;

namespace {

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const CodecError& e) {
        return e.what();
    }
    return "";
}

NodeReport fuzz_report(RngStream& stream) {
    NodeReport r;
    r.node_id = 1 + static_cast<std::uint32_t>(stream.below(255));
    r.pvalue_count = stream.next_u64() >> (stream.below(40));
    switch (stream.below(4)) {
        case 0: r.null_prop = 0.0; break;
        case 1: r.null_prop = 1.0; break;
        default: r.null_prop = stream.uniform01();
    }
    return r;
}

CenterBroadcast fuzz_broadcast(RngStream& stream) {
    CenterBroadcast b;
    b.round_id = static_cast<std::uint32_t>(stream.next_u64());
    b.slope = stream.below(8) == 0 ? std::numeric_limits<double>::infinity()
                                   : 1.0 + 99.0 * stream.uniform01();
    return b;
}

}  // namespace

TEST_CASE("report round trip and frame size") {
    const NodeReport r{1, 100, 0.5};
    const auto frame = encode_report(r);
    CHECK(frame.size() == kReportFrameSize);  // 21 bytes
    CHECK(decode_report(frame) == r);
}

TEST_CASE("broadcast round trip and frame size") {
    const CenterBroadcast b{5.0, 1};
    const auto frame = encode_broadcast(b);
    CHECK(frame.size() == kBroadcastFrameSize);  // 16 bytes
    CHECK(decode_broadcast(frame) == b);

    // the reject-nothing sentinel survives the wire bit-exactly
    const CenterBroadcast inf{std::numeric_limits<double>::infinity(), 7};
    CHECK(decode_broadcast(encode_broadcast(inf)) == inf);
}

TEST_CASE("decode rejects out-of-range fields by name") {
    auto frame = encode_report({1, 100, 0.5});
    const double bad = 1.5;
    std::uint64_t bits = std::bit_cast<std::uint64_t>(bad);
    for (int i = 0; i < 8; ++i) frame[13 + i] = static_cast<std::byte>((bits >> (8 * i)) & 0xFF);
    CHECK(error_text([&] { decode_report(frame); }) == "r0_hat out of range");

    auto bframe = encode_broadcast({2.0, 1});
    bits = std::bit_cast<std::uint64_t>(0.5);  // slope below 1
    for (int i = 0; i < 8; ++i) bframe[8 + i] = static_cast<std::byte>((bits >> (8 * i)) & 0xFF);
    CHECK(error_text([&] { decode_broadcast(bframe); }) == "beta_star out of range");

    frame = encode_report({1, 100, 0.5});
    frame[4] = std::byte{0};  // node_id 0
    CHECK(error_text([&] { decode_report(frame); }) == "node_id out of range");
}

TEST_CASE("decode rejects malformed frames") {
    const auto frame = encode_report({9, 42, 0.25});

    auto truncated = frame;
    truncated.pop_back();
    CHECK(error_text([&] { decode_report(truncated); }) == "truncated frame");

    auto overlong = frame;
    overlong.push_back(std::byte{0});
    CHECK(error_text([&] { decode_report(overlong); }) == "overlong frame");

    auto version = frame;
    version[2] = std::byte{2};
    CHECK(error_text([&] { decode_report(version); }) == "unsupported version");

    // a report frame is not a broadcast (and vice versa): length catches it first
    CHECK(error_text([&] { decode_broadcast(frame); }) == "overlong frame");
    const auto bframe = encode_broadcast({3.0, 0});
    CHECK(error_text([&] { decode_report(bframe); }) == "truncated frame");
    auto retyped = frame;
    retyped[3] = std::byte{2};
    CHECK(error_text([&] { decode_broadcast(std::span(retyped).first(16)); }) != "");
    retyped[3] = std::byte{3};
    CHECK(error_text([&] { decode_report(retyped); }) == "unexpected msg_type");
}

TEST_CASE("encode validates fields") {
    CHECK_THROWS_AS(encode_report({0, 10, 0.5}), CodecError);
    CHECK_THROWS_AS(encode_report({256, 10, 0.5}), CodecError);
    CHECK_THROWS_AS(encode_report({1, 10, 1.5}), CodecError);
    CHECK_THROWS_AS(encode_report({1, 10, -0.1}), CodecError);
    CHECK_THROWS_AS(encode_broadcast({0.5, 1}), CodecError);
    CHECK_THROWS_AS(encode_broadcast({std::numeric_limits<double>::quiet_NaN(), 1}),
                    CodecError);
}

TEST_CASE("round trip identity on fuzzed messages") {
    RngStream stream(808);
    for (int iter = 0; iter < 20000; ++iter) {
        const auto r = fuzz_report(stream);
        CHECK(decode_report(encode_report(r)) == r);
        const auto b = fuzz_broadcast(stream);
        CHECK(decode_broadcast(encode_broadcast(b)) == b);
    }
}

TEST_CASE("every single-bit magic corruption is rejected") {
    RngStream stream(909);
    for (int iter = 0; iter < 200; ++iter) {
        const auto frame = encode_report(fuzz_report(stream));
        const auto bframe = encode_broadcast(fuzz_broadcast(stream));
        for (int bit = 0; bit < 16; ++bit) {
            auto bad = frame;
            bad[bit / 8] ^= std::byte{static_cast<unsigned char>(1u << (bit % 8))};
            CHECK_THROWS_AS(decode_report(bad), CodecError);
            auto bbad = bframe;
            bbad[bit / 8] ^= std::byte{static_cast<unsigned char>(1u << (bit % 8))};
            CHECK_THROWS_AS(decode_broadcast(bbad), CodecError);
        }
    }
}
