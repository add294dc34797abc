#include "distbh/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "distbh/errors.hpp"

namespace distbh {

namespace {

constexpr std::byte kMagic0{0xFD};
constexpr std::byte kMagic1{0x52};
constexpr std::byte kTypeReport{1};
constexpr std::byte kTypeBroadcast{2};

void put_u8(std::vector<std::byte>& out, std::uint8_t v) { out.push_back(std::byte{v}); }

template <typename T>
void put_le(std::vector<std::byte>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<std::byte>& out, double d) {
    put_le(out, std::bit_cast<std::uint64_t>(d));
}

template <typename T>
T get_le(std::span<const std::byte> in, std::size_t at) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(std::to_integer<std::uint64_t>(in[at + i])) << (8 * i);
    return v;
}

double get_f64(std::span<const std::byte> in, std::size_t at) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in, at));
}

// Header check shared by both decoders; `expected` is the msg_type.
void check_frame(std::span<const std::byte> frame, std::size_t size, std::byte expected) {
    if (frame.size() < size) throw CodecError("truncated frame");
    if (frame.size() > size) throw CodecError("overlong frame");
    if (frame[0] != kMagic0 || frame[1] != kMagic1) throw CodecError("bad magic");
    if (frame[2] != std::byte{kWireVersion}) throw CodecError("unsupported version");
    if (frame[3] != expected) throw CodecError("unexpected msg_type");
}

}  // namespace

std::vector<std::byte> encode_report(const NodeReport& r) {
    if (r.node_id < 1 || r.node_id > 0xFF)
        throw CodecError("node_id out of range for wire format");
    if (!(r.null_prop >= 0.0) || !(r.null_prop <= 1.0))
        throw CodecError("r0_hat out of range");

    std::vector<std::byte> out;
    out.reserve(kReportFrameSize);
    out.push_back(kMagic0);
    out.push_back(kMagic1);
    put_u8(out, kWireVersion);
    out.push_back(kTypeReport);
    put_u8(out, static_cast<std::uint8_t>(r.node_id));
    put_le(out, r.pvalue_count);
    put_f64(out, r.null_prop);
    return out;
}

NodeReport decode_report(std::span<const std::byte> frame) {
    check_frame(frame, kReportFrameSize, kTypeReport);
    NodeReport r;
    r.node_id = std::to_integer<std::uint32_t>(frame[4]);
    if (r.node_id == 0) throw CodecError("node_id out of range");
    r.pvalue_count = get_le<std::uint64_t>(frame, 5);
    r.null_prop = get_f64(frame, 13);
    if (!(r.null_prop >= 0.0) || !(r.null_prop <= 1.0))  // also rejects NaN
        throw CodecError("r0_hat out of range");
    return r;
}

std::vector<std::byte> encode_broadcast(const CenterBroadcast& b) {
    if (std::isnan(b.slope) || !(b.slope >= 1.0))
        throw CodecError("beta_star out of range");

    std::vector<std::byte> out;
    out.reserve(kBroadcastFrameSize);
    out.push_back(kMagic0);
    out.push_back(kMagic1);
    put_u8(out, kWireVersion);
    out.push_back(kTypeBroadcast);
    put_le(out, b.round_id);
    put_f64(out, b.slope);
    return out;
}

CenterBroadcast decode_broadcast(std::span<const std::byte> frame) {
    check_frame(frame, kBroadcastFrameSize, kTypeBroadcast);
    CenterBroadcast b;
    b.round_id = get_le<std::uint32_t>(frame, 4);
    b.slope = get_f64(frame, 8);
    if (std::isnan(b.slope) || !(b.slope >= 1.0))  // +inf sentinel is legal
        throw CodecError("beta_star out of range");
    return b;
}

}  // namespace distbh
