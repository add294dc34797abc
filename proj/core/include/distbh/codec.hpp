#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace distbh {

/// Uplink message: one node's p-value count and null-proportion estimate.
struct NodeReport {
    std::uint32_t node_id = 1;       // >= 1; wire format carries one byte
    std::uint64_t pvalue_count = 0;  // m_i
    double null_prop = 1.0;          // r0_hat, in [0,1]

    friend bool operator==(const NodeReport&, const NodeReport&) = default;
};

/// Downlink message: the aggregated slope. slope = +infinity is the
/// reject-nothing sentinel (every node calibrates to alpha_i = 0).
struct CenterBroadcast {
    double slope = 1.0;  // beta*, >= 1 or +inf
    std::uint32_t round_id = 0;

    friend bool operator==(const CenterBroadcast&, const CenterBroadcast&) = default;
};

// Frame layout (little-endian integers):
//   magic 0xFD 0x52 | version u8 = 1 | msg_type u8 | payload
//   report (type 1):    node_id u8 | m_i u64 | r0_hat f64     -> 21 bytes
//   broadcast (type 2): round_id u32 | beta_star f64          -> 16 bytes
inline constexpr std::size_t kReportFrameSize = 21;
inline constexpr std::size_t kBroadcastFrameSize = 16;
inline constexpr std::uint8_t kWireVersion = 1;

std::vector<std::byte> encode_report(const NodeReport& r);
std::vector<std::byte> encode_broadcast(const CenterBroadcast& b);

/// Decoders throw CodecError naming the offending field on any malformed,
/// truncated or overlong frame.
NodeReport decode_report(std::span<const std::byte> frame);
CenterBroadcast decode_broadcast(std::span<const std::byte> frame);

}  // namespace distbh
