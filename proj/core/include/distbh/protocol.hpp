#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "distbh/codec.hpp"
#include "distbh/estimators.hpp"
#include "distbh/testing.hpp"

namespace distbh {

/// Byte transport over the star's edges: one uplink queue into the center,
/// one downlink slot per leaf. Implementations must deliver deterministically
/// so trials replay exactly.
class Transport {
public:
    virtual ~Transport() = default;

    // leaf -> center
    virtual void send_report(std::uint32_t node_id, std::vector<std::byte> frame) = 0;
    virtual std::vector<std::vector<std::byte>> drain_reports() = 0;

    // center -> leaf
    virtual void send_broadcast(std::uint32_t node_id, std::vector<std::byte> frame) = 0;
    virtual std::optional<std::vector<std::byte>> take_broadcast(std::uint32_t node_id) = 0;
};

struct TransportStats {
    std::uint64_t messages = 0;
    std::uint64_t payload_bytes = 0;
};

/// Reliable FIFO in-process transport. Message loss is opt-in (error-path
/// tests only); dropped frames still count as sent.
class InProcessTransport final : public Transport {
public:
    void send_report(std::uint32_t node_id, std::vector<std::byte> frame) override;
    std::vector<std::vector<std::byte>> drain_reports() override;
    void send_broadcast(std::uint32_t node_id, std::vector<std::byte> frame) override;
    std::optional<std::vector<std::byte>> take_broadcast(std::uint32_t node_id) override;

    const TransportStats& stats() const { return stats_; }

    void drop_uplink_from(std::uint32_t node_id) { uplink_drops_.insert(node_id); }
    void drop_downlink_to(std::uint32_t node_id) { downlink_drops_.insert(node_id); }

private:
    std::vector<std::vector<std::byte>> uplinks_;  // arrival order
    std::map<std::uint32_t, std::vector<std::byte>> downlinks_;
    std::set<std::uint32_t> uplink_drops_;
    std::set<std::uint32_t> downlink_drops_;
    TransportStats stats_;
};

/// One leaf node's view of a round.
struct NodeState {
    std::uint32_t node_id = 1;
    PValueBatch batch;
    EstimatorConfig estimator;

    double null_prop = 1.0;   // r0_hat, recorded by make_report
    double alpha_local = 0.0; // calibrated test size, set in step (3)
    std::optional<BhResult> result;
};

/// Center-side barrier: aggregation fires only once all N distinct reports
/// are in.
class CenterState {
public:
    CenterState(std::uint32_t expected_nodes, double alpha);

    void receive(const NodeReport& report);  // ProtocolError on duplicate id
    bool ready() const { return received_.size() == expected_; }
    CenterBroadcast make_broadcast(std::uint32_t round_id) const;

    double alpha() const { return alpha_; }
    std::span<const NodeReport> received() const { return received_; }

private:
    std::uint32_t expected_;
    double alpha_;
    std::vector<NodeReport> received_;
};

/// Step (1): count p-values and estimate the local null proportion. Empty
/// nodes report r0_hat = 1 (their zero weight keeps them out of the global
/// estimate). The estimate is cached on the node for step (3).
NodeReport make_report(NodeState& node);

/// Step (2): weighted null-proportion mean and slope
/// beta* = ((1/alpha) - r0*) / (1 - r0*). r0* = 1 yields the +inf sentinel.
/// Arrival order does not matter; reports are folded in node-id order.
CenterBroadcast aggregate(std::span<const NodeReport> reports, double alpha);

/// Step (3): local test size alpha_i = 1 / ((1 - r0_hat_i) beta* + r0_hat_i).
/// The sentinel slope maps to alpha_i = 0 (reject nothing).
double calibrate(const CenterBroadcast& broadcast, double null_prop);

/// One full round over the given transport: N uplinks, one aggregation,
/// N downlinks, then calibrated BH at every node. Results are stored on the
/// nodes and returned in node order. Exactly two frames traverse each edge.
std::vector<BhResult> run_round(std::span<NodeState> nodes, double alpha,
                                Transport& transport, std::uint32_t round_id = 0);

}  // namespace distbh
