#include "distbh/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "distbh/errors.hpp"

namespace distbh {

void InProcessTransport::send_report(std::uint32_t node_id, std::vector<std::byte> frame) {
    ++stats_.messages;
    stats_.payload_bytes += frame.size();
    if (uplink_drops_.contains(node_id)) return;
    uplinks_.push_back(std::move(frame));
}

std::vector<std::vector<std::byte>> InProcessTransport::drain_reports() {
    return std::exchange(uplinks_, {});
}

void InProcessTransport::send_broadcast(std::uint32_t node_id, std::vector<std::byte> frame) {
    ++stats_.messages;
    stats_.payload_bytes += frame.size();
    if (downlink_drops_.contains(node_id)) return;
    downlinks_[node_id] = std::move(frame);
}

std::optional<std::vector<std::byte>> InProcessTransport::take_broadcast(std::uint32_t node_id) {
    auto it = downlinks_.find(node_id);
    if (it == downlinks_.end()) return std::nullopt;
    auto frame = std::move(it->second);
    downlinks_.erase(it);
    return frame;
}

CenterState::CenterState(std::uint32_t expected_nodes, double alpha)
    : expected_(expected_nodes), alpha_(alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InputError("CenterState: alpha must be in (0,1]");
}

void CenterState::receive(const NodeReport& report) {
    for (const auto& seen : received_)
        if (seen.node_id == report.node_id)
            throw ProtocolError("duplicate report from node " + std::to_string(report.node_id));
    received_.push_back(report);
}

CenterBroadcast CenterState::make_broadcast(std::uint32_t round_id) const {
    if (!ready())
        throw ProtocolError("aggregation requires all " + std::to_string(expected_) +
                            " reports, have " + std::to_string(received_.size()));
    auto broadcast = aggregate(received_, alpha_);
    broadcast.round_id = round_id;
    return broadcast;
}

NodeReport make_report(NodeState& node) {
    node.batch.validate();
    NodeReport report;
    report.node_id = node.node_id;
    report.pvalue_count = node.batch.size();
    report.null_prop = node.batch.size() == 0
                           ? 1.0
                           : estimate_null_proportion(node.batch.pvalues, node.estimator);
    node.null_prop = report.null_prop;
    return report;
}

CenterBroadcast aggregate(std::span<const NodeReport> reports, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) throw InputError("aggregate: alpha must be in (0,1]");

    // Fold in node-id order so the result is exactly arrival-order invariant.
    std::vector<NodeReport> sorted(reports.begin(), reports.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const NodeReport& a, const NodeReport& b) { return a.node_id < b.node_id; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].node_id == sorted[i - 1].node_id)
            throw ProtocolError("duplicate node_id " + std::to_string(sorted[i].node_id) +
                                " in aggregation");

    double total = 0.0;
    double weighted = 0.0;
    for (const auto& r : sorted) {
        if (!(r.null_prop >= 0.0) || !(r.null_prop <= 1.0))
            throw InputError("aggregate: r0_hat outside [0,1]");
        const double m_i = static_cast<double>(r.pvalue_count);
        total += m_i;
        weighted += r.null_prop * m_i;
    }
    if (!(total >= 1.0)) throw ProtocolError("aggregate: no p-values in the network");

    const double r0_star = weighted / total;
    CenterBroadcast out;
    if (r0_star >= 1.0) {
        // Everyone claims pure null: no finite slope exists; tell the nodes
        // to reject nothing.
        out.slope = std::numeric_limits<double>::infinity();
    } else {
        out.slope = (1.0 / alpha - r0_star) / (1.0 - r0_star);
    }
    return out;
}

double calibrate(const CenterBroadcast& broadcast, double null_prop) {
    if (!(null_prop >= 0.0) || !(null_prop <= 1.0))
        throw InputError("calibrate: r0_hat outside [0,1]");
    if (std::isinf(broadcast.slope)) return 0.0;  // reject-nothing sentinel
    if (std::isnan(broadcast.slope) || broadcast.slope < 1.0)
        throw InputError("calibrate: slope must be >= 1");
    return 1.0 / ((1.0 - null_prop) * broadcast.slope + null_prop);
}

std::vector<BhResult> run_round(std::span<NodeState> nodes, double alpha,
                                Transport& transport, std::uint32_t round_id) {
    // step (1): every leaf reports (m_i, r0_hat_i)
    for (auto& node : nodes)
        transport.send_report(node.node_id, encode_report(make_report(node)));

    // step (2): barrier at the center, aggregate, broadcast beta*
    CenterState center(static_cast<std::uint32_t>(nodes.size()), alpha);
    for (auto& frame : transport.drain_reports()) center.receive(decode_report(frame));
    if (!center.ready())
        throw ProtocolError("round timeout: " + std::to_string(center.received().size()) +
                            " of " + std::to_string(nodes.size()) + " reports arrived");
    const auto frame = encode_broadcast(center.make_broadcast(round_id));
    for (auto& node : nodes) transport.send_broadcast(node.node_id, frame);

    // step (3): calibrated local BH
    std::vector<BhResult> results;
    results.reserve(nodes.size());
    for (auto& node : nodes) {
        auto down = transport.take_broadcast(node.node_id);
        if (!down)
            throw ProtocolError("round timeout: node " + std::to_string(node.node_id) +
                                " received no broadcast");
        const auto broadcast = decode_broadcast(*down);
        node.alpha_local = calibrate(broadcast, node.null_prop);
        node.result = node.alpha_local > 0.0
                          ? bh_procedure(node.batch.pvalues, node.alpha_local)
                          : BhResult{};
        results.push_back(*node.result);
    }
    return results;
}

}  // namespace distbh
