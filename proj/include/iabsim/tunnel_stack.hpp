// SPDX-License-Identifier: Apache-2.0
//
// iabsim - slot-level simulator for multi-hop maritime IAB networks
// Copyright (C) 2026 The iabsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// User-plane data path: TFT-style flow classification onto TEIDs, inner
// GTP-U tunnel encapsulation, BAP header stamping and per-link RLC-UM queues.

#include "iabsim/bap.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iabsim {

enum class FlowDirection { dl, ul };
enum class TrafficKind { pdu, non_pdu };

inline std::string_view to_string(FlowDirection d) { return d == FlowDirection::dl ? "dl" : "ul"; }
inline std::string_view to_string(TrafficKind k) { return k == TrafficKind::pdu ? "pdu" : "non_pdu"; }

inline FlowDirection flow_direction_from_string(std::string_view s)
{
    if (s == "dl") return FlowDirection::dl;
    if (s == "ul") return FlowDirection::ul;
    throw ConfigError("unknown flow direction '" + std::string(s) + "'");
}

inline TrafficKind traffic_kind_from_string(std::string_view s)
{
    if (s == "pdu") return TrafficKind::pdu;
    if (s == "non_pdu") return TrafficKind::non_pdu;
    throw ConfigError("unknown traffic kind '" + std::string(s) + "'");
}

inline constexpr std::uint32_t kGtpuHeaderBytes = 8;
inline constexpr std::uint32_t kUdpHeaderBytes = 8;
inline constexpr std::uint32_t kIpv4HeaderBytes = 20;
inline constexpr std::uint32_t kTunnelOverheadBytes = kGtpuHeaderBytes + kUdpHeaderBytes + kIpv4HeaderBytes;
inline constexpr std::uint32_t kBapHeaderBytes = 3;

struct Flow {
    int flow_id = 0;
    /// DL: donor -> access node; UL: access node -> donor.
    NodeId src = -1;
    NodeId dst = -1;
    FlowDirection direction = FlowDirection::dl;
    std::uint32_t teid = 0;
    TrafficKind kind = TrafficKind::non_pdu;
};

class FlowTable {
public:
    void add(const Flow& f)
    {
        if (by_id_.contains(f.flow_id)) throw ConfigError("duplicate flow id " + std::to_string(f.flow_id));
        for (const auto& [id, other] : by_id_) {
            if (other.teid == f.teid) throw ConfigError("TEID " + std::to_string(f.teid) + " reused by flows");
        }
        by_id_.emplace(f.flow_id, f);
    }

    /// flow id -> TEID
    [[nodiscard]] std::uint32_t classify(int flow_id) const { return get(flow_id).teid; }

    [[nodiscard]] const Flow& get(int flow_id) const
    {
        auto it = by_id_.find(flow_id);
        if (it == by_id_.end()) throw ClassificationError("unknown flow " + std::to_string(flow_id));
        return it->second;
    }

    [[nodiscard]] std::size_t size() const { return by_id_.size(); }
    [[nodiscard]] auto begin() const { return by_id_.begin(); }
    [[nodiscard]] auto end() const { return by_id_.end(); }

private:
    std::map<int, Flow> by_id_;
};

/// TEID -> BAP (destination, path). Held at the donor for DL and at the
/// access node for UL; LAN flows get an entry too (pre-configured route).
struct ForwardingTable {
    std::map<std::uint32_t, bap::RouteKey> entries;

    static ForwardingTable from_flows(const FlowTable& flows)
    {
        ForwardingTable t;
        for (const auto& [id, f] : flows) t.entries[f.teid] = {bap::address_of(f.dst), bap::kDefaultPath};
        return t;
    }
};

struct Packet {
    std::uint64_t pkt_id = 0;
    int flow_id = 0;
    std::uint32_t payload_bytes = 0;
    double created_at_s = 0.0;
    std::optional<std::uint32_t> tunnel_teid;
    std::optional<bap::Header> bap_header;

    [[nodiscard]] std::uint32_t size_bytes() const
    {
        return payload_bytes + (tunnel_teid ? kTunnelOverheadBytes : 0) + (bap_header ? kBapHeaderBytes : 0);
    }

    friend bool operator==(const Packet&, const Packet&) = default;
};

/// PDU traffic: inner tunnel (36 B) + BAP header (3 B). Non-PDU: BAP header
/// only, with the LAN flag set. Throws RoutingError without a forwarding entry.
inline Packet encapsulate(Packet p, const Flow& flow, const ForwardingTable& fwd)
{
    auto it = fwd.entries.find(flow.teid);
    if (it == fwd.entries.end()) {
        throw RoutingError("no forwarding entry for TEID " + std::to_string(flow.teid));
    }
    bap::Header h;
    h.dc = false;
    h.dest = it->second.dest;
    h.path = it->second.path;
    if (flow.kind == TrafficKind::pdu) {
        p.tunnel_teid = flow.teid;
        h.r_bits = 0;
    } else {
        p.tunnel_teid.reset();
        h.r_bits = bap::kLanFlag;
    }
    p.bap_header = h;
    return p;
}

inline Packet decapsulate(Packet p)
{
    p.tunnel_teid.reset();
    p.bap_header.reset();
    return p;
}

enum class Outcome { in_flight, delivered, dropped_overflow, dropped_no_route };

inline std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::in_flight: return "in_flight";
    case Outcome::delivered: return "delivered";
    case Outcome::dropped_overflow: return "dropped_overflow";
    case Outcome::dropped_no_route: return "dropped_no_route";
    }
    return "?";
}

inline Outcome outcome_from_string(std::string_view s)
{
    if (s == "in_flight") return Outcome::in_flight;
    if (s == "delivered") return Outcome::delivered;
    if (s == "dropped_overflow") return Outcome::dropped_overflow;
    if (s == "dropped_no_route") return Outcome::dropped_no_route;
    throw ConfigError("unknown packet outcome '" + std::string(s) + "'");
}

struct PacketRecord {
    std::uint64_t pkt_id = 0;
    int flow_id = 0;
    FlowDirection direction = FlowDirection::dl;
    TrafficKind kind = TrafficKind::non_pdu;
    std::uint32_t size_bytes = 0;
    double created_at_s = 0.0;
    std::optional<double> delivered_at_s;
    std::vector<std::uint16_t> hop_trace;
    Outcome outcome = Outcome::in_flight;
};

enum class EnqueueResult { accepted, dropped_overflow };

/// RLC-UM style FIFO with drop-tail on a byte budget.
class RlcQueue {
public:
    explicit RlcQueue(std::uint64_t max_bytes = 5'000'000) : max_bytes_(max_bytes) {}

    EnqueueResult enqueue(Packet p)
    {
        const auto sz = p.size_bytes();
        if (cur_bytes_ + sz > max_bytes_) {
            ++dropped_;
            return EnqueueResult::dropped_overflow;
        }
        cur_bytes_ += sz;
        fifo_.push_back(std::move(p));
        return EnqueueResult::accepted;
    }

    /// Removes the longest FIFO prefix whose total size fits budget_bits.
    /// No segmentation: a head packet larger than the budget stays queued.
    std::vector<Packet> dequeue_up_to(std::int64_t budget_bits)
    {
        std::vector<Packet> out;
        std::int64_t left = budget_bits;
        while (!fifo_.empty()) {
            const std::int64_t bits = 8LL * fifo_.front().size_bytes();
            if (bits > left) break;
            left -= bits;
            cur_bytes_ -= fifo_.front().size_bytes();
            out.push_back(std::move(fifo_.front()));
            fifo_.pop_front();
        }
        return out;
    }

    [[nodiscard]] bool empty() const { return fifo_.empty(); }
    [[nodiscard]] std::size_t size() const { return fifo_.size(); }
    [[nodiscard]] std::uint64_t cur_bytes() const { return cur_bytes_; }
    [[nodiscard]] std::uint64_t max_bytes() const { return max_bytes_; }
    [[nodiscard]] std::uint64_t dropped() const { return dropped_; }
    [[nodiscard]] const std::deque<Packet>& contents() const { return fifo_; }

private:
    std::uint64_t max_bytes_;
    std::uint64_t cur_bytes_ = 0;
    std::uint64_t dropped_ = 0;
    std::deque<Packet> fifo_;
};

} // namespace iabsim
