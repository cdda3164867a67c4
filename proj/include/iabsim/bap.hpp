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

// Backhaul Adaptation Protocol: Data PDU header codec, spanning-tree routing
// tables and the per-node forwarding decision.
//
// Wire layout (MSB first):
//
//   byte 0   | D/C | R2 | R1 | R0 | DEST9 .. DEST6 |
//   byte 1   | DEST5 .. DEST0            | PATH9 PATH8 |
//   byte 2   | PATH7 .. PATH0                          |
//
// R0 (the rightmost reserved bit) flags LAN / non-PDU traffic.

#include "iabsim/core.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace iabsim::bap {

using Address = std::uint16_t;
using PathId = std::uint16_t;

inline constexpr std::uint16_t kMaxField = 1023;
inline constexpr std::uint8_t kLanFlag = 0x1;
inline constexpr PathId kDefaultPath = 1;

struct Header {
    bool dc = false; // false = Data PDU
    Address dest = 0;
    PathId path = 0;
    std::uint8_t r_bits = 0;

    [[nodiscard]] bool lan() const { return (r_bits & kLanFlag) != 0; }
    friend bool operator==(const Header&, const Header&) = default;
};

using Bytes = std::array<std::uint8_t, 3>;

inline Bytes encode_header(const Header& h)
{
    if (h.dest > kMaxField) throw RangeError("BAP destination must be < 1024");
    if (h.path > kMaxField) throw RangeError("BAP path id must be < 1024");
    if (h.r_bits > 0x7) throw RangeError("BAP reserved field is 3 bits");
    const std::uint32_t word = (static_cast<std::uint32_t>(h.dc) << 23) |
                               (static_cast<std::uint32_t>(h.r_bits) << 20) |
                               (static_cast<std::uint32_t>(h.dest) << 10) | h.path;
    return {static_cast<std::uint8_t>(word >> 16), static_cast<std::uint8_t>(word >> 8),
            static_cast<std::uint8_t>(word)};
}

inline Header decode_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != 3) {
        throw FramingError("BAP data header is 3 bytes, got " + std::to_string(bytes.size()));
    }
    const std::uint32_t word = (static_cast<std::uint32_t>(bytes[0]) << 16) |
                               (static_cast<std::uint32_t>(bytes[1]) << 8) | bytes[2];
    Header h;
    h.dc = (word >> 23) & 0x1;
    h.r_bits = static_cast<std::uint8_t>((word >> 20) & 0x7);
    h.dest = static_cast<Address>((word >> 10) & 0x3ff);
    h.path = static_cast<PathId>(word & 0x3ff);
    return h;
}

enum class Direction { uplink, downlink };

struct RouteKey {
    Address dest = 0;
    PathId path = 0;
    friend auto operator<=>(const RouteKey&, const RouteKey&) = default;
};

struct RoutingTable {
    Direction direction = Direction::downlink;
    std::map<RouteKey, int> entries; // -> next-hop node index

    [[nodiscard]] std::optional<int> lookup(Address dest, PathId path) const
    {
        auto it = entries.find({dest, path});
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }
};

struct NodeTables {
    Address address = 0;
    RoutingTable ul{Direction::uplink, {}};
    RoutingTable dl{Direction::downlink, {}};
};

/// Node index -> BAP address. Address 0 is reserved.
inline Address address_of(int node_index)
{
    if (node_index < 0 || node_index >= static_cast<int>(kMaxField)) {
        throw RangeError("node index does not fit a BAP address");
    }
    return static_cast<Address>(node_index + 1);
}

inline int node_of(Address a) { return static_cast<int>(a) - 1; }

/// Depth of every node in a parent-pointer forest (roots at depth 0).
/// Throws TopologyError on cycles or dangling parents.
inline std::vector<int> forest_depths(std::span<const std::optional<int>> parent)
{
    const int n = static_cast<int>(parent.size());
    std::vector<int> depth(n, -1);
    for (int i = 0; i < n; ++i) {
        if (parent[i] && (*parent[i] < 0 || *parent[i] >= n)) {
            throw TopologyError("node " + std::to_string(i) + " references unknown parent");
        }
        if (parent[i] && *parent[i] == i) throw TopologyError("node " + std::to_string(i) + " is its own parent");
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> chain;
        int cur = i;
        while (depth[cur] < 0 && parent[cur]) {
            chain.push_back(cur);
            if (static_cast<int>(chain.size()) > n) throw TopologyError("cycle in parent relation");
            cur = *parent[cur];
        }
        if (depth[cur] < 0) depth[cur] = 0;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth[*it] = depth[*parent[*it]] + 1;
    }
    return depth;
}

/// Builds UL/DL tables for a forest given as parent pointers; roots are the donors.
/// DL at n: every descendant d -> the child whose subtree holds d.
/// UL at n (non-root): the tree's donor -> parent.
inline std::vector<NodeTables> build_routing_tables(std::span<const std::optional<int>> parent)
{
    forest_depths(parent); // validates
    const int n = static_cast<int>(parent.size());
    std::vector<NodeTables> tables(n);
    for (int i = 0; i < n; ++i) tables[i].address = address_of(i);

    for (int d = 0; d < n; ++d) {
        // Walk from d to its root; at each ancestor, the previous hop is the child to use.
        int child = d;
        int cur = parent[d].value_or(-1);
        while (cur >= 0) {
            tables[cur].dl.entries[{address_of(d), kDefaultPath}] = child;
            child = cur;
            cur = parent[cur].value_or(-1);
        }
        const int root = child;
        if (parent[d]) tables[d].ul.entries[{address_of(root), kDefaultPath}] = *parent[d];
    }
    return tables;
}

struct DeliverUpper {};
struct DeliverLan {};
struct ForwardTo {
    int next_hop = -1;
};

using Decision = std::variant<DeliverUpper, DeliverLan, ForwardTo>;

/// Destination check, then DL lookup, then UL lookup. Throws RoutingError
/// when neither table has the (dest, path) entry.
inline Decision forward(const NodeTables& node, const Header& h)
{
    if (h.dest == node.address) {
        if (h.lan()) return DeliverLan{};
        return DeliverUpper{};
    }
    if (auto nh = node.dl.lookup(h.dest, h.path)) return ForwardTo{*nh};
    if (auto nh = node.ul.lookup(h.dest, h.path)) return ForwardTo{*nh};
    throw RoutingError("node " + std::to_string(node.address) + " has no route to " + std::to_string(h.dest) +
                       "/" + std::to_string(h.path));
}

} // namespace iabsim::bap
