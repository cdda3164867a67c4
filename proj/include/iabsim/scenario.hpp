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

// Scenario description: nodes and their tree, radio/channel settings, frame
// structure, multiplexing, traffic and run control. Defaults follow the
// maritime reference configuration (26 GHz, 400 MHz, 30 dBm, 64-element UPAs
// with 13 dBi elements, numerology 3, 4DS2U, TDM with 6 odd-layer symbols).

#include "iabsim/bap.hpp"
#include "iabsim/mac_scheduler.hpp"
#include "iabsim/traffic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iabsim {

enum class NodeRole { donor, node };

inline std::string_view to_string(NodeRole r) { return r == NodeRole::donor ? "donor" : "node"; }

inline NodeRole node_role_from_string(std::string_view s)
{
    if (s == "donor") return NodeRole::donor;
    if (s == "node") return NodeRole::node;
    throw ConfigError("unknown node role '" + std::string(s) + "'");
}

inline constexpr double kDefaultDonorHeightM = 20.0;
inline constexpr double kDefaultNodeHeightM = 10.0;
inline constexpr double kDefaultVesselSpeedMps = 5.0;
/// Traffic stops this long before the end of a run unless configured otherwise.
inline constexpr double kDefaultTrafficCooldownS = 0.01;

struct NodeConfig {
    std::string name;
    NodeRole role = NodeRole::node;
    std::optional<std::string> parent;
    /// Horizontal position in metres.
    double x_m = 0.0;
    double y_m = 0.0;
    double height_m = kDefaultNodeHeightM;
    Vec3 velocity;
    double du_boresight_az_deg = 0.0;
    /// Defaults to the bearing of the parent at t = 0.
    std::optional<double> mt_boresight_az_deg;
};

/// Explicit flow; when a scenario lists none, every IAB-node gets one DL and
/// one UL flow of the scenario's traffic kind.
struct FlowConfig {
    int flow_id = 0;
    std::string node;
    FlowDirection direction = FlowDirection::dl;
    TrafficKind kind = TrafficKind::non_pdu;
    /// Overrides the rate implied by the traffic spec.
    std::optional<double> rate_bps;
};

struct Scenario {
    int schema_version = 1;
    std::string name = "custom";
    std::vector<NodeConfig> nodes;

    ChannelParams channel;
    std::optional<std::string> rain_table_path;
    RadioConfig radio;
    /// Panel template for every DU and MT; boresights come from the node.
    UpaConfig antenna;
    Numerology numerology;
    SlotPattern pattern = SlotPattern::from_name("4DS2U");
    MultiplexMode mux;

    TrafficSpec traffic;
    TrafficKind default_kind = TrafficKind::non_pdu;
    std::vector<FlowConfig> flows;

    std::uint64_t rlc_max_bytes = 5'000'000;
    double duration_s = 2.0;
    std::uint64_t seed = 1;
    int run_count = 50;
    double warmup_fraction = 0.1;
    bool strict = true;

    [[nodiscard]] double traffic_stop_s() const
    {
        if (traffic.stop_s) return std::min(*traffic.stop_s, duration_s);
        return std::max(traffic.start_s, duration_s - kDefaultTrafficCooldownS);
    }

    [[nodiscard]] std::int64_t slot_count() const
    {
        return static_cast<std::int64_t>(std::llround(duration_s / numerology.slot_duration_s()));
    }
};

/// Parent/child structure of a validated scenario.
struct Topology {
    std::vector<std::optional<int>> parent;
    std::vector<int> layer;
    std::vector<int> donor; // root of each node's tree
    std::vector<std::vector<int>> children;
    std::map<std::string, int> index;

    [[nodiscard]] int size() const { return static_cast<int>(parent.size()); }
    [[nodiscard]] bool is_donor(int i) const { return !parent[static_cast<std::size_t>(i)].has_value(); }
    [[nodiscard]] int max_depth() const
    {
        int m = 0;
        for (int l : layer) m = std::max(m, l);
        return m;
    }
    [[nodiscard]] int donor_count() const
    {
        int c = 0;
        for (const auto& p : parent) c += p ? 0 : 1;
        return c;
    }
};

inline Topology resolve_topology(const std::vector<NodeConfig>& nodes)
{
    Topology t;
    const int n = static_cast<int>(nodes.size());
    if (n == 0) throw TopologyError("scenario has no nodes");
    if (n >= static_cast<int>(bap::kMaxField)) throw TopologyError("too many nodes for 10-bit BAP addresses");
    for (int i = 0; i < n; ++i) {
        const auto& nc = nodes[static_cast<std::size_t>(i)];
        if (nc.name.empty()) throw TopologyError("node " + std::to_string(i) + " has no name");
        if (!t.index.emplace(nc.name, i).second) throw TopologyError("duplicate node name '" + nc.name + "'");
    }
    t.parent.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& nc = nodes[static_cast<std::size_t>(i)];
        if (nc.role == NodeRole::donor) {
            if (nc.parent) throw TopologyError("donor '" + nc.name + "' must not have a parent");
            continue;
        }
        if (!nc.parent) throw TopologyError("node '" + nc.name + "' has no parent");
        if (*nc.parent == nc.name) throw TopologyError("node '" + nc.name + "' is its own parent");
        auto it = t.index.find(*nc.parent);
        if (it == t.index.end()) {
            throw TopologyError("node '" + nc.name + "' references unknown parent '" + *nc.parent + "'");
        }
        t.parent[static_cast<std::size_t>(i)] = it->second;
    }
    if (t.donor_count() == 0) throw TopologyError("scenario needs at least one donor");
    t.layer = bap::forest_depths(t.parent);
    t.donor.resize(static_cast<std::size_t>(n));
    t.children.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int cur = i;
        while (t.parent[static_cast<std::size_t>(cur)]) cur = *t.parent[static_cast<std::size_t>(cur)];
        t.donor[static_cast<std::size_t>(i)] = cur;
        if (auto p = t.parent[static_cast<std::size_t>(i)]) t.children[static_cast<std::size_t>(*p)].push_back(i);
    }
    return t;
}

/// Full validation; returns the resolved topology.
inline Topology validate(const Scenario& s)
{
    if (s.schema_version != 1) throw ConfigError("unsupported schema_version " + std::to_string(s.schema_version));
    s.channel.validate();
    s.radio.validate();
    s.antenna.validate();
    s.numerology.validate();
    s.mux.validate();
    s.traffic.validate();
    if (s.pattern.sequence.empty()) throw ConfigError("empty slot pattern");
    if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s)) throw ConfigError("duration_s must be positive");
    if (!(s.warmup_fraction >= 0.0 && s.warmup_fraction < 1.0)) throw ConfigError("warmup_fraction must be in [0, 1)");
    if (s.run_count <= 0) throw ConfigError("run_count must be positive");
    if (s.rlc_max_bytes == 0) throw ConfigError("rlc max_bytes must be positive");
    for (const auto& n : s.nodes) {
        for (double v : {n.x_m, n.y_m, n.velocity.x, n.velocity.y, n.velocity.z, n.du_boresight_az_deg}) {
            if (!std::isfinite(v)) throw ConfigError("node '" + n.name + "' has a non-finite coordinate");
        }
        if (!(n.height_m > 0.0)) throw ConfigError("node '" + n.name + "' needs a positive antenna height");
    }
    Topology t = resolve_topology(s.nodes);
    std::map<int, bool> ids;
    std::map<std::uint32_t, bool> seen;
    for (const auto& f : s.flows) {
        if (!ids.emplace(f.flow_id, true).second) throw ConfigError("duplicate flow id " + std::to_string(f.flow_id));
        auto it = t.index.find(f.node);
        if (it == t.index.end()) throw ConfigError("flow " + std::to_string(f.flow_id) + " references unknown node");
        if (t.is_donor(it->second)) throw ConfigError("flow endpoints must be IAB-nodes, not donors");
        if (f.rate_bps && !(*f.rate_bps >= 0.0)) throw ConfigError("flow rate must be non-negative");
    }
    return t;
}

/// Reference deployment positions (metres).
struct BuiltinNode {
    const char* name;
    double x;
    double y;
};

inline constexpr BuiltinNode kReferenceVessels[] = {
    {"n1", 400, 1000}, {"n2", 800, 1000}, {"n3", 1200, 1000}, {"n4", 100, 2000},
    {"n5", 500, 2000}, {"n6", 900, 2000}, {"n7", 400, 3500},  {"n8", 900, 3500},
};

/// The four reference topologies.
///   1: star, every vessel on donor (800, 0)
///   2: two layers
///   3: as 2 but n7 -> n5 and n8 -> n6 (depth 3)
///   4: second donor at (0, 0) serving n1 and n4; depth 3
inline Scenario builtin_topology(int k)
{
    if (k < 1 || k > 4) throw ConfigError("built-in topology must be 1..4, got " + std::to_string(k));
    Scenario s;
    s.name = "topology-" + std::to_string(k);

    NodeConfig donor;
    donor.name = "donor";
    donor.role = NodeRole::donor;
    donor.x_m = 800;
    donor.y_m = 0;
    donor.height_m = kDefaultDonorHeightM;
    s.nodes.push_back(donor);
    if (k == 4) {
        NodeConfig d2 = donor;
        d2.name = "donor2";
        d2.x_m = 0;
        s.nodes.push_back(d2);
    }

    std::map<std::string, std::string> parent;
    switch (k) {
    case 1:
        for (const auto& v : kReferenceVessels) parent[v.name] = "donor";
        break;
    case 2:
        parent = {{"n1", "donor"}, {"n2", "donor"}, {"n3", "donor"}, {"n4", "n1"},
                  {"n5", "n2"},    {"n6", "n3"},    {"n7", "n1"},    {"n8", "n2"}};
        break;
    case 3:
        parent = {{"n1", "donor"}, {"n2", "donor"}, {"n3", "donor"}, {"n4", "n1"},
                  {"n5", "n2"},    {"n6", "n3"},    {"n7", "n5"},    {"n8", "n6"}};
        break;
    case 4:
        parent = {{"n1", "donor2"}, {"n2", "donor"}, {"n3", "donor"}, {"n4", "donor2"},
                  {"n5", "n1"},     {"n6", "n3"},    {"n7", "n1"},    {"n8", "n6"}};
        break;
    default: break;
    }
    for (const auto& v : kReferenceVessels) {
        NodeConfig n;
        n.name = v.name;
        n.role = NodeRole::node;
        n.parent = parent.at(v.name);
        n.x_m = v.x;
        n.y_m = v.y;
        n.height_m = kDefaultNodeHeightM;
        n.velocity = {kDefaultVesselSpeedMps, 0.0, 0.0};
        s.nodes.push_back(n);
    }
    return s;
}

} // namespace iabsim
