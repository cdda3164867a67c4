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

#include "iabsim/scenario_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

using namespace iabsim;

namespace {

std::string parent_of(const Scenario& s, const std::string& name)
{
    for (const auto& n : s.nodes) {
        if (n.name == name) return n.parent.value_or("");
    }
    return "?";
}

int layer_of(const Scenario& s, const std::string& name)
{
    const auto t = validate(s);
    return t.layer[static_cast<std::size_t>(t.index.at(name))];
}

std::string minimal_json(const std::string& extra = "")
{
    return R"({"schema_version": 1, "nodes": [
        {"id": "d", "role": "donor", "position": [0, 0]},
        {"id": "a", "parent": "d", "position": [0, 500]})" +
           extra + "]}";
}

} // namespace

TEST(Builtin, DepthsAndDonors)
{
    EXPECT_EQ(validate(builtin_topology(1)).max_depth(), 1);
    EXPECT_EQ(validate(builtin_topology(2)).max_depth(), 2);
    EXPECT_EQ(validate(builtin_topology(3)).max_depth(), 3);
    EXPECT_EQ(validate(builtin_topology(4)).max_depth(), 3);
    EXPECT_EQ(validate(builtin_topology(4)).donor_count(), 2);
    for (int k = 1; k <= 3; ++k) EXPECT_EQ(validate(builtin_topology(k)).donor_count(), 1);
    EXPECT_THROW(builtin_topology(0), ConfigError);
    EXPECT_THROW(builtin_topology(5), ConfigError);
}

TEST(Builtin, ParentRelations)
{
    const auto t1 = builtin_topology(1);
    for (int i = 1; i <= 8; ++i) EXPECT_EQ(parent_of(t1, "n" + std::to_string(i)), "donor");
    const auto t3 = builtin_topology(3);
    EXPECT_EQ(parent_of(t3, "n7"), "n5");
    EXPECT_EQ(parent_of(t3, "n8"), "n6");
    EXPECT_EQ(layer_of(t3, "n7"), 3);
    const auto t4 = builtin_topology(4);
    EXPECT_EQ(parent_of(t4, "n1"), "donor2");
    EXPECT_EQ(parent_of(t4, "n4"), "donor2");
    EXPECT_EQ(parent_of(t4, "n8"), "n6");
    const auto topo = validate(t4);
    EXPECT_EQ(topo.donor[static_cast<std::size_t>(topo.index.at("n7"))], topo.index.at("donor2"));
    EXPECT_EQ(topo.donor[static_cast<std::size_t>(topo.index.at("n8"))], topo.index.at("donor"));
}

TEST(Builtin, ReferenceGeometry)
{
    const auto s = builtin_topology(2);
    EXPECT_EQ(s.nodes.front().name, "donor");
    EXPECT_DOUBLE_EQ(s.nodes.front().x_m, 800.0);
    EXPECT_DOUBLE_EQ(s.nodes.front().height_m, 20.0);
    for (std::size_t i = 1; i < s.nodes.size(); ++i) {
        EXPECT_DOUBLE_EQ(s.nodes[i].height_m, 10.0);
        EXPECT_EQ(s.nodes[i].velocity, (Vec3{5.0, 0.0, 0.0}));
    }
    EXPECT_EQ(s.pattern.name, "4DS2U");
    EXPECT_EQ(s.mux.n_s_odd, 6);
    EXPECT_EQ(s.numerology.index, 3);
    EXPECT_DOUBLE_EQ(s.duration_s, 2.0);
    EXPECT_EQ(s.slot_count(), 16000);
    EXPECT_DOUBLE_EQ(s.traffic_stop_s(), 1.99);
}

TEST(Validation, TopologyErrors)
{
    auto s = builtin_topology(2);
    s.nodes[1].parent = "nowhere";
    EXPECT_THROW(validate(s), TopologyError);

    s = builtin_topology(2);
    s.nodes[1].parent = s.nodes[1].name;
    EXPECT_THROW(validate(s), TopologyError);

    s = builtin_topology(2);
    // n1 -> n4 while n4 -> n1
    s.nodes[1].parent = "n4";
    EXPECT_THROW(validate(s), TopologyError);

    s = builtin_topology(1);
    s.nodes[0].parent = "n1";
    EXPECT_THROW(validate(s), TopologyError);

    s = builtin_topology(1);
    s.nodes[2].name = "n1";
    EXPECT_THROW(validate(s), TopologyError);

    s = builtin_topology(1);
    s.nodes[0].role = NodeRole::node;
    s.nodes[0].parent = "n1";
    EXPECT_THROW(validate(s), TopologyError);
}

TEST(Validation, ParameterErrors)
{
    auto s = builtin_topology(1);
    s.channel.reflection_coeff = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate(s), ConfigError);
    s = builtin_topology(1);
    s.channel.rain_rate_mmh = -1.0;
    EXPECT_THROW(validate(s), ConfigError);
    s = builtin_topology(1);
    s.mux.n_s_odd = 13;
    EXPECT_THROW(validate(s), ConfigError);
    s = builtin_topology(1);
    s.duration_s = 0.0;
    EXPECT_THROW(validate(s), ConfigError);
    s = builtin_topology(1);
    s.nodes[3].height_m = 0.0;
    EXPECT_THROW(validate(s), ConfigError);
    s = builtin_topology(1);
    s.flows = {{1, "donor", FlowDirection::dl, TrafficKind::pdu, std::nullopt}};
    EXPECT_THROW(validate(s), ConfigError);
    s.flows = {{1, "n1", FlowDirection::dl, TrafficKind::pdu, std::nullopt},
               {1, "n2", FlowDirection::dl, TrafficKind::pdu, std::nullopt}};
    EXPECT_THROW(validate(s), ConfigError);
}

TEST(Json, RoundTripPreservesEveryField)
{
    for (int k = 1; k <= 4; ++k) {
        auto s = builtin_topology(k);
        s.channel.rain_rate_mmh = 30.0;
        s.mux.mode = MuxMode::fdm;
        s.mux.du_bandwidth_fraction = 0.4;
        s.mux.extra_control = ExtraControl{2, 4};
        s.traffic.stop_s = 1.5;
        s.traffic.dl_rate_bps = 100e6;
        s.flows = {{7, "n3", FlowDirection::ul, TrafficKind::pdu, 1e6}};
        s.nodes[1].mt_boresight_az_deg = 45.0;
        s.seed = 0xDEADBEEFCAFEULL;
        const auto j = to_json(s);
        const auto back = scenario_from_json(j);
        EXPECT_EQ(to_json(back), j) << "topology " << k;
        EXPECT_EQ(back.seed, s.seed);
        EXPECT_EQ(back.nodes.size(), s.nodes.size());
        EXPECT_EQ(dump_scenario(back), dump_scenario(s));
    }
}

TEST(Json, TopologyShorthandWithOverrides)
{
    const auto s = parse_scenario(R"({"schema_version": 1, "topology": 3,
        "channel": {"rain_rate_mmh": 50}, "tdd": "3DS2U",
        "multiplexing": {"mode": "tdm", "n_s_odd": 8}})");
    EXPECT_EQ(s.nodes.size(), 9u);
    EXPECT_DOUBLE_EQ(s.channel.rain_rate_mmh, 50.0);
    EXPECT_EQ(s.pattern.period(), 6u);
    EXPECT_EQ(s.mux.n_s_odd, 8);
    EXPECT_EQ(parent_of(s, "n7"), "n5");
}

TEST(Json, NodesDefaultRolesAndHeights)
{
    const auto s = parse_scenario(minimal_json());
    ASSERT_EQ(s.nodes.size(), 2u);
    EXPECT_EQ(s.nodes[0].role, NodeRole::donor);
    EXPECT_DOUBLE_EQ(s.nodes[0].height_m, 20.0);
    EXPECT_EQ(s.nodes[1].role, NodeRole::node);
    EXPECT_DOUBLE_EQ(s.nodes[1].height_m, 10.0);
}

TEST(Json, CustomTddSequence)
{
    const auto s = parse_scenario(R"({"schema_version": 1, "topology": 1,
        "tdd": {"name": "dsu", "sequence": ["DL", "SW", "UL"]}})");
    EXPECT_EQ(s.pattern.sequence, (std::vector<SlotType>{SlotType::DL, SlotType::SW, SlotType::UL}));
}

TEST(Json, RejectsUnknownKeysAndMissingVersion)
{
    EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "topology": 1, "colour": "red"})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "topology": 1, "channel": {"freq": 26}})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"topology": 1})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"schema_version": 2, "topology": 1})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "topology": 1, "duration_s": "long"})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"schema_version": 1, "topology": 1, "tdd": "DXU"})"), ConfigError);
}

TEST(Json, TopologyErrorsSurfaceFromFiles)
{
    EXPECT_THROW(parse_scenario(minimal_json(R"(, {"id": "b", "parent": "zz", "position": [1, 1]})")),
                 TopologyError);
    EXPECT_THROW(parse_scenario(minimal_json(R"(, {"id": "a", "parent": "d", "position": [1, 1]})")),
                 TopologyError);
}

TEST(Json, SyntaxErrorReportsBytePosition)
{
    try {
        (void)parse_scenario("{\"schema_version\": 1,, }");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("byte 22"), std::string::npos) << msg;
    }
}

TEST(Json, FileRoundTrip)
{
    const std::filesystem::path dir = IABSIM_TEST_TMP;
    std::filesystem::create_directories(dir);
    const auto path = (dir / "scenario_roundtrip.json").string();
    auto s = builtin_topology(4);
    s.name = "file-test";
    save_scenario(s, path);
    EXPECT_EQ(to_json(load_scenario(path)), to_json(s));
    EXPECT_THROW(load_scenario((dir / "does_not_exist.json").string()), ConfigError);
}
