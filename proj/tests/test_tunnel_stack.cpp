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

#include "iabsim/tunnel_stack.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace iabsim;

namespace {

Flow flow(int id, FlowDirection d, TrafficKind k, NodeId src, NodeId dst)
{
    return {id, src, dst, d, 0x100u + static_cast<std::uint32_t>(id), k};
}

Packet pkt(std::uint64_t id, std::uint32_t payload)
{
    Packet p;
    p.pkt_id = id;
    p.payload_bytes = payload;
    return p;
}

} // namespace

TEST(FlowTable, ClassifyAndErrors)
{
    FlowTable t;
    t.add(flow(1, FlowDirection::dl, TrafficKind::pdu, 0, 3));
    t.add(flow(2, FlowDirection::ul, TrafficKind::pdu, 3, 0));
    EXPECT_EQ(t.classify(1), 0x101u);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_THROW((void)t.classify(9), ClassificationError);
    EXPECT_THROW(t.add(flow(1, FlowDirection::dl, TrafficKind::pdu, 0, 4)), ConfigError);
    Flow dup = flow(3, FlowDirection::dl, TrafficKind::pdu, 0, 4);
    dup.teid = 0x101u;
    EXPECT_THROW(t.add(dup), ConfigError);
}

TEST(Encapsulation, PduGetsTunnelAndBapHeader)
{
    FlowTable t;
    const auto f = flow(1, FlowDirection::dl, TrafficKind::pdu, 0, 3);
    t.add(f);
    const auto fwd = ForwardingTable::from_flows(t);
    const auto p = encapsulate(pkt(7, 1000), f, fwd);
    ASSERT_TRUE(p.tunnel_teid && p.bap_header);
    EXPECT_EQ(*p.tunnel_teid, f.teid);
    EXPECT_EQ(p.bap_header->dest, bap::address_of(3));
    EXPECT_FALSE(p.bap_header->lan());
    EXPECT_EQ(p.size_bytes(), 1000u + 36u + 3u);
}

TEST(Encapsulation, NonPduBypassesTunnelWithLanFlag)
{
    FlowTable t;
    const auto f = flow(2, FlowDirection::ul, TrafficKind::non_pdu, 4, 0);
    t.add(f);
    const auto p = encapsulate(pkt(8, 500), f, ForwardingTable::from_flows(t));
    EXPECT_FALSE(p.tunnel_teid);
    ASSERT_TRUE(p.bap_header);
    EXPECT_TRUE(p.bap_header->lan());
    EXPECT_EQ(p.bap_header->dest, bap::address_of(0));
    EXPECT_EQ(p.size_bytes(), 503u);
}

TEST(Encapsulation, RoundTripRestoresPayload)
{
    FlowTable t;
    const auto f = flow(1, FlowDirection::dl, TrafficKind::pdu, 0, 3);
    t.add(f);
    Packet original = pkt(3, 321);
    original.flow_id = 1;
    original.created_at_s = 0.25;
    EXPECT_EQ(decapsulate(encapsulate(original, f, ForwardingTable::from_flows(t))), original);
}

TEST(Encapsulation, MissingForwardingEntryIsRoutingError)
{
    const auto f = flow(1, FlowDirection::dl, TrafficKind::pdu, 0, 3);
    EXPECT_THROW(encapsulate(pkt(1, 10), f, ForwardingTable{}), RoutingError);
}

TEST(RlcQueue, DropTailOnByteBudget)
{
    RlcQueue q(1000);
    EXPECT_EQ(q.enqueue(pkt(1, 600)), EnqueueResult::accepted);
    EXPECT_EQ(q.enqueue(pkt(2, 600)), EnqueueResult::dropped_overflow);
    EXPECT_EQ(q.enqueue(pkt(3, 400)), EnqueueResult::accepted);
    EXPECT_EQ(q.cur_bytes(), 1000u);
    EXPECT_EQ(q.dropped(), 1u);
    EXPECT_EQ(q.size(), 2u);
}

TEST(RlcQueue, DequeueEdgeCases)
{
    RlcQueue q;
    for (std::uint64_t i = 0; i < 5; ++i) q.enqueue(pkt(i, 100));
    EXPECT_TRUE(q.dequeue_up_to(0).empty());
    EXPECT_EQ(q.dequeue_up_to(8 * 250).size(), 2u); // 2.5 packets -> 2
    EXPECT_EQ(q.dequeue_up_to(1'000'000).size(), 3u);
    EXPECT_TRUE(q.empty());
    EXPECT_EQ(q.cur_bytes(), 0u);
}

TEST(RlcQueue, DequeueMatchesPrefixSumOracle)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        RlcQueue q;
        std::vector<std::uint32_t> sizes;
        const int n = 1 + static_cast<int>(rng() % 20);
        for (int i = 0; i < n; ++i) {
            sizes.push_back(1 + static_cast<std::uint32_t>(rng() % 1500));
            q.enqueue(pkt(static_cast<std::uint64_t>(i), sizes.back()));
        }
        const std::int64_t budget = static_cast<std::int64_t>(rng() % 100'000);
        std::size_t expect = 0;
        std::int64_t acc = 0;
        while (expect < sizes.size() && acc + 8LL * sizes[expect] <= budget) acc += 8LL * sizes[expect++];
        const auto out = q.dequeue_up_to(budget);
        ASSERT_EQ(out.size(), expect);
        for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].pkt_id, i);
        const auto rest = std::accumulate(sizes.begin() + static_cast<long>(expect), sizes.end(), std::uint64_t{0});
        EXPECT_EQ(q.cur_bytes(), rest);
    }
}

TEST(Outcome, StringRoundTrip)
{
    for (auto o : {Outcome::in_flight, Outcome::delivered, Outcome::dropped_overflow, Outcome::dropped_no_route}) {
        EXPECT_EQ(outcome_from_string(to_string(o)), o);
    }
    EXPECT_THROW(outcome_from_string("lost"), ConfigError);
}
