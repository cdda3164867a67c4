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

#include "iabsim/traffic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace iabsim;

TEST(Traffic, MeanPacketSizes)
{
    EXPECT_DOUBLE_EQ(mean_packet_bytes(60e6, 50e-6), 375.0);
    EXPECT_DOUBLE_EQ(mean_packet_bytes(140e6, 50e-6), 875.0);
    EXPECT_DOUBLE_EQ(mean_packet_bytes(100e6, 50e-6), 625.0);
    TrafficSpec s;
    s.dl_rate_bps = 60e6;
    s.ul_rate_factor = 0.1;
    EXPECT_DOUBLE_EQ(s.ul_rate_bps(), 6e6);
}

TEST(Traffic, IntegralSizesAreConstant)
{
    CbrSource src(60e6, 50e-6, 0.0, 1.0);
    const auto pk = src.generate(0.0, 0.01);
    ASSERT_EQ(pk.size(), 200u);
    for (std::size_t i = 0; i < pk.size(); ++i) {
        EXPECT_EQ(pk[i].size_bytes, 375u);
        EXPECT_NEAR(pk[i].created_at_s, 50e-6 * static_cast<double>(i), 1e-15);
    }
}

TEST(Traffic, ByteCreditTracksRate)
{
    // 7 Mb/s at 50 us: 43.75 B per packet.
    CbrSource src(7e6, 50e-6, 0.0, 1.0);
    const auto pk = src.generate(0.0, 1.0);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < pk.size(); ++k) {
        EXPECT_TRUE(pk[k].size_bytes == 43u || pk[k].size_bytes == 44u);
        total += pk[k].size_bytes;
        const double ideal = 43.75 * static_cast<double>(k + 1);
        EXPECT_LE(std::abs(static_cast<double>(total) - ideal), 1.0);
    }
    EXPECT_EQ(pk.size(), 20000u);
    EXPECT_EQ(total, 875000u);
}

TEST(Traffic, WindowedGenerationEqualsOneShot)
{
    CbrSource a(13e6, 50e-6, 0.001, 0.02, 17e-6);
    CbrSource b(13e6, 50e-6, 0.001, 0.02, 17e-6);
    const auto all = a.generate(0.0, 1.0);
    std::vector<GeneratedPacket> pieces;
    for (int s = 0; s < 200; ++s) {
        const auto w = b.generate(s * 125e-6, (s + 1) * 125e-6);
        for (const auto& p : w) {
            EXPECT_GE(p.created_at_s, s * 125e-6);
            EXPECT_LT(p.created_at_s, (s + 1) * 125e-6);
        }
        pieces.insert(pieces.end(), w.begin(), w.end());
    }
    ASSERT_EQ(all.size(), pieces.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].size_bytes, pieces[i].size_bytes);
        EXPECT_EQ(all[i].created_at_s, pieces[i].created_at_s);
    }
    EXPECT_GE(all.front().created_at_s, 0.001);
    EXPECT_LT(all.back().created_at_s, 0.02);
}

TEST(Traffic, ZeroRateProducesNothing)
{
    CbrSource src(0.0, 50e-6, 0.0, 1.0);
    EXPECT_TRUE(src.generate(0.0, 1.0).empty());
}

TEST(Traffic, Validation)
{
    EXPECT_THROW(CbrSource(60e6, 0.0, 0.0, 1.0), ConfigError);
    EXPECT_THROW(CbrSource(100.0, 50e-6, 0.0, 1.0), ConfigError);
    TrafficSpec s;
    EXPECT_NO_THROW(s.validate());
    s.dl_rate_bps = -1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = TrafficSpec{};
    s.start_s = 0.5;
    s.stop_s = 0.2;
    EXPECT_THROW(s.validate(), ConfigError);
    s = TrafficSpec{};
    s.inter_packet_interval_s = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
}
