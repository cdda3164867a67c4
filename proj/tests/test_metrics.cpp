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

#include "iabsim/engine.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace iabsim;

namespace {

/// Rank-interpolated percentile written from the definition on an unsorted copy.
double oracle_percentile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const double lo = std::floor(h);
    const double hi = std::ceil(h);
    const double a = v[static_cast<std::size_t>(lo)];
    const double b = v[static_cast<std::size_t>(hi)];
    return a + (h - lo) * (b - a);
}

PacketRecord record(std::uint64_t id, FlowDirection d, double created, std::optional<double> delivered,
                    Outcome o, std::uint32_t size = 100)
{
    PacketRecord p;
    p.pkt_id = id;
    p.flow_id = d == FlowDirection::dl ? 1 : 2;
    p.direction = d;
    p.size_bytes = size;
    p.created_at_s = created;
    p.delivered_at_s = delivered;
    p.outcome = o;
    p.hop_trace = {1, 2};
    return p;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Quantiles, MatchOracle)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 10.0);
    for (int n : {1, 2, 3, 4, 5, 10, 101, 1000}) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(nd(rng));
        const auto q = quantiles(v);
        ASSERT_TRUE(q);
        EXPECT_EQ(q->count, static_cast<std::size_t>(n));
        EXPECT_DOUBLE_EQ(q->min, *std::min_element(v.begin(), v.end()));
        EXPECT_DOUBLE_EQ(q->max, *std::max_element(v.begin(), v.end()));
        EXPECT_NEAR(q->p25, oracle_percentile(v, 0.25), 1e-12);
        EXPECT_NEAR(q->p50, oracle_percentile(v, 0.5), 1e-12);
        EXPECT_NEAR(q->p75, oracle_percentile(v, 0.75), 1e-12);
    }
    EXPECT_FALSE(quantiles({}));
    EXPECT_DOUBLE_EQ(quantiles({1.0, 2.0, 3.0, 4.0})->p50, 2.5);
    EXPECT_THROW(percentile_sorted({}, 0.5), DomainError);
    EXPECT_THROW(percentile_sorted({1.0}, 1.5), DomainError);
}

TEST(Summarize, CountsAndWarmup)
{
    std::vector<PacketRecord> pk = {
        record(0, FlowDirection::dl, 0.005, 0.006, Outcome::delivered),
        record(1, FlowDirection::dl, 0.02, 0.021, Outcome::delivered),
        record(2, FlowDirection::dl, 0.03, std::nullopt, Outcome::dropped_overflow),
        record(3, FlowDirection::dl, 0.04, std::nullopt, Outcome::in_flight),
        record(4, FlowDirection::dl, 0.05, 0.053, Outcome::delivered),
    };
    const auto s = summarize({}, pk, 0.01);
    EXPECT_EQ(s.dl.traffic.generated, 4u);
    EXPECT_EQ(s.dl.traffic.delivered, 2u);
    EXPECT_EQ(s.dl.traffic.dropped, 1u);
    EXPECT_DOUBLE_EQ(*s.dl.traffic.pdr, 0.5);
    EXPECT_NEAR(s.dl.traffic.latency_ms->p50, 2.0, 1e-9);
    EXPECT_DOUBLE_EQ(s.dl.traffic.offered_bits, 3200.0);
    EXPECT_DOUBLE_EQ(s.dl.traffic.carried_bits, 1600.0);
    EXPECT_FALSE(s.ul.traffic.pdr);
    ASSERT_EQ(s.flows.size(), 1u);
    EXPECT_EQ(s.flows[0].traffic.generated, 4u);
}

TEST(Summarize, InterferenceNoneShare)
{
    std::vector<LinkRow> rows(4);
    rows[0].interference_dbm = -80.0;
    rows[3].direction = FlowDirection::ul;
    for (auto& r : rows) r.snr_db = r.sinr_db = 10.0;
    const auto s = summarize(rows, {}, 0.0);
    EXPECT_EQ(s.dl.link_samples, 3u);
    EXPECT_NEAR(s.dl.interference_none_share, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(s.dl.interference_dbm->count, 1u);
    EXPECT_DOUBLE_EQ(s.ul.interference_none_share, 1.0);
    EXPECT_FALSE(s.ul.interference_dbm);
}

TEST(Csv, NumberFormattingRoundTrips)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-200.0, 200.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(parse_double(fmt_double(v)), v);
    }
    EXPECT_EQ(fmt_double(0.1), "0.1");
    EXPECT_EQ(fmt_double(375.0), "375");
    EXPECT_EQ(parse_double("none"), kNegInf);
    EXPECT_THROW(parse_double("12x"), ConfigError);
    EXPECT_THROW(parse_int<int>("1.5"), ConfigError);
}

TEST(Csv, HeadersAreStable)
{
    std::ostringstream a, b, c;
    write_links_csv(a, {});
    write_packets_csv(b, {});
    write_summary_csv(c, Summary{});
    EXPECT_EQ(a.str(), "slot,tx,rx,direction,pl_db,rain_db,g_tx_db,g_rx_db,rx_power_dbm,snr_db,interference_dbm,"
                       "sinr_db,scheduled,deep_null\n");
    EXPECT_EQ(b.str(), "pkt_id,flow_id,direction,kind,size_bytes,created_at_s,delivered_at_s,outcome,hops\n");
    const std::string summary = c.str();
    EXPECT_EQ(summary.substr(0, summary.find('\n')), kSummaryHeader);
    // Two direction rows, each with every column.
    const auto lines = split(summary, '\n');
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(split(lines[1], ',').size(), split(lines[0], ',').size());
    EXPECT_NE(lines[1].find("null"), std::string::npos);
}

TEST(Csv, BundleRoundTripAndResummarize)
{
    auto s = builtin_topology(3);
    s.duration_s = 0.03;
    const auto b = run(s);
    const std::filesystem::path dir = std::filesystem::path(IABSIM_TEST_TMP) / "metrics_bundle";
    std::filesystem::remove_all(dir);
    write_bundle(b, dir);

    std::ifstream lf(dir / "links.csv");
    const auto links = read_links_csv(lf);
    EXPECT_EQ(links, b.links);

    std::ifstream pf(dir / "packets.csv");
    const auto packets = read_packets_csv(pf);
    ASSERT_EQ(packets.size(), b.packets.size());
    for (std::size_t i = 0; i < packets.size(); ++i) {
        EXPECT_EQ(packets[i].pkt_id, b.packets[i].pkt_id);
        EXPECT_EQ(packets[i].created_at_s, b.packets[i].created_at_s);
        EXPECT_EQ(packets[i].delivered_at_s, b.packets[i].delivered_at_s);
        EXPECT_EQ(packets[i].hop_trace, b.packets[i].hop_trace);
        EXPECT_EQ(packets[i].outcome, b.packets[i].outcome);
    }
    EXPECT_EQ(summary_csv(summarize(links, packets, b.warmup_s)), slurp(dir / "summary.csv"));

    const auto run_json = nlohmann::json::parse(slurp(dir / "run.json"));
    EXPECT_EQ(run_json.at("seed").get<std::uint64_t>(), s.seed);
    EXPECT_EQ(run_json.at("nodes").size(), 9u);
}

TEST(Csv, RejectsWrongHeaderOrWidth)
{
    std::istringstream bad_header("slot,tx\n");
    EXPECT_THROW(read_links_csv(bad_header), ConfigError);
    std::istringstream short_row(std::string(kPacketsHeader) + "\n1,2,dl\n");
    EXPECT_THROW(read_packets_csv(short_row), ConfigError);
}
