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

// Raw per-run tables (link samples, packet records), the summary computed
// from them, and their CSV forms. The summary is a pure function of the two
// raw tables and the warm-up boundary, so it can be recomputed from CSV.

#include "iabsim/tunnel_stack.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace iabsim {

/// One link observation per tree edge per slot, in the slot's direction.
struct LinkRow {
    std::int64_t slot = 0;
    NodeId tx = -1;
    NodeId rx = -1;
    FlowDirection direction = FlowDirection::dl;
    double pl_db = 0.0;
    double rain_db = 0.0;
    double g_tx_db = 0.0;
    double g_rx_db = 0.0;
    double rx_power_dbm = 0.0;
    double snr_db = 0.0;
    double interference_dbm = kNegInf;
    double sinr_db = 0.0;
    bool scheduled = false;
    bool deep_null = false;

    friend bool operator==(const LinkRow&, const LinkRow&) = default;
};

struct Quantiles {
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// Linear interpolation between closest ranks (position q (n - 1)).
inline double percentile_sorted(const std::vector<double>& v, double q)
{
    if (v.empty()) throw DomainError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("percentile rank must lie in [0, 1]");
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

inline std::optional<Quantiles> quantiles(std::vector<double> v)
{
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    return Quantiles{v.front(), percentile_sorted(v, 0.25), percentile_sorted(v, 0.5), percentile_sorted(v, 0.75),
                     v.back(), v.size()};
}

struct TrafficStats {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    /// Undefined when nothing was generated.
    std::optional<double> pdr;
    std::optional<Quantiles> latency_ms;
    double offered_bits = 0.0;
    double carried_bits = 0.0;
};

struct FlowSummary {
    int flow_id = 0;
    FlowDirection direction = FlowDirection::dl;
    TrafficStats traffic;
};

struct DirectionSummary {
    FlowDirection direction = FlowDirection::dl;
    TrafficStats traffic;
    std::optional<Quantiles> snr_db;
    /// Over samples that saw at least one interferer.
    std::optional<Quantiles> interference_dbm;
    std::optional<Quantiles> sinr_db;
    double interference_none_share = 0.0;
    std::size_t link_samples = 0;
};

struct Summary {
    double warmup_s = 0.0;
    std::vector<FlowSummary> flows;
    DirectionSummary dl{FlowDirection::dl, {}, {}, {}, {}, 0.0, 0};
    DirectionSummary ul{FlowDirection::ul, {}, {}, {}, {}, 0.0, 0};

    [[nodiscard]] const DirectionSummary& direction(FlowDirection d) const { return d == FlowDirection::dl ? dl : ul; }
};

struct MetricsBundle {
    std::string scenario_name;
    std::uint64_t seed = 0;
    double slot_duration_s = 0.0;
    std::int64_t slot_count = 0;
    double warmup_s = 0.0;
    std::vector<std::string> node_names;
    std::vector<LinkRow> links;
    std::vector<PacketRecord> packets;
    Summary summary;
    /// Only non-zero for non-strict runs; strict runs throw instead.
    std::uint64_t half_duplex_violations = 0;
};

namespace detail {

inline void accumulate(TrafficStats& s, const PacketRecord& p, std::vector<double>& lat_ms)
{
    ++s.generated;
    s.offered_bits += 8.0 * p.size_bytes;
    if (p.outcome == Outcome::delivered) {
        ++s.delivered;
        s.carried_bits += 8.0 * p.size_bytes;
        lat_ms.push_back((*p.delivered_at_s - p.created_at_s) * 1e3);
    } else if (p.outcome == Outcome::dropped_overflow || p.outcome == Outcome::dropped_no_route) {
        ++s.dropped;
    }
}

inline void finish(TrafficStats& s, std::vector<double>& lat_ms)
{
    if (s.generated > 0) s.pdr = static_cast<double>(s.delivered) / static_cast<double>(s.generated);
    s.latency_ms = quantiles(std::move(lat_ms));
}

} // namespace detail

/// Packets created before warmup_s are excluded from PDR and latency. Link
/// statistics use every sample.
inline Summary summarize(const std::vector<LinkRow>& links, const std::vector<PacketRecord>& packets, double warmup_s)
{
    Summary out;
    out.warmup_s = warmup_s;

    std::map<int, FlowSummary> flows;
    std::map<int, std::vector<double>> flow_lat;
    std::vector<double> dir_lat[2];
    for (const auto& p : packets) {
        if (p.created_at_s < warmup_s) continue;
        auto& f = flows[p.flow_id];
        f.flow_id = p.flow_id;
        f.direction = p.direction;
        detail::accumulate(f.traffic, p, flow_lat[p.flow_id]);
        auto& d = p.direction == FlowDirection::dl ? out.dl : out.ul;
        detail::accumulate(d.traffic, p, dir_lat[p.direction == FlowDirection::dl ? 0 : 1]);
    }
    for (auto& [id, f] : flows) {
        detail::finish(f.traffic, flow_lat[id]);
        out.flows.push_back(f);
    }
    detail::finish(out.dl.traffic, dir_lat[0]);
    detail::finish(out.ul.traffic, dir_lat[1]);

    for (int k = 0; k < 2; ++k) {
        const auto dir = k == 0 ? FlowDirection::dl : FlowDirection::ul;
        auto& d = k == 0 ? out.dl : out.ul;
        std::vector<double> snr, itf, sinr;
        std::size_t none = 0;
        for (const auto& r : links) {
            if (r.direction != dir) continue;
            snr.push_back(r.snr_db);
            sinr.push_back(r.sinr_db);
            if (std::isfinite(r.interference_dbm)) {
                itf.push_back(r.interference_dbm);
            } else {
                ++none;
            }
        }
        d.link_samples = snr.size();
        d.interference_none_share =
            snr.empty() ? 0.0 : static_cast<double>(none) / static_cast<double>(snr.size());
        d.snr_db = quantiles(std::move(snr));
        d.interference_dbm = quantiles(std::move(itf));
        d.sinr_db = quantiles(std::move(sinr));
    }
    return out;
}

// ---- CSV -----------------------------------------------------------------

inline constexpr const char* kLinksHeader =
    "slot,tx,rx,direction,pl_db,rain_db,g_tx_db,g_rx_db,rx_power_dbm,snr_db,interference_dbm,sinr_db,scheduled,"
    "deep_null";
inline constexpr const char* kPacketsHeader =
    "pkt_id,flow_id,direction,kind,size_bytes,created_at_s,delivered_at_s,outcome,hops";
inline constexpr const char* kSummaryHeader =
    "scope,id,direction,generated,delivered,dropped,pdr,offered_bits,carried_bits,"
    "lat_min_ms,lat_p25_ms,lat_p50_ms,lat_p75_ms,lat_max_ms,"
    "snr_min_db,snr_p25_db,snr_p50_db,snr_p75_db,snr_max_db,"
    "int_min_dbm,int_p25_dbm,int_p50_dbm,int_p75_dbm,int_max_dbm,"
    "sinr_min_db,sinr_p25_db,sinr_p50_db,sinr_p75_db,sinr_max_db,"
    "int_none_share,link_samples";

/// Shortest text that reads back to the same double.
inline std::string fmt_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

inline double parse_double(std::string_view s)
{
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "none") return kNegInf;
    if (s == "nan" || s == "null") return std::numeric_limits<double>::quiet_NaN();
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str() || *end != '\0') throw ConfigError("bad number '" + tmp + "' in CSV");
    return v;
}

template <class Int>
Int parse_int(std::string_view s)
{
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad integer '" + std::string(s) + "' in CSV");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline void write_links_csv(std::ostream& os, const std::vector<LinkRow>& rows)
{
    os << kLinksHeader << '\n';
    for (const auto& r : rows) {
        os << r.slot << ',' << r.tx << ',' << r.rx << ',' << to_string(r.direction) << ',' << fmt_double(r.pl_db)
           << ',' << fmt_double(r.rain_db) << ',' << fmt_double(r.g_tx_db) << ',' << fmt_double(r.g_rx_db) << ','
           << fmt_double(r.rx_power_dbm) << ',' << fmt_double(r.snr_db) << ','
           << (std::isfinite(r.interference_dbm) ? fmt_double(r.interference_dbm) : std::string("none")) << ','
           << fmt_double(r.sinr_db) << ',' << (r.scheduled ? 1 : 0) << ',' << (r.deep_null ? 1 : 0) << '\n';
    }
}

inline void write_packets_csv(std::ostream& os, const std::vector<PacketRecord>& rows)
{
    os << kPacketsHeader << '\n';
    for (const auto& p : rows) {
        os << p.pkt_id << ',' << p.flow_id << ',' << to_string(p.direction) << ',' << to_string(p.kind) << ','
           << p.size_bytes << ',' << fmt_double(p.created_at_s) << ','
           << (p.delivered_at_s ? fmt_double(*p.delivered_at_s) : std::string()) << ',' << to_string(p.outcome)
           << ',';
        for (std::size_t i = 0; i < p.hop_trace.size(); ++i) os << (i ? ";" : "") << p.hop_trace[i];
        os << '\n';
    }
}

namespace detail {

inline std::string opt_num(const std::optional<double>& v) { return v ? fmt_double(*v) : "null"; }

inline void put_quantiles(std::ostream& os, const std::optional<Quantiles>& q)
{
    if (!q) {
        os << ",null,null,null,null,null";
        return;
    }
    os << ',' << fmt_double(q->min) << ',' << fmt_double(q->p25) << ',' << fmt_double(q->p50) << ','
       << fmt_double(q->p75) << ',' << fmt_double(q->max);
}

inline void put_traffic(std::ostream& os, const TrafficStats& t)
{
    os << ',' << t.generated << ',' << t.delivered << ',' << t.dropped << ',' << opt_num(t.pdr) << ','
       << fmt_double(t.offered_bits) << ',' << fmt_double(t.carried_bits);
    put_quantiles(os, t.latency_ms);
}

} // namespace detail

/// One row per direction, then one per flow. Link columns are "null" on flow rows.
inline void write_summary_csv(std::ostream& os, const Summary& s)
{
    os << kSummaryHeader << '\n';
    for (const auto* d : {&s.dl, &s.ul}) {
        os << "direction," << to_string(d->direction) << ',' << to_string(d->direction);
        detail::put_traffic(os, d->traffic);
        detail::put_quantiles(os, d->snr_db);
        detail::put_quantiles(os, d->interference_dbm);
        detail::put_quantiles(os, d->sinr_db);
        os << ',' << fmt_double(d->interference_none_share) << ',' << d->link_samples << '\n';
    }
    for (const auto& f : s.flows) {
        os << "flow," << f.flow_id << ',' << to_string(f.direction);
        detail::put_traffic(os, f.traffic);
        os << ",null,null,null,null,null,null,null,null,null,null,null,null,null,null,null,null,null\n";
    }
}

namespace detail {

inline std::vector<std::string> read_lines(std::istream& is, const char* header, const std::string& what)
{
    std::vector<std::string> lines;
    std::string line;
    if (!std::getline(is, line) || line != header) throw ConfigError(what + ": unexpected header");
    while (std::getline(is, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace detail

inline std::vector<LinkRow> read_links_csv(std::istream& is)
{
    std::vector<LinkRow> out;
    for (const auto& line : detail::read_lines(is, kLinksHeader, "links.csv")) {
        const auto f = split(line, ',');
        if (f.size() != 14) throw ConfigError("links.csv: expected 14 fields");
        LinkRow r;
        r.slot = parse_int<std::int64_t>(f[0]);
        r.tx = parse_int<int>(f[1]);
        r.rx = parse_int<int>(f[2]);
        r.direction = flow_direction_from_string(f[3]);
        r.pl_db = parse_double(f[4]);
        r.rain_db = parse_double(f[5]);
        r.g_tx_db = parse_double(f[6]);
        r.g_rx_db = parse_double(f[7]);
        r.rx_power_dbm = parse_double(f[8]);
        r.snr_db = parse_double(f[9]);
        r.interference_dbm = parse_double(f[10]);
        r.sinr_db = parse_double(f[11]);
        r.scheduled = f[12] == "1";
        r.deep_null = f[13] == "1";
        out.push_back(r);
    }
    return out;
}

inline std::vector<PacketRecord> read_packets_csv(std::istream& is)
{
    std::vector<PacketRecord> out;
    for (const auto& line : detail::read_lines(is, kPacketsHeader, "packets.csv")) {
        const auto f = split(line, ',');
        if (f.size() != 9) throw ConfigError("packets.csv: expected 9 fields");
        PacketRecord p;
        p.pkt_id = parse_int<std::uint64_t>(f[0]);
        p.flow_id = parse_int<int>(f[1]);
        p.direction = flow_direction_from_string(f[2]);
        p.kind = traffic_kind_from_string(f[3]);
        p.size_bytes = parse_int<std::uint32_t>(f[4]);
        p.created_at_s = parse_double(f[5]);
        if (!f[6].empty()) p.delivered_at_s = parse_double(f[6]);
        p.outcome = outcome_from_string(f[7]);
        if (!f[8].empty()) {
            for (auto h : split(f[8], ';')) p.hop_trace.push_back(parse_int<std::uint16_t>(h));
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline std::string summary_csv(const Summary& s)
{
    std::ostringstream os;
    write_summary_csv(os, s);
    return os.str();
}

/// Writes links.csv, packets.csv, summary.csv into dir (created if needed).
inline void write_bundle(const MetricsBundle& b, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("links.csv");
        write_links_csv(f, b.links);
    }
    {
        auto f = open("packets.csv");
        write_packets_csv(f, b.packets);
    }
    {
        auto f = open("summary.csv");
        write_summary_csv(f, b.summary);
    }
    {
        auto f = open("run.json");
        nlohmann::json j = {{"scenario", b.scenario_name},
                            {"seed", b.seed},
                            {"slot_duration_s", b.slot_duration_s},
                            {"slot_count", b.slot_count},
                            {"warmup_s", b.warmup_s},
                            {"nodes", b.node_names}};
        f << j.dump(2) << '\n';
    }
}

} // namespace iabsim
