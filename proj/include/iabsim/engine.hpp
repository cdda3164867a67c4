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

// Slot-driven simulation of one run.
//
// Per slot: move the vessels, sample every tree edge in the slot's
// direction, schedule each DU's links round-robin inside the symbols its
// layer parity owns, add interference from the other scheduled
// transmissions, move granted bits down the RLC queues, then generate the
// slot's traffic. A packet received in slot t is handed to the next hop's
// queue at the start of slot t + 1 and is delivered at the end of the slot
// that carried its last hop.

#include "iabsim/metrics.hpp"
#include "iabsim/scenario.hpp"

#include <functional>

namespace iabsim {

/// What one slot did; handed to an optional observer.
struct SlotTrace {
    std::int64_t slot = 0;
    SlotType type = SlotType::DL;
    FlowDirection direction = FlowDirection::dl;
    std::vector<Allocation> allocations;
    std::vector<LinkSample> samples;
    /// Per sampled edge: the symbol window interference was evaluated on.
    std::vector<SymbolSet> windows;
};

struct RunOptions {
    /// Keep every link sample in the bundle (summary needs them).
    bool record_links = true;
    std::function<void(const SlotTrace&)> on_slot;
};

/// Flow list actually simulated: the scenario's explicit flows, or one DL
/// and one UL flow per IAB-node.
struct ResolvedFlow {
    Flow flow;
    double rate_bps = 0.0;
};

inline std::vector<ResolvedFlow> resolve_flows(const Scenario& s, const Topology& t)
{
    std::vector<ResolvedFlow> out;
    auto make = [&](int flow_id, int node, FlowDirection dir, TrafficKind kind, std::optional<double> rate) {
        ResolvedFlow rf;
        rf.flow.flow_id = flow_id;
        rf.flow.direction = dir;
        rf.flow.kind = kind;
        rf.flow.teid = 0x100u + static_cast<std::uint32_t>(flow_id);
        const int root = t.donor[static_cast<std::size_t>(node)];
        rf.flow.src = dir == FlowDirection::dl ? root : node;
        rf.flow.dst = dir == FlowDirection::dl ? node : root;
        rf.rate_bps = rate.value_or(dir == FlowDirection::dl ? s.traffic.dl_rate_bps : s.traffic.ul_rate_bps());
        out.push_back(rf);
    };
    if (s.flows.empty()) {
        int id = 1;
        for (int i = 0; i < t.size(); ++i) {
            if (t.is_donor(i)) continue;
            make(id++, i, FlowDirection::dl, s.default_kind, std::nullopt);
            make(id++, i, FlowDirection::ul, s.default_kind, std::nullopt);
        }
    } else {
        for (const auto& f : s.flows) make(f.flow_id, t.index.at(f.node), f.direction, f.kind, f.rate_bps);
    }
    return out;
}

class Simulator {
public:
    explicit Simulator(Scenario s, std::optional<RainCoefficientTable> table = std::nullopt)
        : s_(std::move(s)), topo_(validate(s_))
    {
        if (!table) {
            table = s_.rain_table_path ? load_rain_table(*s_.rain_table_path) : bundled_rain_table();
        }
        env_ = RadioEnvironment::make(s_.channel, s_.radio, *table);
        setup();
    }

    [[nodiscard]] const Topology& topology() const { return topo_; }
    [[nodiscard]] const RadioEnvironment& environment() const { return env_; }
    [[nodiscard]] const std::vector<ResolvedFlow>& flows() const { return flows_; }

    MetricsBundle run(const RunOptions& opt = {})
    {
        reset();
        const auto n_slots = s_.slot_count();
        const double T = s_.numerology.slot_duration_s();
        for (std::int64_t t = 0; t < n_slots; ++t) step(t, T, opt);
        return finish(n_slots, T);
    }

private:
    struct Edge {
        int parent = -1;
        int child = -1;
        RlcQueue dl;
        RlcQueue ul;
        double last_sinr[2] = {0.0, 0.0};
        bool have_sinr[2] = {false, false};
    };

    struct Pending {
        Packet packet;
        int at = -1;
        int next = -1;
    };

    Scenario s_;
    Topology topo_;
    RadioEnvironment env_;
    std::vector<ResolvedFlow> flows_;
    FlowTable flow_table_;
    ForwardingTable fwd_;
    std::vector<bap::NodeTables> tables_;
    std::vector<UpaConfig> du_panel_, mt_panel_;
    std::vector<Vec3> base_, vel_, pos_;

    std::vector<Edge> edges_;
    std::vector<int> edge_of_; // child -> edge, -1 for donors
    std::vector<std::array<int, 2>> rr_pointer_;
    std::vector<CbrSource> sources_;
    std::vector<PacketRecord> records_;
    std::vector<Pending> pending_;
    std::vector<LinkRow> links_;
    std::uint64_t hd_violations_ = 0;

    static int dir_index(FlowDirection d) { return d == FlowDirection::dl ? 0 : 1; }

    void setup()
    {
        const int n = topo_.size();
        tables_ = bap::build_routing_tables(topo_.parent);
        base_.resize(static_cast<std::size_t>(n));
        vel_.resize(static_cast<std::size_t>(n));
        du_panel_.assign(static_cast<std::size_t>(n), s_.antenna);
        mt_panel_.assign(static_cast<std::size_t>(n), s_.antenna);
        for (int i = 0; i < n; ++i) {
            const auto& nc = s_.nodes[static_cast<std::size_t>(i)];
            const auto u = static_cast<std::size_t>(i);
            base_[u] = {nc.x_m, nc.y_m, nc.height_m};
            vel_[u] = nc.velocity;
            du_panel_[u].boresight_azimuth_deg = nc.du_boresight_az_deg;
            if (auto p = topo_.parent[u]) {
                const auto& pc = s_.nodes[static_cast<std::size_t>(*p)];
                mt_panel_[u].boresight_azimuth_deg =
                    nc.mt_boresight_az_deg.value_or(rad2deg(std::atan2(pc.y_m - nc.y_m, pc.x_m - nc.x_m)));
            }
        }
        flows_ = resolve_flows(s_, topo_);
        for (const auto& rf : flows_) flow_table_.add(rf.flow);
        fwd_ = ForwardingTable::from_flows(flow_table_);
    }

    void reset()
    {
        const int n = topo_.size();
        edges_.clear();
        edge_of_.assign(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            if (auto p = topo_.parent[static_cast<std::size_t>(i)]) {
                edge_of_[static_cast<std::size_t>(i)] = static_cast<int>(edges_.size());
                Edge e{*p, i, RlcQueue(s_.rlc_max_bytes), RlcQueue(s_.rlc_max_bytes)};
                edges_.push_back(std::move(e));
            }
        }
        rr_pointer_.assign(static_cast<std::size_t>(n), {0, 0});
        pos_ = base_;
        records_.clear();
        pending_.clear();
        links_.clear();
        hd_violations_ = 0;

        sources_.clear();
        const Rng rng(s_.seed);
        const double stop = s_.traffic_stop_s();
        for (const auto& rf : flows_) {
            auto r = rng.split("traffic-phase", static_cast<std::uint64_t>(rf.flow.flow_id));
            const double phase = s_.traffic.phase_jitter ? r.uniform01() * s_.traffic.inter_packet_interval_s : 0.0;
            sources_.emplace_back(rf.rate_bps, s_.traffic.inter_packet_interval_s, s_.traffic.start_s, stop, phase);
        }
    }

    [[noreturn]] static void breach(const std::string& what) { throw InvariantViolation(what); }

    RlcQueue& queue_toward(int at, int next)
    {
        const auto ua = static_cast<std::size_t>(at);
        const auto un = static_cast<std::size_t>(next);
        if (topo_.parent[ua] && *topo_.parent[ua] == next) return edges_[static_cast<std::size_t>(edge_of_[ua])].ul;
        if (topo_.parent[un] && *topo_.parent[un] == at) return edges_[static_cast<std::size_t>(edge_of_[un])].dl;
        breach("next hop " + std::to_string(next) + " is not adjacent to node " + std::to_string(at));
    }

    void enqueue(Packet p, int at, int next)
    {
        auto& rec = records_[p.pkt_id];
        if (queue_toward(at, next).enqueue(std::move(p)) == EnqueueResult::dropped_overflow) {
            rec.outcome = Outcome::dropped_overflow;
        }
    }

    void check_trace(const PacketRecord& rec) const
    {
        int prev = -1;
        for (auto a : rec.hop_trace) {
            const int l = topo_.layer[static_cast<std::size_t>(bap::node_of(a))];
            if (prev >= 0) {
                const bool ok = rec.direction == FlowDirection::dl ? l > prev : l < prev;
                if (!ok) breach("packet " + std::to_string(rec.pkt_id) + " hop trace is not monotone in layer");
            }
            prev = l;
        }
    }

    void receive(Packet p, int rx, std::int64_t t, double T)
    {
        auto& rec = records_[p.pkt_id];
        rec.hop_trace.push_back(bap::address_of(rx));
        const auto decision = bap::forward(tables_[static_cast<std::size_t>(rx)], *p.bap_header);
        if (const auto* fw = std::get_if<bap::ForwardTo>(&decision)) {
            pending_.push_back({std::move(p), rx, fw->next_hop});
            return;
        }
        rec.outcome = Outcome::delivered;
        rec.delivered_at_s = static_cast<double>(t + 1) * T;
        if (s_.strict) {
            if (*rec.delivered_at_s < rec.created_at_s + T * (1.0 - 1e-9)) {
                breach("packet " + std::to_string(rec.pkt_id) + " delivered less than one slot after creation");
            }
            check_trace(rec);
        }
    }

    Endpoint endpoint(int node, bool du) const
    {
        const auto u = static_cast<std::size_t>(node);
        return {node, pos_[u], du ? du_panel_[u] : mt_panel_[u]};
    }

    void step(std::int64_t t, double T, const RunOptions& opt)
    {
        const double t0 = static_cast<double>(t) * T;
        const SlotType st = slot_type(t, s_.pattern);
        const FlowDirection dir = st == SlotType::DL ? FlowDirection::dl : FlowDirection::ul;
        const int di = dir_index(dir);
        const bool dl = dir == FlowDirection::dl;

        // Hand over packets received last slot.
        auto arrivals = std::move(pending_);
        pending_.clear();
        for (auto& a : arrivals) enqueue(std::move(a.packet), a.at, a.next);

        for (std::size_t i = 0; i < pos_.size(); ++i) pos_[i] = base_[i] + t0 * vel_[i];

        const std::size_t ne = edges_.size();
        std::vector<LinkSample> samples(ne);
        std::vector<Endpoint> tx_ep(ne), rx_ep(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& ed = edges_[e];
            tx_ep[e] = dl ? endpoint(ed.parent, true) : endpoint(ed.child, false);
            rx_ep[e] = dl ? endpoint(ed.child, false) : endpoint(ed.parent, true);
            samples[e] = link_budget(tx_ep[e], rx_ep[e], env_, t);
        }

        // Per-DU symbol budget and band.
        const int n = topo_.size();
        std::vector<SymbolSet> budget(static_cast<std::size_t>(n));
        std::vector<Subband> band(static_cast<std::size_t>(n));
        std::vector<Allocation> allocs;
        std::vector<std::size_t> alloc_edge;
        for (int d = 0; d < n; ++d) {
            const auto& kids = topo_.children[static_cast<std::size_t>(d)];
            if (kids.empty()) continue;
            const int layer = topo_.layer[static_cast<std::size_t>(d)];
            const int tx_layer = dl ? layer : layer + 1;
            budget[static_cast<std::size_t>(d)] =
                apply_extra_control(s_.mux.extra_control, symbol_partition(tx_layer, s_.mux, st), t);
            band[static_cast<std::size_t>(d)] = du_subband(layer, s_.mux, s_.radio.bandwidth_hz);

            std::vector<RrLink> links;
            for (int c : kids) {
                const auto e = static_cast<std::size_t>(edge_of_[static_cast<std::size_t>(c)]);
                const auto& ed = edges_[e];
                const auto& q = dl ? ed.dl : ed.ul;
                RrLink l;
                l.tx = dl ? d : c;
                l.rx = dl ? c : d;
                l.demand_bits = static_cast<std::int64_t>(8 * q.cur_bytes());
                l.sinr_db = ed.have_sinr[di] ? ed.last_sinr[di] : samples[e].snr_db;
                links.push_back(l);
            }
            auto got = rr_allocate(links, budget[static_cast<std::size_t>(d)], band[static_cast<std::size_t>(d)],
                                   rr_pointer_[static_cast<std::size_t>(d)][static_cast<std::size_t>(di)], dir, t,
                                   s_.radio.rate_map, s_.numerology);
            for (auto& a : got) {
                alloc_edge.push_back(static_cast<std::size_t>(edge_of_[static_cast<std::size_t>(dl ? a.rx : a.tx)]));
                allocs.push_back(a);
            }
        }

        const auto hd = half_duplex_check(allocs);
        if (!hd.empty()) {
            if (s_.strict) breach("half-duplex violated at node " + std::to_string(hd.front().node) + " in slot " +
                                  std::to_string(t));
            hd_violations_ += hd.size();
        }

        // Interference on every sampled edge.
        std::vector<int> alloc_of(ne, -1);
        for (std::size_t k = 0; k < allocs.size(); ++k) alloc_of[alloc_edge[k]] = static_cast<int>(k);
        std::vector<SymbolSet> windows(ne);
        std::vector<InterferenceTerm> terms;
        for (std::size_t e = 0; e < ne; ++e) {
            const int du = edges_[e].parent;
            SymbolSet win = budget[static_cast<std::size_t>(du)];
            Subband vb = band[static_cast<std::size_t>(du)];
            if (alloc_of[e] >= 0) {
                win = allocs[static_cast<std::size_t>(alloc_of[e])].symbols;
                vb = allocs[static_cast<std::size_t>(alloc_of[e])].subband;
            }
            windows[e] = win;
            const auto wn = win.count();
            terms.clear();
            if (wn > 0) {
                for (std::size_t k = 0; k < allocs.size(); ++k) {
                    const auto& a = allocs[k];
                    // Same cell: the DU schedules its links on disjoint symbols.
                    if ((dl ? a.tx : a.rx) == du) continue;
                    if (a.tx == samples[e].tx_node || a.tx == samples[e].rx_node) continue;
                    const auto ov = (a.symbols & win).count();
                    if (ov == 0) continue;
                    const double fo = a.subband.overlap_hz(vb) / vb.width_hz;
                    if (fo <= 0.0) continue;
                    const double frac = static_cast<double>(ov) / static_cast<double>(wn) * fo;
                    const Interferer src{tx_ep[alloc_edge[k]], samples[alloc_edge[k]].tx_beam, frac};
                    terms.push_back({interference_power_dbm(src, rx_ep[e], samples[e].rx_beam, env_), frac});
                }
            }
            samples[e] = apply_interference(samples[e], terms);
            edges_[e].last_sinr[di] = samples[e].sinr_db;
            edges_[e].have_sinr[di] = true;
        }

        // Transmit.
        for (std::size_t k = 0; k < allocs.size(); ++k) {
            auto& a = allocs[k];
            const auto e = alloc_edge[k];
            a.granted_bits =
                achievable_bits(samples[e].sinr_db, a.n_symbols(), a.subband.width_hz, s_.radio.rate_map, s_.numerology);
            auto& q = dl ? edges_[e].dl : edges_[e].ul;
            for (auto& p : q.dequeue_up_to(a.granted_bits)) receive(std::move(p), a.rx, t, T);
        }

        if (opt.record_links) {
            for (std::size_t e = 0; e < ne; ++e) {
                const auto& s = samples[e];
                links_.push_back({t, s.tx_node, s.rx_node, dir, s.pl_db, s.rain_db, s.g_tx_db, s.g_rx_db,
                                  s.rx_power_dbm, s.snr_db, s.interference_dbm, s.sinr_db, alloc_of[e] >= 0,
                                  s.deep_null});
            }
        }
        if (opt.on_slot) opt.on_slot(SlotTrace{t, st, dir, allocs, samples, windows});

        generate(t0, t0 + T);
    }

    void generate(double begin, double end)
    {
        for (std::size_t f = 0; f < flows_.size(); ++f) {
            const auto& flow = flows_[f].flow;
            for (const auto& g : sources_[f].generate(begin, end)) {
                PacketRecord rec;
                rec.pkt_id = records_.size();
                rec.flow_id = flow.flow_id;
                rec.direction = flow.direction;
                rec.kind = flow.kind;
                rec.size_bytes = g.size_bytes;
                rec.created_at_s = g.created_at_s;
                rec.hop_trace.push_back(bap::address_of(flow.src));
                records_.push_back(rec);

                Packet p;
                p.pkt_id = rec.pkt_id;
                p.flow_id = flow.flow_id;
                p.payload_bytes = g.size_bytes;
                p.created_at_s = g.created_at_s;
                try {
                    p = encapsulate(std::move(p), flow_table_.get(flow.flow_id), fwd_);
                    const auto d = bap::forward(tables_[static_cast<std::size_t>(flow.src)], *p.bap_header);
                    const auto* fw = std::get_if<bap::ForwardTo>(&d);
                    if (!fw) breach("flow " + std::to_string(flow.flow_id) + " has identical source and sink");
                    enqueue(std::move(p), flow.src, fw->next_hop);
                } catch (const RoutingError&) {
                    records_.back().outcome = Outcome::dropped_no_route;
                }
            }
        }
    }

    MetricsBundle finish(std::int64_t n_slots, double T)
    {
        std::uint64_t queued = pending_.size();
        for (const auto& e : edges_) queued += e.dl.size() + e.ul.size();
        std::uint64_t in_flight = 0;
        for (const auto& r : records_) in_flight += r.outcome == Outcome::in_flight ? 1 : 0;
        if (queued != in_flight) {
            breach("packet conservation failed: " + std::to_string(in_flight) + " in flight, " +
                   std::to_string(queued) + " queued");
        }

        MetricsBundle b;
        b.scenario_name = s_.name;
        b.seed = s_.seed;
        b.slot_duration_s = T;
        b.slot_count = n_slots;
        b.warmup_s = s_.warmup_fraction * s_.duration_s;
        for (const auto& nc : s_.nodes) b.node_names.push_back(nc.name);
        b.links = std::move(links_);
        b.packets = std::move(records_);
        b.half_duplex_violations = hd_violations_;
        b.summary = summarize(b.links, b.packets, b.warmup_s);
        links_.clear();
        records_.clear();
        return b;
    }
};

/// Convenience: validate, simulate once with the scenario's seed.
inline MetricsBundle run(const Scenario& s, const RunOptions& opt = {})
{
    Simulator sim(s);
    return sim.run(opt);
}

} // namespace iabsim
