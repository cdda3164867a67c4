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

// Scenario files are JSON documents (schema_version 1). Loading rejects
// unknown keys so that typos do not silently fall back to defaults.

#include "iabsim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace iabsim {

using Json = nlohmann::json;

namespace detail {

inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.contains(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline Vec3 read_vec(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.size() < 2 || j.size() > 3) throw ConfigError(where + ": expected [x, y] or [x, y, z]");
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(where + ": coordinates must be numbers");
    }
    Vec3 out{j[0].get<double>(), j[1].get<double>(), 0.0};
    if (j.size() == 3) out.z = j[2].get<double>();
    return out;
}

} // namespace detail

inline Json to_json(const Scenario& s)
{
    Json j;
    j["schema_version"] = s.schema_version;
    j["name"] = s.name;
    j["duration_s"] = s.duration_s;
    j["seed"] = s.seed;
    j["run_count"] = s.run_count;
    j["warmup_fraction"] = s.warmup_fraction;
    j["strict"] = s.strict;

    Json ch;
    ch["carrier_freq_ghz"] = s.channel.carrier_freq_ghz;
    ch["reflection_coeff"] = s.channel.reflection_coeff;
    ch["rain_rate_mmh"] = s.channel.rain_rate_mmh;
    ch["polarization"] = std::string(to_string(s.channel.polarization));
    ch["model"] = std::string(to_string(s.channel.model));
    ch["null_floor"] = s.channel.null_floor;
    if (s.channel.alpha_override) ch["alpha_override"] = *s.channel.alpha_override;
    if (s.rain_table_path) ch["rain_table"] = *s.rain_table_path;
    j["channel"] = ch;

    j["radio"] = {{"tx_power_dbm", s.radio.tx_power_dbm},
                  {"bandwidth_hz", s.radio.bandwidth_hz},
                  {"noise_figure_db", s.radio.noise_figure_db},
                  {"se_max_bps_hz", s.radio.rate_map.se_max_bps_hz},
                  {"se_min_sinr_db", s.radio.rate_map.se_min_sinr_db}};
    j["antenna"] = {{"n_rows", s.antenna.n_rows},
                    {"n_cols", s.antenna.n_cols},
                    {"element_spacing_wavelengths", s.antenna.element_spacing_wavelengths},
                    {"element_max_gain_dbi", s.antenna.element_max_gain_dbi}};
    j["numerology"] = s.numerology.index;

    Json seq = Json::array();
    for (auto t : s.pattern.sequence) seq.push_back(std::string(to_string(t)));
    j["tdd"] = {{"name", s.pattern.name}, {"sequence", seq}};

    Json mux = {{"mode", std::string(to_string(s.mux.mode))},
                {"n_s_odd", s.mux.n_s_odd},
                {"du_bandwidth_fraction", s.mux.du_bandwidth_fraction}};
    if (s.mux.extra_control) {
        mux["extra_control"] = {{"n_symbols", s.mux.extra_control->n_symbols},
                                {"periodicity_slots", s.mux.extra_control->periodicity_slots}};
    }
    j["multiplexing"] = mux;
    j["rlc"] = {{"max_bytes", s.rlc_max_bytes}};

    Json tr = {{"dl_rate_bps", s.traffic.dl_rate_bps},
               {"ul_rate_factor", s.traffic.ul_rate_factor},
               {"inter_packet_interval_s", s.traffic.inter_packet_interval_s},
               {"start_s", s.traffic.start_s},
               {"phase_jitter", s.traffic.phase_jitter},
               {"kind", std::string(to_string(s.default_kind))}};
    if (s.traffic.stop_s) tr["stop_s"] = *s.traffic.stop_s;
    j["traffic"] = tr;

    if (!s.flows.empty()) {
        Json flows = Json::array();
        for (const auto& f : s.flows) {
            Json jf = {{"flow_id", f.flow_id},
                       {"node", f.node},
                       {"direction", std::string(to_string(f.direction))},
                       {"kind", std::string(to_string(f.kind))}};
            if (f.rate_bps) jf["rate_bps"] = *f.rate_bps;
            flows.push_back(jf);
        }
        j["flows"] = flows;
    }

    Json nodes = Json::array();
    for (const auto& n : s.nodes) {
        Json jn = {{"id", n.name},
                   {"role", std::string(to_string(n.role))},
                   {"position", {n.x_m, n.y_m}},
                   {"height_m", n.height_m},
                   {"velocity", {n.velocity.x, n.velocity.y, n.velocity.z}},
                   {"du_boresight_az_deg", n.du_boresight_az_deg}};
        if (n.parent) jn["parent"] = *n.parent;
        if (n.mt_boresight_az_deg) jn["mt_boresight_az_deg"] = *n.mt_boresight_az_deg;
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;
    return j;
}

/// Builds a scenario from a parsed document and validates it.
inline Scenario scenario_from_json(const Json& j)
{
    using detail::read_opt;
    detail::check_keys(j, "scenario",
                       {"schema_version", "name", "duration_s", "seed", "run_count", "warmup_fraction", "strict",
                        "channel", "radio", "antenna", "numerology", "tdd", "multiplexing", "rlc", "traffic", "flows",
                        "nodes", "topology"});
    Scenario s;
    if (!j.contains("schema_version")) throw ConfigError("scenario: missing schema_version");
    read_opt(j, "schema_version", s.schema_version, "scenario");
    if (s.schema_version != 1) throw ConfigError("unsupported schema_version " + std::to_string(s.schema_version));

    // "topology": k starts from a built-in deployment; explicit nodes replace it.
    if (auto it = j.find("topology"); it != j.end()) {
        if (!it->is_number_integer()) throw ConfigError("scenario.topology: expected an integer 1..4");
        s = builtin_topology(it->get<int>());
    }
    read_opt(j, "name", s.name, "scenario");
    read_opt(j, "duration_s", s.duration_s, "scenario");
    read_opt(j, "seed", s.seed, "scenario");
    read_opt(j, "run_count", s.run_count, "scenario");
    read_opt(j, "warmup_fraction", s.warmup_fraction, "scenario");
    read_opt(j, "strict", s.strict, "scenario");

    if (auto it = j.find("channel"); it != j.end()) {
        const auto& c = *it;
        detail::check_keys(c, "channel",
                           {"carrier_freq_ghz", "reflection_coeff", "rain_rate_mmh", "polarization", "model",
                            "null_floor", "alpha_override", "rain_table"});
        read_opt(c, "carrier_freq_ghz", s.channel.carrier_freq_ghz, "channel");
        read_opt(c, "reflection_coeff", s.channel.reflection_coeff, "channel");
        read_opt(c, "rain_rate_mmh", s.channel.rain_rate_mmh, "channel");
        read_opt(c, "null_floor", s.channel.null_floor, "channel");
        std::string str;
        if (c.contains("polarization")) {
            read_opt(c, "polarization", str, "channel");
            s.channel.polarization = polarization_from_string(str);
        }
        if (c.contains("model")) {
            read_opt(c, "model", str, "channel");
            s.channel.model = path_loss_model_from_string(str);
        }
        if (c.contains("alpha_override")) {
            double a = 0.0;
            read_opt(c, "alpha_override", a, "channel");
            s.channel.alpha_override = a;
        }
        if (c.contains("rain_table")) {
            read_opt(c, "rain_table", str, "channel");
            s.rain_table_path = str;
        }
    }
    if (auto it = j.find("radio"); it != j.end()) {
        const auto& r = *it;
        detail::check_keys(r, "radio",
                           {"tx_power_dbm", "bandwidth_hz", "noise_figure_db", "se_max_bps_hz", "se_min_sinr_db"});
        read_opt(r, "tx_power_dbm", s.radio.tx_power_dbm, "radio");
        read_opt(r, "bandwidth_hz", s.radio.bandwidth_hz, "radio");
        read_opt(r, "noise_figure_db", s.radio.noise_figure_db, "radio");
        read_opt(r, "se_max_bps_hz", s.radio.rate_map.se_max_bps_hz, "radio");
        read_opt(r, "se_min_sinr_db", s.radio.rate_map.se_min_sinr_db, "radio");
    }
    if (auto it = j.find("antenna"); it != j.end()) {
        const auto& a = *it;
        detail::check_keys(a, "antenna", {"n_rows", "n_cols", "element_spacing_wavelengths", "element_max_gain_dbi"});
        read_opt(a, "n_rows", s.antenna.n_rows, "antenna");
        read_opt(a, "n_cols", s.antenna.n_cols, "antenna");
        read_opt(a, "element_spacing_wavelengths", s.antenna.element_spacing_wavelengths, "antenna");
        read_opt(a, "element_max_gain_dbi", s.antenna.element_max_gain_dbi, "antenna");
    }
    read_opt(j, "numerology", s.numerology.index, "scenario");

    if (auto it = j.find("tdd"); it != j.end()) {
        if (it->is_string()) {
            s.pattern = SlotPattern::from_name(it->get<std::string>());
        } else {
            detail::check_keys(*it, "tdd", {"name", "sequence"});
            if (auto sq = it->find("sequence"); sq != it->end()) {
                if (!sq->is_array()) throw ConfigError("tdd.sequence: expected an array of \"DL\"/\"SW\"/\"UL\"");
                SlotPattern p;
                for (const auto& e : *sq) {
                    if (!e.is_string()) throw ConfigError("tdd.sequence: expected strings");
                    p.sequence.push_back(slot_type_from_string(e.get<std::string>()));
                }
                p.name = it->value("name", std::string("custom"));
                s.pattern = p;
            } else if (auto nm = it->find("name"); nm != it->end()) {
                s.pattern = SlotPattern::from_name(nm->get<std::string>());
            }
        }
    }
    if (auto it = j.find("multiplexing"); it != j.end()) {
        const auto& m = *it;
        detail::check_keys(m, "multiplexing", {"mode", "n_s_odd", "du_bandwidth_fraction", "extra_control"});
        if (m.contains("mode")) {
            std::string str;
            read_opt(m, "mode", str, "multiplexing");
            s.mux.mode = mux_mode_from_string(str);
        }
        read_opt(m, "n_s_odd", s.mux.n_s_odd, "multiplexing");
        read_opt(m, "du_bandwidth_fraction", s.mux.du_bandwidth_fraction, "multiplexing");
        if (auto e = m.find("extra_control"); e != m.end() && !e->is_null()) {
            detail::check_keys(*e, "multiplexing.extra_control", {"n_symbols", "periodicity_slots"});
            ExtraControl ec;
            read_opt(*e, "n_symbols", ec.n_symbols, "extra_control");
            read_opt(*e, "periodicity_slots", ec.periodicity_slots, "extra_control");
            s.mux.extra_control = ec;
        }
    }
    if (auto it = j.find("rlc"); it != j.end()) {
        detail::check_keys(*it, "rlc", {"max_bytes"});
        read_opt(*it, "max_bytes", s.rlc_max_bytes, "rlc");
    }
    if (auto it = j.find("traffic"); it != j.end()) {
        const auto& t = *it;
        detail::check_keys(t, "traffic",
                           {"dl_rate_bps", "ul_rate_factor", "inter_packet_interval_s", "start_s", "stop_s",
                            "phase_jitter", "kind"});
        read_opt(t, "dl_rate_bps", s.traffic.dl_rate_bps, "traffic");
        read_opt(t, "ul_rate_factor", s.traffic.ul_rate_factor, "traffic");
        read_opt(t, "inter_packet_interval_s", s.traffic.inter_packet_interval_s, "traffic");
        read_opt(t, "start_s", s.traffic.start_s, "traffic");
        read_opt(t, "phase_jitter", s.traffic.phase_jitter, "traffic");
        if (t.contains("stop_s")) {
            double v = 0.0;
            read_opt(t, "stop_s", v, "traffic");
            s.traffic.stop_s = v;
        }
        if (t.contains("kind")) {
            std::string str;
            read_opt(t, "kind", str, "traffic");
            s.default_kind = traffic_kind_from_string(str);
        }
    }
    if (auto it = j.find("flows"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("flows: expected an array");
        s.flows.clear();
        for (const auto& jf : *it) {
            detail::check_keys(jf, "flow", {"flow_id", "node", "direction", "kind", "rate_bps"});
            FlowConfig f;
            f.kind = s.default_kind;
            read_opt(jf, "flow_id", f.flow_id, "flow");
            read_opt(jf, "node", f.node, "flow");
            std::string str;
            if (jf.contains("direction")) {
                read_opt(jf, "direction", str, "flow");
                f.direction = flow_direction_from_string(str);
            }
            if (jf.contains("kind")) {
                read_opt(jf, "kind", str, "flow");
                f.kind = traffic_kind_from_string(str);
            }
            if (jf.contains("rate_bps")) {
                double r = 0.0;
                read_opt(jf, "rate_bps", r, "flow");
                f.rate_bps = r;
            }
            s.flows.push_back(f);
        }
    }
    if (auto it = j.find("nodes"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("nodes: expected an array");
        s.nodes.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& jn = (*it)[i];
            const std::string where = "nodes[" + std::to_string(i) + "]";
            detail::check_keys(jn, where,
                               {"id", "role", "parent", "position", "height_m", "velocity", "du_boresight_az_deg",
                                "mt_boresight_az_deg"});
            NodeConfig n;
            read_opt(jn, "id", n.name, where);
            std::string str;
            if (jn.contains("role")) {
                read_opt(jn, "role", str, where);
                n.role = node_role_from_string(str);
            } else {
                n.role = jn.contains("parent") ? NodeRole::node : NodeRole::donor;
            }
            if (n.role == NodeRole::donor) n.height_m = kDefaultDonorHeightM;
            if (jn.contains("parent") && !jn["parent"].is_null()) {
                read_opt(jn, "parent", str, where);
                n.parent = str;
            }
            if (!jn.contains("position")) throw ConfigError(where + ": missing position");
            const Vec3 p = detail::read_vec(jn["position"], where + ".position");
            n.x_m = p.x;
            n.y_m = p.y;
            read_opt(jn, "height_m", n.height_m, where);
            if (jn.contains("velocity")) n.velocity = detail::read_vec(jn["velocity"], where + ".velocity");
            read_opt(jn, "du_boresight_az_deg", n.du_boresight_az_deg, where);
            if (jn.contains("mt_boresight_az_deg")) {
                double a = 0.0;
                read_opt(jn, "mt_boresight_az_deg", a, where);
                n.mt_boresight_az_deg = a;
            }
            s.nodes.push_back(n);
        }
    }
    validate(s);
    return s;
}

/// Parses text; syntax errors report the byte offset.
inline Scenario parse_scenario(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("scenario parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const TopologyError& e) {
        throw TopologyError(path + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

inline void save_scenario(const Scenario& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scenario file '" + path + "'");
    out << dump_scenario(s);
}

} // namespace iabsim
