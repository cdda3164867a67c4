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

// Per-slot link budgets: received power, aggregate interference, SINR and the
// number of bits a resource allocation can carry.
//
// All powers are referenced to the full carrier at constant power spectral
// density. A subband of fraction f scales signal, noise and interference by the
// same f, so SNR is band-independent and interference enters through the
// overlap fraction alone.

#include "iabsim/antenna.hpp"
#include "iabsim/channel.hpp"

#include <cstdint>
#include <span>

namespace iabsim {

struct Numerology {
    int index = 3;

    [[nodiscard]] double scs_khz() const { return 15.0 * std::ldexp(1.0, index); }
    [[nodiscard]] double slot_duration_s() const { return 1e-3 / std::ldexp(1.0, index); }
    static constexpr int symbols_per_slot = 14;

    void validate() const
    {
        if (index < 0 || index > 6) throw ConfigError("numerology index must be in 0..6");
    }
};

/// Truncated Shannon: 0 below the cutoff, log2(1 + sinr) capped at se_max above.
struct RateMap {
    double se_max_bps_hz = 7.4;
    double se_min_sinr_db = -6.0;

    [[nodiscard]] double spectral_efficiency(double sinr_db) const
    {
        if (!(sinr_db >= se_min_sinr_db)) return 0.0;
        return std::min(std::log2(1.0 + db_to_linear(sinr_db)), se_max_bps_hz);
    }

    void validate() const
    {
        if (!(se_max_bps_hz > 0.0)) throw ConfigError("se_max_bps_hz must be positive");
        require_finite(se_min_sinr_db, "se_min_sinr_db");
    }
};

struct RadioConfig {
    double tx_power_dbm = 30.0;
    double bandwidth_hz = 400e6;
    double noise_figure_db = 5.0;
    RateMap rate_map;

    [[nodiscard]] double noise_dbm() const { return noise_power_dbm(bandwidth_hz, noise_figure_db); }

    void validate() const
    {
        require_finite(tx_power_dbm, "tx_power_dbm");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be positive");
        require_finite(noise_figure_db, "noise_figure_db");
        rate_map.validate();
    }
};

/// One side of a link: where the antenna is (z = height above sea) and which
/// panel it radiates through.
struct Endpoint {
    NodeId node = -1;
    Vec3 position;
    UpaConfig panel;
};

struct LinkSample {
    std::int64_t slot_index = 0;
    NodeId tx_node = -1;
    NodeId rx_node = -1;
    double pl_db = 0.0;
    double rain_db = 0.0;
    double g_tx_db = 0.0;
    double g_rx_db = 0.0;
    double rx_power_dbm = 0.0;
    double noise_dbm = 0.0;
    /// Linear sum over interferers; -inf means "none".
    double interference_dbm = kNegInf;
    double snr_db = 0.0;
    double sinr_db = 0.0;
    double distance_m = 0.0;
    bool deep_null = false;
    Beam tx_beam;
    Beam rx_beam;

    [[nodiscard]] bool has_interference() const { return std::isfinite(interference_dbm); }
};

/// Everything about the propagation environment that is fixed for a run.
struct RadioEnvironment {
    ChannelParams channel;
    RadioConfig radio;
    /// gamma(f, rho) in dB/km, resolved once from the coefficient table.
    double rain_db_per_km = 0.0;

    static RadioEnvironment make(const ChannelParams& ch, const RadioConfig& radio,
                                 const RainCoefficientTable& table)
    {
        ch.validate();
        radio.validate();
        return {ch, radio, rain_specific_attenuation(ch, table)};
    }
};

namespace detail {

struct Propagation {
    double pl_db;
    double rain_db;
    double distance_m;
    bool deep_null;
};

inline Propagation propagate(Vec3 a, Vec3 b, const RadioEnvironment& env)
{
    // Degenerate-input rule: horizontal separation below 1 m is treated as 1 m.
    const double d2d = std::max((b - a).norm2d(), 1.0);
    const Geometry g{d2d, std::max(a.z, 1e-3), std::max(b.z, 1e-3)};
    const auto pl = path_loss(g, env.channel);
    const double d = g.direct_m();
    return {pl.db, env.rain_db_per_km * d / 1000.0, d, pl.deep_null};
}

/// Direction used for antenna gains; falls back to +x when the two antennas
/// share a horizontal position and height.
inline Vec3 pointing(Vec3 from, Vec3 to)
{
    Vec3 d = to - from;
    if (!(d.norm() > 0.0)) d = {1.0, 0.0, 0.0};
    return d;
}

} // namespace detail

/// Received power and SNR for the intended link, with both ends beamformed
/// toward each other using the codebook.
inline LinkSample link_budget(const Endpoint& tx, const Endpoint& rx, const RadioEnvironment& env,
                              std::int64_t slot_index = 0)
{
    if (tx.node == rx.node && tx.node >= 0) throw DomainError("link_budget: tx and rx are the same node");
    LinkSample s;
    s.slot_index = slot_index;
    s.tx_node = tx.node;
    s.rx_node = rx.node;

    Vec3 tx_pos = tx.position, rx_pos = rx.position;
    if (!((rx_pos - tx_pos).norm() > 0.0)) rx_pos.x += 1.0;
    s.tx_beam = select_beam(tx_pos, rx_pos, tx.panel);
    s.rx_beam = select_beam(rx_pos, tx_pos, rx.panel);
    s.g_tx_db = total_gain_db(s.tx_beam, detail::pointing(tx_pos, rx_pos), tx.panel);
    s.g_rx_db = total_gain_db(s.rx_beam, detail::pointing(rx_pos, tx_pos), rx.panel);

    const auto prop = detail::propagate(tx_pos, rx_pos, env);
    s.pl_db = prop.pl_db;
    s.rain_db = prop.rain_db;
    s.distance_m = prop.distance_m;
    s.deep_null = prop.deep_null;
    s.rx_power_dbm = env.radio.tx_power_dbm + s.g_tx_db + s.g_rx_db - s.pl_db - s.rain_db;
    s.noise_dbm = env.radio.noise_dbm();
    s.snr_db = s.rx_power_dbm - s.noise_dbm;
    s.sinr_db = s.snr_db;
    s.interference_dbm = kNegInf;
    return s;
}

/// A concurrent transmission seen by a victim receiver.
struct Interferer {
    Endpoint tx;
    /// The beam the interferer committed to for its own link.
    Beam beam;
    /// Share of the victim's time-frequency resources the interferer overlaps, in (0, 1].
    double overlap_fraction = 1.0;
};

/// Power (dBm, full-carrier referenced) that `src` puts into `victim_rx`
/// listening on `victim_beam`.
inline double interference_power_dbm(const Interferer& src, const Endpoint& victim_rx, const Beam& victim_beam,
                                     const RadioEnvironment& env)
{
    const auto prop = detail::propagate(src.tx.position, victim_rx.position, env);
    const double g_tx = total_gain_db(src.beam, detail::pointing(src.tx.position, victim_rx.position), src.tx.panel);
    const double g_rx = total_gain_db(victim_beam, detail::pointing(victim_rx.position, src.tx.position),
                                      victim_rx.panel);
    return env.radio.tx_power_dbm + g_tx + g_rx - prop.pl_db - prop.rain_db;
}

struct InterferenceTerm {
    double power_dbm = kNegInf;
    double overlap_fraction = 1.0;
};

/// sinr = rx - 10 log10(noise_mw + sum overlap_i * P_i).
inline LinkSample apply_interference(LinkSample s, std::span<const InterferenceTerm> terms)
{
    double i_mw = 0.0;
    for (const auto& t : terms) {
        if (!(t.overlap_fraction > 0.0) || !std::isfinite(t.power_dbm)) continue;
        i_mw += std::min(t.overlap_fraction, 1.0) * db_to_linear(t.power_dbm);
    }
    if (i_mw <= 0.0) {
        s.interference_dbm = kNegInf;
        s.sinr_db = s.snr_db;
        return s;
    }
    s.interference_dbm = linear_to_db(i_mw);
    s.sinr_db = std::min(s.rx_power_dbm - linear_to_db(db_to_linear(s.noise_dbm) + i_mw), s.snr_db);
    return s;
}

inline LinkSample aggregate_sinr(const LinkSample& intended, const Endpoint& victim_rx,
                                 std::span<const Interferer> interferers, const RadioEnvironment& env)
{
    std::vector<InterferenceTerm> terms;
    terms.reserve(interferers.size());
    for (const auto& itf : interferers) {
        terms.push_back({interference_power_dbm(itf, victim_rx, intended.rx_beam, env), itf.overlap_fraction});
    }
    return apply_interference(intended, terms);
}

/// floor(SE(sinr) * subband_hz * slot_duration * n_symbols / 14)
inline std::int64_t achievable_bits(double sinr_db, int n_symbols, double subband_hz, const RateMap& rate_map,
                                    const Numerology& numerology)
{
    if (n_symbols < 0 || n_symbols > Numerology::symbols_per_slot) throw DomainError("n_symbols must be in 0..14");
    if (!(subband_hz > 0.0)) throw DomainError("subband_hz must be positive");
    if (n_symbols == 0) return 0;
    const double se = rate_map.spectral_efficiency(sinr_db);
    const double bits = se * subband_hz * numerology.slot_duration_s() * n_symbols /
                        static_cast<double>(Numerology::symbols_per_slot);
    return static_cast<std::int64_t>(std::floor(bits * (1.0 + 1e-12)));
}

} // namespace iabsim
