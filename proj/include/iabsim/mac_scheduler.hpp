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

// TDD frame structure and resource partitioning between MT and DU.
//
// Symbols 0 and 13 of every slot carry control; 1..12 carry data. Under TDM
// the first n_s_odd data symbols belong to transmissions by odd-layer nodes
// and the rest to even-layer nodes (the donor is layer 0). Under FDM each
// parity owns a subband for its DUs and uses all data symbols. A switching
// (SW) slot only carries UL, on data symbols 9..12.

#include "iabsim/phy_link.hpp"
#include "iabsim/tunnel_stack.hpp"

#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iabsim {

enum class SlotType { DL, SW, UL };

inline std::string_view to_string(SlotType t)
{
    switch (t) {
    case SlotType::DL: return "DL";
    case SlotType::SW: return "SW";
    case SlotType::UL: return "UL";
    }
    return "?";
}

inline SlotType slot_type_from_string(std::string_view s)
{
    if (s == "DL" || s == "D") return SlotType::DL;
    if (s == "SW" || s == "S") return SlotType::SW;
    if (s == "UL" || s == "U") return SlotType::UL;
    throw ConfigError("unknown slot type '" + std::string(s) + "'");
}

struct SlotPattern {
    std::string name;
    std::vector<SlotType> sequence;

    [[nodiscard]] std::size_t period() const { return sequence.size(); }

    /// "4DS2U" and "3DS2U" are built in; anything else must be a string of
    /// D/S/U letters such as "DDSUU".
    static SlotPattern from_name(std::string_view name)
    {
        using enum SlotType;
        if (name == "4DS2U") return {"4DS2U", {DL, DL, DL, DL, SW, UL, UL}};
        if (name == "3DS2U") return {"3DS2U", {DL, DL, DL, SW, UL, UL}};
        SlotPattern p{std::string(name), {}};
        for (char c : name) {
            if (c == 'D') p.sequence.push_back(DL);
            else if (c == 'S') p.sequence.push_back(SW);
            else if (c == 'U') p.sequence.push_back(UL);
            else throw ConfigError("unknown slot pattern '" + std::string(name) + "'");
        }
        if (p.sequence.empty()) throw ConfigError("empty slot pattern");
        return p;
    }
};

inline SlotType slot_type(std::int64_t slot_index, const SlotPattern& pattern)
{
    if (slot_index < 0) throw DomainError("slot index must be non-negative");
    if (pattern.sequence.empty()) throw ConfigError("empty slot pattern");
    return pattern.sequence[static_cast<std::size_t>(slot_index) % pattern.period()];
}

using SymbolSet = std::bitset<Numerology::symbols_per_slot>;

inline constexpr int kFirstDataSymbol = 1;
inline constexpr int kDataSymbols = 12;
inline constexpr int kSwitchUlSymbols = 4;

inline SymbolSet symbol_range(int begin, int end)
{
    SymbolSet s;
    for (int i = begin; i < end; ++i) s.set(static_cast<std::size_t>(i));
    return s;
}

inline SymbolSet data_symbols() { return symbol_range(kFirstDataSymbol, kFirstDataSymbol + kDataSymbols); }

inline SymbolSet switch_ul_symbols()
{
    constexpr int end = kFirstDataSymbol + kDataSymbols;
    return symbol_range(end - kSwitchUlSymbols, end);
}

inline std::vector<int> symbol_list(const SymbolSet& s)
{
    std::vector<int> out;
    for (int i = 0; i < Numerology::symbols_per_slot; ++i) {
        if (s.test(static_cast<std::size_t>(i))) out.push_back(i);
    }
    return out;
}

enum class MuxMode { tdm, fdm };

inline std::string_view to_string(MuxMode m) { return m == MuxMode::tdm ? "tdm" : "fdm"; }

inline MuxMode mux_mode_from_string(std::string_view s)
{
    if (s == "tdm") return MuxMode::tdm;
    if (s == "fdm") return MuxMode::fdm;
    throw ConfigError("unknown multiplexing mode '" + std::string(s) + "'");
}

struct ExtraControl {
    int n_symbols = 0;
    int periodicity_slots = 1;
};

struct MultiplexMode {
    MuxMode mode = MuxMode::tdm;
    int n_s_odd = 6;
    /// FDM: share of the carrier used by even-layer DUs (donor included);
    /// odd-layer DUs use the rest.
    double du_bandwidth_fraction = 0.5;
    std::optional<ExtraControl> extra_control;

    void validate() const
    {
        if (n_s_odd < 0 || n_s_odd > kDataSymbols) throw ConfigError("n_s_odd must be in [0, 12]");
        if (!(du_bandwidth_fraction > 0.0 && du_bandwidth_fraction < 1.0)) {
            throw ConfigError("du_bandwidth_fraction must lie in (0, 1)");
        }
        if (extra_control) {
            const auto& e = *extra_control;
            if (e.n_symbols < 0 || e.periodicity_slots <= 0) throw ConfigError("bad extra control configuration");
            if ((e.n_symbols + e.periodicity_slots - 1) / e.periodicity_slots > kDataSymbols) {
                throw ConfigError("extra control symbols exceed the data symbols of a slot");
            }
        }
    }
};

/// Symbols a transmitter of the given layer may use in a slot.
/// DL transmitters are parent DUs, UL transmitters are child MTs.
inline SymbolSet symbol_partition(int tx_layer, const MultiplexMode& mode, SlotType slot)
{
    const bool odd = (tx_layer % 2) != 0;
    if (slot == SlotType::SW) {
        const SymbolSet sw = switch_ul_symbols();
        if (mode.mode == MuxMode::fdm) return sw;
        // Proportional split of the 4 UL symbols, rounded toward the odd class.
        const int odd_count = (kSwitchUlSymbols * mode.n_s_odd + kDataSymbols - 1) / kDataSymbols;
        const int first = kFirstDataSymbol + kDataSymbols - kSwitchUlSymbols;
        return odd ? symbol_range(first, first + odd_count)
                   : symbol_range(first + odd_count, first + kSwitchUlSymbols);
    }
    if (mode.mode == MuxMode::fdm) return data_symbols();
    const int split = kFirstDataSymbol + mode.n_s_odd;
    return odd ? symbol_range(kFirstDataSymbol, split) : symbol_range(split, kFirstDataSymbol + kDataSymbols);
}

/// Number of extra control symbols slot `slot_index` carries: n symbols per
/// period spread as evenly as integer division allows.
inline int extra_control_count(const ExtraControl& e, std::int64_t slot_index)
{
    const std::int64_t j = slot_index % e.periodicity_slots;
    return static_cast<int>(((j + 1) * e.n_symbols) / e.periodicity_slots - (j * e.n_symbols) / e.periodicity_slots);
}

/// Drops the earliest symbols of the set for this slot's share of the extra
/// control overhead.
inline SymbolSet apply_extra_control(const std::optional<ExtraControl>& extra, SymbolSet symbols,
                                     std::int64_t slot_index = 0)
{
    if (!extra || extra->n_symbols == 0) return symbols;
    if (extra->periodicity_slots <= 0 || extra->n_symbols < 0) throw ConfigError("bad extra control configuration");
    const int remove = extra_control_count(*extra, slot_index);
    if (remove > kDataSymbols) throw ConfigError("extra control symbols exceed the data symbols of a slot");
    int removed = 0;
    for (int i = 0; i < Numerology::symbols_per_slot && removed < remove; ++i) {
        // Removal counts against the slot's data region, whether or not this
        // particular set owns the symbol.
        if (i < kFirstDataSymbol || i >= kFirstDataSymbol + kDataSymbols) continue;
        symbols.reset(static_cast<std::size_t>(i));
        ++removed;
    }
    return symbols;
}

struct Subband {
    double offset_hz = 0.0;
    double width_hz = 0.0;

    [[nodiscard]] double overlap_hz(const Subband& o) const
    {
        const double lo = std::max(offset_hz, o.offset_hz);
        const double hi = std::min(offset_hz + width_hz, o.offset_hz + o.width_hz);
        return std::max(0.0, hi - lo);
    }
    friend bool operator==(const Subband&, const Subband&) = default;
};

/// Band of the cell served by a DU at `du_layer`. A child MT talks to its
/// parent in the parent's band, so an FDM node's MT and DU bands alternate.
inline Subband du_subband(int du_layer, const MultiplexMode& mode, double bandwidth_hz)
{
    if (mode.mode == MuxMode::tdm) return {0.0, bandwidth_hz};
    const double even_w = mode.du_bandwidth_fraction * bandwidth_hz;
    if (du_layer % 2 == 0) return {0.0, even_w};
    return {even_w, bandwidth_hz - even_w};
}

struct Allocation {
    std::int64_t slot_index = 0;
    NodeId tx = -1;
    NodeId rx = -1;
    FlowDirection direction = FlowDirection::dl;
    SymbolSet symbols;
    Subband subband;
    std::int64_t granted_bits = 0;

    [[nodiscard]] int n_symbols() const { return static_cast<int>(symbols.count()); }
};

/// A schedulable link as seen by its DU. Links are passed in a stable order
/// (the RR pointer indexes into it).
struct RrLink {
    NodeId tx = -1;
    NodeId rx = -1;
    /// Queued bits; 0 = nothing to send.
    std::int64_t demand_bits = 0;
    /// Best current estimate of the link's SINR.
    double sinr_db = 0.0;
};

/// Hands out the budget one symbol at a time, round-robin over links with
/// queued data, starting at `pointer`. A link stops taking symbols once its
/// estimated grant covers its queue. Each link's symbols form a contiguous
/// run of the budget, in pointer order; `pointer` moves past the link that
/// took the last symbol.
inline std::vector<Allocation> rr_allocate(std::span<const RrLink> links, const SymbolSet& budget, const Subband& band,
                                           int& pointer, FlowDirection direction, std::int64_t slot_index,
                                           const RateMap& rate_map, const Numerology& numerology)
{
    const int n = static_cast<int>(links.size());
    std::vector<Allocation> out;
    const auto symbols = symbol_list(budget);
    if (n == 0 || symbols.empty()) return out;
    pointer = ((pointer % n) + n) % n;

    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    auto wants_more = [&](int i) {
        const auto& l = links[static_cast<std::size_t>(i)];
        if (l.demand_bits <= 0) return false;
        const auto per_symbol = achievable_bits(l.sinr_db, 1, band.width_hz, rate_map, numerology);
        if (per_symbol <= 0) return counts[static_cast<std::size_t>(i)] < kDataSymbols;
        const int c = counts[static_cast<std::size_t>(i)];
        if (c >= Numerology::symbols_per_slot) return false;
        return achievable_bits(l.sinr_db, c, band.width_hz, rate_map, numerology) < l.demand_bits;
    };

    const int start = pointer;
    int idx = pointer;
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        int pick = -1;
        for (int k = 0; k < n; ++k) {
            const int cand = (idx + k) % n;
            if (wants_more(cand)) {
                pick = cand;
                break;
            }
        }
        if (pick < 0) break;
        ++counts[static_cast<std::size_t>(pick)];
        idx = (pick + 1) % n;
    }
    pointer = idx;

    std::size_t next_symbol = 0;
    for (int k = 0; k < n; ++k) {
        const int i = (start + k) % n;
        const int c = counts[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        Allocation a;
        a.slot_index = slot_index;
        a.tx = links[static_cast<std::size_t>(i)].tx;
        a.rx = links[static_cast<std::size_t>(i)].rx;
        a.direction = direction;
        a.subband = band;
        for (int j = 0; j < c; ++j) a.symbols.set(static_cast<std::size_t>(symbols[next_symbol++]));
        a.granted_bits =
            achievable_bits(links[static_cast<std::size_t>(i)].sinr_db, c, band.width_hz, rate_map, numerology);
        out.push_back(a);
    }
    return out;
}

struct HalfDuplexViolation {
    NodeId node = -1;
    std::size_t tx_allocation = 0;
    std::size_t rx_allocation = 0;
};

/// A node may not transmit in one allocation and receive in another on
/// overlapping symbols and overlapping frequency.
inline std::vector<HalfDuplexViolation> half_duplex_check(std::span<const Allocation> allocs)
{
    std::vector<HalfDuplexViolation> out;
    for (std::size_t a = 0; a < allocs.size(); ++a) {
        for (std::size_t b = 0; b < allocs.size(); ++b) {
            if (a == b || allocs[a].tx != allocs[b].rx) continue;
            if ((allocs[a].symbols & allocs[b].symbols).none()) continue;
            if (allocs[a].subband.overlap_hz(allocs[b].subband) <= 0.0) continue;
            out.push_back({allocs[a].tx, a, b});
        }
    }
    return out;
}

} // namespace iabsim
