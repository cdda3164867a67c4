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

// Constant-bit-rate packet sources.

#include "iabsim/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace iabsim {

struct TrafficSpec {
    double dl_rate_bps = 60e6;
    /// r_UL = r_DL * ul_rate_factor.
    double ul_rate_factor = 0.2;
    double inter_packet_interval_s = 50e-6;
    double start_s = 0.0;
    /// Sources stop here; unset means shortly before the end of the run.
    std::optional<double> stop_s;
    /// Draw a per-flow start phase uniformly in [0, interval).
    bool phase_jitter = true;

    [[nodiscard]] double ul_rate_bps() const { return dl_rate_bps * ul_rate_factor; }

    void validate() const
    {
        if (!(dl_rate_bps >= 0.0) || !std::isfinite(dl_rate_bps)) throw ConfigError("dl_rate_bps must be >= 0");
        if (!(ul_rate_factor >= 0.0) || !std::isfinite(ul_rate_factor)) throw ConfigError("ul_rate_factor must be >= 0");
        if (!(inter_packet_interval_s > 0.0)) throw ConfigError("inter_packet_interval_s must be positive");
        if (start_s < 0.0 || (stop_s && !(*stop_s >= start_s))) throw ConfigError("traffic window must satisfy 0 <= start <= stop");
    }
};

/// Mean packet size for a rate: rate * interval / 8 bytes.
inline double mean_packet_bytes(double rate_bps, double interval_s) { return rate_bps * interval_s / 8.0; }

struct GeneratedPacket {
    double created_at_s = 0.0;
    std::uint32_t size_bytes = 0;
};

/// One packet per interval from start + phase until stop. Sizes follow a
/// byte-credit rule, size_k = round((k+1) x) - round(k x) with x the mean
/// size, so every packet is round(x) when x is integral and the cumulative
/// offered bytes never drift from rate * time by more than one byte otherwise.
class CbrSource {
public:
    CbrSource(double rate_bps, double interval_s, double start_s, double stop_s, double phase_s = 0.0)
        : bytes_per_packet_(mean_packet_bytes(rate_bps, interval_s)),
          interval_s_(interval_s),
          first_s_(start_s + phase_s),
          stop_s_(stop_s)
    {
        if (!(interval_s > 0.0)) throw ConfigError("inter-packet interval must be positive");
        if (bytes_per_packet_ > 0.0 && bytes_per_packet_ < 1.0) {
            throw ConfigError("rate too low: packets would be smaller than one byte");
        }
    }

    /// Packets created in [begin_s, end_s), in creation order. Successive calls
    /// must use non-overlapping, increasing windows.
    std::vector<GeneratedPacket> generate(double begin_s, double end_s)
    {
        std::vector<GeneratedPacket> out;
        if (bytes_per_packet_ <= 0.0) return out;
        for (;;) {
            const double t = first_s_ + static_cast<double>(next_) * interval_s_;
            if (t >= end_s || t >= stop_s_) break;
            const auto size = size_of(next_);
            ++next_;
            if (t < begin_s) continue;
            out.push_back({t, size});
        }
        return out;
    }

    [[nodiscard]] std::uint32_t size_of(std::uint64_t k) const
    {
        const auto hi = std::llround(static_cast<double>(k + 1) * bytes_per_packet_);
        const auto lo = std::llround(static_cast<double>(k) * bytes_per_packet_);
        return static_cast<std::uint32_t>(hi - lo);
    }

    [[nodiscard]] std::uint64_t emitted() const { return next_; }

private:
    double bytes_per_packet_;
    double interval_s_;
    double first_s_;
    double stop_s_;
    std::uint64_t next_ = 0;
};

} // namespace iabsim
