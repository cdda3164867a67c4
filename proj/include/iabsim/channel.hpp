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

// Deterministic maritime propagation: sea-surface two-ray path loss (with the
// frequency-dependent phase coefficient of the modified model), P.838-3 rain
// attenuation and thermal noise.

#include "iabsim/core.hpp"
#include "iabsim/rain_table.hpp"

#include <optional>
#include <span>
#include <vector>

namespace iabsim {

enum class PathLossModel { modified_two_ray, classical_two_ray, free_space };

inline std::string_view to_string(PathLossModel m)
{
    switch (m) {
    case PathLossModel::modified_two_ray: return "modified_two_ray";
    case PathLossModel::classical_two_ray: return "classical_two_ray";
    case PathLossModel::free_space: return "free_space";
    }
    return "?";
}

inline PathLossModel path_loss_model_from_string(std::string_view s)
{
    if (s == "modified_two_ray") return PathLossModel::modified_two_ray;
    if (s == "classical_two_ray") return PathLossModel::classical_two_ray;
    if (s == "free_space") return PathLossModel::free_space;
    throw ConfigError("unknown path loss model '" + std::string(s) + "'");
}

struct ChannelParams {
    double carrier_freq_ghz = 26.0;
    double reflection_coeff = -1.0;
    double rain_rate_mmh = 0.0;
    Polarization polarization = Polarization::horizontal;
    PathLossModel model = PathLossModel::modified_two_ray;
    /// Replaces alpha(f) when set; classical two-ray is the special case 1.
    std::optional<double> alpha_override;
    /// Floor on |1 + R exp(j phi)|; ~ +120 dB of extra loss at a deep null.
    double null_floor = 1e-6;

    void validate() const
    {
        if (!std::isfinite(carrier_freq_ghz) || carrier_freq_ghz < 1.0 || carrier_freq_ghz > 100.0) {
            throw ConfigError("carrier_freq_ghz must lie in [1, 100]");
        }
        if (!std::isfinite(rain_rate_mmh) || rain_rate_mmh < 0.0) {
            throw ConfigError("rain_rate_mmh must be finite and non-negative");
        }
        if (!std::isfinite(reflection_coeff)) throw ConfigError("reflection_coeff must be finite");
        if (!(null_floor > 0.0)) throw ConfigError("null_floor must be positive");
    }

    [[nodiscard]] double wavelength_m() const { return kSpeedOfLight / (carrier_freq_ghz * 1e9); }
};

/// Link geometry over a flat sea surface.
struct Geometry {
    double d2d_m = 1.0;
    double h_tx_m = 10.0;
    double h_rx_m = 10.0;

    void validate() const
    {
        if (!(d2d_m > 0.0) || !(h_tx_m > 0.0) || !(h_rx_m > 0.0) || !std::isfinite(d2d_m) ||
            !std::isfinite(h_tx_m) || !std::isfinite(h_rx_m)) {
            throw DomainError("geometry requires positive finite d2d and heights");
        }
    }

    [[nodiscard]] double direct_m() const { return std::hypot(d2d_m, h_tx_m - h_rx_m); }
    [[nodiscard]] double reflected_m() const { return std::hypot(d2d_m, h_tx_m + h_rx_m); }

    /// reflected - direct, computed as 4 h_t h_r / (reflected + direct) so it
    /// stays accurate when both path lengths are large.
    [[nodiscard]] double path_difference_m() const
    {
        return 4.0 * h_tx_m * h_rx_m / (reflected_m() + direct_m());
    }
};

inline double alpha_freq_coeff(double f_ghz)
{
    require_finite(f_ghz, "frequency");
    if (f_ghz < 0.0) throw DomainError("frequency must be non-negative");
    return 1.091 * std::exp(-0.06256 * f_ghz) + 0.06982;
}

struct PathLoss {
    double db = 0.0;
    /// The two rays cancelled below the null floor and the magnitude was clamped.
    bool deep_null = false;
};

/// PL = -20 log10( lambda/(4 pi d) * |1 + R exp(j alpha 2 pi dd / lambda)| ).
/// classical_two_ray fixes alpha = 1, free_space drops the reflected ray.
inline PathLoss path_loss(const Geometry& geom, const ChannelParams& params)
{
    geom.validate();
    // Extended precision: the phase reaches thousands of radians at mmWave and
    // near a null the dB value is sensitive to its last bits.
    using ld = long double;
    const ld lambda = static_cast<ld>(kSpeedOfLight) / (static_cast<ld>(params.carrier_freq_ghz) * 1e9L);
    const ld d2d = geom.d2d_m, ht = geom.h_tx_m, hr = geom.h_rx_m;
    const ld direct = std::hypot(d2d, ht - hr);
    const ld reflected = std::hypot(d2d, ht + hr);
    const ld pi = std::numbers::pi_v<ld>;
    const ld fspl_db = 20.0L * std::log10(4.0L * pi * direct / lambda);
    if (params.model == PathLossModel::free_space) return {static_cast<double>(fspl_db), false};

    ld alpha = 1.0L;
    if (params.alpha_override) {
        alpha = *params.alpha_override;
    } else if (params.model == PathLossModel::modified_two_ray) {
        require_finite(params.carrier_freq_ghz, "frequency");
        alpha = 1.091L * std::exp(-0.06256L * static_cast<ld>(params.carrier_freq_ghz)) + 0.06982L;
    }

    const ld r = params.reflection_coeff;
    const ld path_diff = 4.0L * ht * hr / (reflected + direct);
    const ld phase = alpha * 2.0L * pi * path_diff / lambda;
    // |1 + R e^{j phi}|^2 = (1 + R)^2 - 4 R sin^2(phi / 2); stable near R = -1, phi = 0.
    const ld s = std::sin(0.5L * phase);
    const ld mag2 = (1.0L + r) * (1.0L + r) - 4.0L * r * s * s;
    ld mag = std::sqrt(std::max(mag2, 0.0L));
    bool clamped = false;
    if (mag < static_cast<ld>(params.null_floor)) {
        mag = params.null_floor;
        clamped = true;
    }
    return {static_cast<double>(fspl_db - 20.0L * std::log10(mag)), clamped};
}

struct CurvePoint {
    double distance_m = 0.0;
    double value = 0.0;
};

/// Number of strict interior local maxima of a sampled curve.
inline int peak_count(std::span<const CurvePoint> curve)
{
    if (curve.size() < 3) throw DomainError("peak_count needs at least 3 samples");
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (!(curve[i].distance_m > curve[i - 1].distance_m)) {
            throw DomainError("peak_count needs strictly increasing distances");
        }
    }
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        if (curve[i].value > curve[i - 1].value && curve[i].value > curve[i + 1].value) ++peaks;
    }
    return peaks;
}

/// Samples path loss over [d_min, d_max] in `step` increments (inclusive ends).
inline std::vector<CurvePoint> path_loss_curve(const ChannelParams& params, double h_tx, double h_rx,
                                               double d_min, double d_max, double step)
{
    if (!(step > 0.0) || !(d_max >= d_min) || !(d_min > 0.0)) throw DomainError("bad curve range");
    std::vector<CurvePoint> out;
    const auto n = static_cast<std::size_t>(std::floor((d_max - d_min) / step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = d_min + static_cast<double>(i) * step;
        out.push_back({d, path_loss(Geometry{d, h_tx, h_rx}, params).db});
    }
    return out;
}

struct RainPowerLaw {
    double k = 0.0;
    double alpha = 0.0;
};

inline RainPowerLaw rain_power_law(double f_ghz, const RainCoefficients& rc)
{
    require_finite(f_ghz, "frequency");
    if (!(f_ghz > 0.0)) throw DomainError("frequency must be positive");
    const double x = std::log10(f_ghz);
    auto gauss = [x](const GaussTerm& t) {
        const double u = (x - t.b) / t.c;
        return t.a * std::exp(-u * u);
    };
    double log10k = rc.m_k * x + rc.c_k;
    for (const auto& t : rc.k_terms) log10k += gauss(t);
    double alpha = rc.m_alpha * x + rc.c_alpha;
    for (const auto& t : rc.alpha_terms) alpha += gauss(t);
    return {std::pow(10.0, log10k), alpha};
}

/// Specific rain attenuation gamma = k rho^alpha in dB/km.
inline double rain_specific_attenuation(const ChannelParams& params, const RainCoefficientTable& table)
{
    require_finite(params.rain_rate_mmh, "rain rate");
    if (params.rain_rate_mmh < 0.0) throw DomainError("rain rate must be non-negative");
    const auto law = rain_power_law(params.carrier_freq_ghz, table.get(params.polarization));
    if (params.rain_rate_mmh == 0.0) return 0.0;
    return law.k * std::pow(params.rain_rate_mmh, law.alpha);
}

inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    require_finite(bandwidth_hz, "bandwidth");
    require_finite(noise_figure_db, "noise figure");
    if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

} // namespace iabsim
