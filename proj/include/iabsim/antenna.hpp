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

// 3GPP TR 38.901 element pattern on a uniform planar array, with analog
// beamforming from a 2D DFT codebook (one beam per element pair).
//
// Panel frame: boresight along local +x, columns along local +y, rows along
// local +z. Angles are degrees; azimuth is measured from +x toward +y.

#include "iabsim/core.hpp"

#include <vector>

namespace iabsim {

struct UpaConfig {
    int n_rows = 8;
    int n_cols = 8;
    double element_spacing_wavelengths = 0.5;
    double element_max_gain_dbi = 13.0;
    double boresight_azimuth_deg = 0.0;
    double boresight_elevation_deg = 0.0;

    [[nodiscard]] int element_count() const { return n_rows * n_cols; }
    [[nodiscard]] int codebook_size() const { return n_rows * n_cols; }

    void validate() const
    {
        if (n_rows <= 0 || n_cols <= 0) throw ConfigError("UPA needs positive row and column counts");
        if (!(element_spacing_wavelengths > 0.0)) throw ConfigError("element spacing must be positive");
        require_finite(element_max_gain_dbi, "element gain");
        require_finite(boresight_azimuth_deg, "boresight azimuth");
        require_finite(boresight_elevation_deg, "boresight elevation");
    }
};

struct Beam {
    double steering_azimuth_deg = 0.0;
    double steering_elevation_deg = 0.0;
    int codebook_index = 0;
    /// Spatial frequencies u_h = cos(el) sin(az), u_v = sin(el) the beam is phased for.
    double u_h = 0.0;
    double u_v = 0.0;
    /// False when (u_h, u_v) lies outside the unit circle (no real steering angle).
    bool visible = true;
};

/// Direction in a panel's local frame.
struct LocalAngles {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

inline LocalAngles to_panel_frame(Vec3 dir, const UpaConfig& cfg)
{
    const double n = dir.norm();
    if (!(n > 0.0)) throw DomainError("direction vector must be non-zero");
    const double x = dir.x / n, y = dir.y / n, z = dir.z / n;
    const double az = deg2rad(cfg.boresight_azimuth_deg);
    const double el = deg2rad(cfg.boresight_elevation_deg);
    const double x1 = x * std::cos(az) + y * std::sin(az);
    const double y1 = -x * std::sin(az) + y * std::cos(az);
    const double x2 = x1 * std::cos(el) + z * std::sin(el);
    const double z2 = -x1 * std::sin(el) + z * std::cos(el);
    return {rad2deg(std::atan2(y1, x2)), rad2deg(std::asin(std::clamp(z2, -1.0, 1.0)))};
}

/// Element gain: max gain minus the parabolic 65-degree-HPBW cuts, each cut and
/// the combined attenuation capped at 30 dB.
inline double element_gain_db(double azimuth_off_deg, double elevation_off_deg, const UpaConfig& cfg)
{
    const double phi = wrap_deg(azimuth_off_deg);
    const double theta = std::clamp(elevation_off_deg, -90.0, 90.0);
    const double a_h = std::min(12.0 * (phi / 65.0) * (phi / 65.0), 30.0);
    const double a_v = std::min(12.0 * (theta / 65.0) * (theta / 65.0), 30.0);
    return cfg.element_max_gain_dbi - std::min(a_h + a_v, 30.0);
}

namespace detail {

// |sum_{n<N} exp(j n x)|
inline double dirichlet_magnitude(int n, double x)
{
    const double den = std::sin(0.5 * x);
    if (std::abs(den) < 1e-12) return n;
    return std::abs(std::sin(0.5 * n * x) / den);
}

inline double beam_spatial_freq(int k, int n, double spacing)
{
    // DFT grid: phase step psi_k = 2 pi k / n - pi.
    return (static_cast<double>(k) / n - 0.5) / spacing;
}

} // namespace detail

inline Beam codebook_beam(int index, const UpaConfig& cfg)
{
    if (index < 0 || index >= cfg.codebook_size()) throw DomainError("codebook index out of range");
    Beam b;
    b.codebook_index = index;
    const int r = index / cfg.n_cols;
    const int c = index % cfg.n_cols;
    b.u_h = detail::beam_spatial_freq(c, cfg.n_cols, cfg.element_spacing_wavelengths);
    b.u_v = detail::beam_spatial_freq(r, cfg.n_rows, cfg.element_spacing_wavelengths);
    if (cfg.n_cols == 1) b.u_h = 0.0;
    if (cfg.n_rows == 1) b.u_v = 0.0;
    b.visible = b.u_h * b.u_h + b.u_v * b.u_v <= 1.0 + 1e-12;
    const double el = std::asin(std::clamp(b.u_v, -1.0, 1.0));
    const double ce = std::cos(el);
    b.steering_elevation_deg = rad2deg(el);
    b.steering_azimuth_deg = ce > 0.0 ? rad2deg(std::asin(std::clamp(b.u_h / ce, -1.0, 1.0))) : 0.0;
    return b;
}

inline std::vector<Beam> codebook(const UpaConfig& cfg)
{
    std::vector<Beam> out;
    out.reserve(static_cast<std::size_t>(cfg.codebook_size()));
    for (int i = 0; i < cfg.codebook_size(); ++i) out.push_back(codebook_beam(i, cfg));
    return out;
}

/// Array gain in dB relative to one element: 20 log10|sum of phase terms| - 10 log10 N,
/// so a perfectly steered N-element array yields 10 log10 N.
inline double array_factor_db(const Beam& beam, LocalAngles direction, const UpaConfig& cfg)
{
    const double az = deg2rad(direction.azimuth_deg);
    const double el = deg2rad(direction.elevation_deg);
    const double u_h = std::cos(el) * std::sin(az);
    const double u_v = std::sin(el);
    const double k = 2.0 * kPi * cfg.element_spacing_wavelengths;
    const double mag = detail::dirichlet_magnitude(cfg.n_cols, k * (u_h - beam.u_h)) *
                       detail::dirichlet_magnitude(cfg.n_rows, k * (u_v - beam.u_v));
    const double floor = 1e-15;
    return 20.0 * std::log10(std::max(mag, floor)) - 10.0 * std::log10(cfg.element_count());
}

/// Element pattern plus array factor toward a local direction.
inline double total_gain_db(const Beam& beam, LocalAngles direction, const UpaConfig& cfg)
{
    return element_gain_db(direction.azimuth_deg, direction.elevation_deg, cfg) +
           array_factor_db(beam, direction, cfg);
}

inline double total_gain_db(const Beam& beam, Vec3 global_dir, const UpaConfig& cfg)
{
    return total_gain_db(beam, to_panel_frame(global_dir, cfg), cfg);
}

/// Codebook entry with the largest array factor toward rx; ties go to the
/// lowest index. The UPA factor is separable, so the row and column beams are
/// chosen independently (lowest index wins within each cut).
inline Beam select_beam(Vec3 tx_pos, Vec3 rx_pos, const UpaConfig& cfg)
{
    const Vec3 dir = rx_pos - tx_pos;
    if (!(dir.norm() > 0.0)) throw DomainError("select_beam: coincident positions");
    const LocalAngles la = to_panel_frame(dir, cfg);
    const double az = deg2rad(la.azimuth_deg);
    const double el = deg2rad(la.elevation_deg);
    const double u_h = std::cos(el) * std::sin(az);
    const double u_v = std::sin(el);
    const double k = 2.0 * kPi * cfg.element_spacing_wavelengths;

    auto best_in_cut = [&](int n, double u) {
        int best = 0;
        double best_mag = -1.0;
        for (int i = 0; i < n; ++i) {
            const double ui = n == 1 ? 0.0 : detail::beam_spatial_freq(i, n, cfg.element_spacing_wavelengths);
            const double mag = detail::dirichlet_magnitude(n, k * (u - ui));
            if (mag > best_mag * (1.0 + 1e-12)) {
                best_mag = mag;
                best = i;
            }
        }
        return best;
    };
    const int c = best_in_cut(cfg.n_cols, u_h);
    const int r = best_in_cut(cfg.n_rows, u_v);
    return codebook_beam(r * cfg.n_cols + c, cfg);
}

} // namespace iabsim
