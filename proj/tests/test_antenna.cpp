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

#include "iabsim/antenna.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

using namespace iabsim;

namespace {

// Brute-force |sum over all elements| of the residual phase, element (m, n)
// at (column m, row n), normalised like array_factor_db.
double oracle_af_db(const Beam& b, LocalAngles dir, const UpaConfig& cfg)
{
    const double az = deg2rad(dir.azimuth_deg), el = deg2rad(dir.elevation_deg);
    const double uh = std::cos(el) * std::sin(az), uv = std::sin(el);
    const double k = 2.0 * std::acos(-1.0) * cfg.element_spacing_wavelengths;
    std::complex<double> sum = 0.0;
    for (int n = 0; n < cfg.n_rows; ++n) {
        for (int m = 0; m < cfg.n_cols; ++m) {
            sum += std::polar(1.0, k * (m * (uh - b.u_h) + n * (uv - b.u_v)));
        }
    }
    return 20.0 * std::log10(std::abs(sum)) - 10.0 * std::log10(cfg.element_count());
}

double oracle_af_linear(const Beam& b, LocalAngles dir, const UpaConfig& cfg)
{
    return std::pow(10.0, oracle_af_db(b, dir, cfg) / 20.0);
}

} // namespace

TEST(ElementPattern, ReferencePoints)
{
    UpaConfig cfg;
    EXPECT_DOUBLE_EQ(element_gain_db(0, 0, cfg), 13.0);
    EXPECT_NEAR(element_gain_db(65, 0, cfg), 13.0 - 12.0, 1e-12);
    EXPECT_NEAR(element_gain_db(180, 0, cfg), 13.0 - 30.0, 1e-12);
    EXPECT_NEAR(element_gain_db(0, 65, cfg), 13.0 - 12.0, 1e-12);
    EXPECT_NEAR(element_gain_db(60, 60, cfg), 13.0 - 2 * 12.0 * (60.0 / 65) * (60.0 / 65), 1e-12);
    EXPECT_NEAR(element_gain_db(120, 80, cfg), 13.0 - 30.0, 1e-12);
    EXPECT_NEAR(element_gain_db(-65, 0, cfg), element_gain_db(65, 0, cfg), 1e-12);
    EXPECT_NEAR(element_gain_db(365, 0, cfg), element_gain_db(5, 0, cfg), 1e-9);
}

TEST(ArrayFactor, CoherentPeakAtSteeringDirection)
{
    UpaConfig cfg;
    for (int i = 0; i < cfg.codebook_size(); ++i) {
        const auto b = codebook_beam(i, cfg);
        if (!b.visible) continue;
        const LocalAngles dir{b.steering_azimuth_deg, b.steering_elevation_deg};
        EXPECT_NEAR(array_factor_db(b, dir, cfg), 10.0 * std::log10(64.0), 1e-6) << i;
    }
}

TEST(ArrayFactor, SingleElementIsFlat)
{
    UpaConfig cfg;
    cfg.n_rows = cfg.n_cols = 1;
    const auto b = codebook_beam(0, cfg);
    for (double az : {-170.0, -30.0, 0.0, 45.0, 90.0}) {
        EXPECT_NEAR(array_factor_db(b, {az, 10.0}, cfg), 0.0, 1e-12);
    }
}

TEST(ArrayFactor, MatchesBruteForcePhaseSum)
{
    UpaConfig cfg;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> az(-180, 180), el(-89, 89);
    double worst = 0.0;
    for (int t = 0; t < 400; ++t) {
        const LocalAngles dir{az(rng), el(rng)};
        const auto b = codebook_beam(static_cast<int>(rng() % 64), cfg);
        const double lin = std::pow(10.0, array_factor_db(b, dir, cfg) / 20.0);
        worst = std::max(worst, std::abs(lin - oracle_af_linear(b, dir, cfg)));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(ArrayFactor, NullDirectionMatchesBruteForce)
{
    // Beam at broadside, direction one DFT bin away in azimuth: a null of
    // the 8-element column factor.
    UpaConfig cfg;
    const auto b = codebook_beam(4 * cfg.n_cols + 4, cfg); // u_h = u_v = 0
    const double u = 1.0 / (cfg.n_cols * cfg.element_spacing_wavelengths);
    const LocalAngles dir{rad2deg(std::asin(u)), 0.0};
    const double af = array_factor_db(b, dir, cfg);
    EXPECT_LT(af, -100.0);
    EXPECT_LT(oracle_af_linear(b, dir, cfg), 1e-9);
}

TEST(Codebook, SizeAndIndexing)
{
    UpaConfig cfg;
    const auto cb = codebook(cfg);
    ASSERT_EQ(cb.size(), 64u);
    for (int i = 0; i < 64; ++i) EXPECT_EQ(cb[static_cast<std::size_t>(i)].codebook_index, i);
    EXPECT_THROW(codebook_beam(64, cfg), DomainError);
    EXPECT_THROW(codebook_beam(-1, cfg), DomainError);
}

TEST(PanelFrame, RotatesWithBoresight)
{
    UpaConfig cfg;
    auto la = to_panel_frame({1, 0, 0}, cfg);
    EXPECT_NEAR(la.azimuth_deg, 0, 1e-12);
    EXPECT_NEAR(la.elevation_deg, 0, 1e-12);
    cfg.boresight_azimuth_deg = 90;
    la = to_panel_frame({0, 5, 0}, cfg);
    EXPECT_NEAR(la.azimuth_deg, 0, 1e-9);
    la = to_panel_frame({1, 0, 0}, cfg);
    EXPECT_NEAR(la.azimuth_deg, -90, 1e-9);
    la = to_panel_frame({0, 1, 1}, cfg);
    EXPECT_NEAR(la.elevation_deg, 45, 1e-9);
    EXPECT_THROW(to_panel_frame({0, 0, 0}, cfg), DomainError);
}

TEST(SelectBeam, BoresightPicksBroadsideEntry)
{
    UpaConfig cfg;
    const auto b = select_beam({0, 0, 10}, {1000, 0, 10}, cfg);
    EXPECT_NEAR(b.u_h, 0.0, 1e-12);
    EXPECT_NEAR(b.u_v, 0.0, 1e-12);
    EXPECT_EQ(b.codebook_index, 4 * 8 + 4);
}

TEST(SelectBeam, ExhaustiveCodebookScanAgrees)
{
    UpaConfig cfg;
    cfg.boresight_azimuth_deg = 30.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xy(-3000, 3000), z(0, 60);
    const auto cb = codebook(cfg);
    for (int t = 0; t < 300; ++t) {
        const Vec3 tx{0, 0, 10};
        const Vec3 rx{xy(rng), xy(rng), z(rng)};
        const auto dir = to_panel_frame(rx - tx, cfg);
        double best = -1e300;
        int best_i = -1;
        for (const auto& b : cb) {
            const double g = oracle_af_db(b, dir, cfg);
            if (g > best + 1e-9) {
                best = g;
                best_i = b.codebook_index;
            }
        }
        const auto sel = select_beam(tx, rx, cfg);
        EXPECT_NEAR(array_factor_db(sel, dir, cfg), best, 1e-9);
        EXPECT_EQ(sel.codebook_index, best_i);
    }
}

TEST(SelectBeam, IndexMovesMonotonicallyAlongTrajectory)
{
    UpaConfig cfg;
    int prev = -1;
    int changes = 0;
    for (double y = -900; y <= 900; y += 5) {
        const auto b = select_beam({0, 0, 10}, {1000, y, 10}, cfg);
        const int col = b.codebook_index % cfg.n_cols;
        if (prev >= 0) {
            EXPECT_GE(col, prev);
            changes += col != prev;
        }
        prev = col;
    }
    EXPECT_GE(changes, 2);
}

TEST(SelectBeam, Deterministic)
{
    UpaConfig cfg;
    EXPECT_EQ(select_beam({1, 2, 3}, {400, 900, 10}, cfg).codebook_index,
              select_beam({1, 2, 3}, {400, 900, 10}, cfg).codebook_index);
    EXPECT_THROW(select_beam({1, 2, 3}, {1, 2, 3}, cfg), DomainError);
}

TEST(TotalGain, NeverExceedsCoherentBound)
{
    UpaConfig cfg;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(-180, 180), el(-90, 90);
    for (int t = 0; t < 2000; ++t) {
        const auto b = codebook_beam(static_cast<int>(rng() % 64), cfg);
        EXPECT_LE(total_gain_db(b, LocalAngles{az(rng), el(rng)}, cfg), 13.0 + 10.0 * std::log10(64.0) + 1e-9);
    }
}
