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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iabsim {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s, exact
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---- error hierarchy -----------------------------------------------------
//
// Every failure the library reports derives from iabsim::Error so callers can
// catch the family; the concrete type tells the CLI which exit code to use.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside a function's mathematical domain (non-finite, non-positive, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Scenario / data-file problems. Maps to CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// Field value that does not fit its wire width.
struct RangeError : Error {
    using Error::Error;
};

/// Byte buffer of the wrong length for a codec.
struct FramingError : Error {
    using Error::Error;
};

/// Not a forest rooted at donors (cycle, unknown parent, donor with parent...).
struct TopologyError : ConfigError {
    using ConfigError::ConfigError;
};

/// No forwarding entry for a destination.
struct RoutingError : Error {
    using Error::Error;
};

/// Packet carries a flow id the classifier does not know.
struct ClassificationError : Error {
    using Error::Error;
};

/// A run-time invariant (half-duplex, conservation, causality) was breached.
/// Maps to CLI exit code 3.
struct InvariantViolation : Error {
    using Error::Error;
};

// ---- small value types ---------------------------------------------------

/// Index of a node (donor or IAB-node) in a scenario.
using NodeId = int;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

    [[nodiscard]] double norm() const { return std::sqrt(x * x + y * y + z * z); }
    [[nodiscard]] double norm2d() const { return std::hypot(x, y); }
};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-180, 180].
inline double wrap_deg(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin)
{
    return lin > 0.0 ? 10.0 * std::log10(lin) : kNegInf;
}

inline void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// ---- deterministic hashing for seed derivation ---------------------------
//
// std::hash is not stable across standard libraries, so seeds are derived
// with FNV-1a followed by the splitmix64 finalizer.

inline constexpr std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view key, std::uint64_t index)
{
    return base ^ splitmix64(fnv1a64(key) ^ splitmix64(index));
}

/// mt19937_64 with a recorded seed; split() derives independent named streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] Rng split(std::string_view name, std::uint64_t index = 0) const
    {
        return Rng(derive_seed(seed_, name, index));
    }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace iabsim
