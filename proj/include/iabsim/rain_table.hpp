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

#include "iabsim/core.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>

namespace iabsim {

enum class Polarization { vertical, horizontal };

inline std::string_view to_string(Polarization p)
{
    return p == Polarization::vertical ? "vertical" : "horizontal";
}

inline Polarization polarization_from_string(std::string_view s)
{
    if (s == "vertical" || s == "v") return Polarization::vertical;
    if (s == "horizontal" || s == "h") return Polarization::horizontal;
    throw ConfigError("unknown polarization '" + std::string(s) + "'");
}

/// One term a*exp(-((log10 f - b)/c)^2) of the P.838 regression.
struct GaussTerm {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
};

/// Coefficients for one polarization: log10(k) uses 4 terms, alpha uses 5.
struct RainCoefficients {
    std::array<GaussTerm, 4> k_terms{};
    double m_k = 0.0;
    double c_k = 0.0;
    std::array<GaussTerm, 5> alpha_terms{};
    double m_alpha = 0.0;
    double c_alpha = 0.0;
};

struct RainCoefficientTable {
    std::optional<RainCoefficients> horizontal;
    std::optional<RainCoefficients> vertical;
    int format_version = 0;

    [[nodiscard]] const RainCoefficients& get(Polarization p) const
    {
        const auto& slot = p == Polarization::vertical ? vertical : horizontal;
        if (!slot) {
            throw ConfigError("rain coefficient table has no " + std::string(to_string(p)) +
                              " polarization entries");
        }
        return *slot;
    }
};

namespace detail {

// Byte-for-byte copy of data/itu_r_p838_3.txt so the library works without
// the data directory. tests/test_channel.cpp checks the two stay in sync.
inline constexpr std::string_view kBundledRainTable = R"(# Rain specific-attenuation coefficients, ITU-R P.838-3 Tables 1-4.
# format_version 1
#
# One section per (coefficient, polarization). Term rows are "j a_j b_j c_j";
# the linear part follows as "m <value>" and "c <value>".
# log10(k) takes 4 Gaussian terms, alpha takes 5.
format_version 1

[k horizontal]
1 -5.33980 -0.10008 1.13098
2 -0.35351  1.26970 0.45400
3 -0.23789  0.86036 0.15354
4 -0.94158  0.64552 0.16817
m -0.18961
c  0.71147

[k vertical]
1 -3.80595  0.56934 0.81061
2 -3.44965 -0.22911 0.51059
3 -0.39902  0.73042 0.11899
4  0.50167  1.07319 0.27195
m -0.16398
c  0.63297

[alpha horizontal]
1  -0.14318  1.82442 -0.55187
2   0.29591  0.77564  0.19822
3   0.32177  0.63773  0.13164
4  -5.37610 -0.96230  1.47828
5  16.1721  -3.29980  3.43990
m   0.67849
c  -1.95537

[alpha vertical]
1  -0.07771  2.33840  -0.76284
2   0.56727  0.95545   0.54039
3  -0.20238  1.14520   0.26809
4 -48.2991   0.791669  0.116226
5  48.5833   0.791459  0.116479
m  -0.053739
c   0.83433
)";

struct SectionAccum {
    std::array<GaussTerm, 5> terms{};
    std::array<bool, 5> seen{};
    int count = 0;
    std::optional<double> m;
    std::optional<double> c;
};

} // namespace detail

/// Parses the plain-text coefficient format (see data/itu_r_p838_3.txt).
/// A polarization is usable only when both its k and alpha sections are
/// present and complete; partial sections are rejected.
inline RainCoefficientTable parse_rain_table(std::istream& in, const std::string& origin = "<stream>")
{
    enum Part { k_part, alpha_part };
    std::array<std::array<std::optional<detail::SectionAccum>, 2>, 2> sections; // [part][pol]
    RainCoefficientTable table;

    int line_no = 0;
    std::string line;
    detail::SectionAccum* cur = nullptr;
    int cur_terms = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (tok == "format_version") {
            if (!(ls >> table.format_version)) fail("bad format_version");
            continue;
        }
        if (tok.front() == '[') {
            std::string pol;
            ls >> pol;
            if (pol.empty() || pol.back() != ']') fail("malformed section header");
            pol.pop_back();
            std::string part = tok.substr(1);
            int p;
            if (part == "k") p = k_part;
            else if (part == "alpha") p = alpha_part;
            else fail("unknown coefficient '" + part + "'");
            int q = 0;
            try {
                q = polarization_from_string(pol) == Polarization::vertical ? 1 : 0;
            } catch (const ConfigError& e) {
                fail(e.what());
            }
            if (sections[p][q]) fail("duplicate section");
            sections[p][q].emplace();
            cur = &*sections[p][q];
            cur_terms = p == k_part ? 4 : 5;
            continue;
        }
        if (!cur) fail("data outside a section");
        double value = 0.0;
        if (tok == "m" || tok == "c") {
            if (!(ls >> value)) fail("missing value for '" + tok + "'");
            (tok == "m" ? cur->m : cur->c) = value;
            continue;
        }
        int j = 0;
        try {
            j = std::stoi(tok);
        } catch (const std::exception&) {
            fail("expected term index, got '" + tok + "'");
        }
        if (j < 1 || j > cur_terms) {
            fail("term index " + std::to_string(j) + " out of range 1.." + std::to_string(cur_terms));
        }
        GaussTerm t;
        if (!(ls >> t.a >> t.b >> t.c)) fail("term row needs a b c");
        if (t.c == 0.0) fail("c_j must be non-zero");
        if (cur->seen[j - 1]) fail("duplicate term " + std::to_string(j));
        cur->terms[j - 1] = t;
        cur->seen[j - 1] = true;
        ++cur->count;
    }

    for (int q = 0; q < 2; ++q) {
        const auto& ks = sections[k_part][q];
        const auto& as = sections[alpha_part][q];
        const char* pol = q == 1 ? "vertical" : "horizontal";
        if (!ks && !as) continue;
        if (!ks || !as) {
            throw ConfigError(origin + ": " + pol + " polarization needs both k and alpha sections");
        }
        if (ks->count != 4) {
            throw ConfigError(origin + ": k " + pol + " must have exactly 4 terms, found " +
                              std::to_string(ks->count));
        }
        if (as->count != 5) {
            throw ConfigError(origin + ": alpha " + pol + " must have exactly 5 terms, found " +
                              std::to_string(as->count));
        }
        if (!ks->m || !ks->c || !as->m || !as->c) {
            throw ConfigError(origin + ": " + pol + " sections need both m and c");
        }
        RainCoefficients rc;
        for (int j = 0; j < 4; ++j) rc.k_terms[j] = ks->terms[j];
        for (int j = 0; j < 5; ++j) rc.alpha_terms[j] = as->terms[j];
        rc.m_k = *ks->m;
        rc.c_k = *ks->c;
        rc.m_alpha = *as->m;
        rc.c_alpha = *as->c;
        (q == 1 ? table.vertical : table.horizontal) = rc;
    }
    if (!table.vertical && !table.horizontal) throw ConfigError(origin + ": no coefficient sections");
    return table;
}

inline RainCoefficientTable load_rain_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rain coefficient file '" + path + "'");
    return parse_rain_table(in, path);
}

inline const RainCoefficientTable& bundled_rain_table()
{
    static const RainCoefficientTable table = [] {
        std::istringstream in{std::string(detail::kBundledRainTable)};
        return parse_rain_table(in, "<bundled>");
    }();
    return table;
}

} // namespace iabsim
