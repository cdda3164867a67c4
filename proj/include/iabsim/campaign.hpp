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

// Parameter sweeps: a base scenario, named axes, and a run count per grid
// point. Run i of a point uses derive_seed(base seed, point key, i), so any
// single run can be reproduced on its own with run().

#include "iabsim/engine.hpp"
#include "iabsim/scenario_io.hpp"

#include <atomic>
#include <mutex>
#include <thread>

namespace iabsim {

struct GridAxis {
    std::string name;
    std::vector<std::string> values;
};

/// One combination of axis values, in axis order.
struct GridPoint {
    std::vector<std::pair<std::string, std::string>> params;

    /// "name=value;name=value", stable and used for seed derivation.
    [[nodiscard]] std::string key() const
    {
        std::string k;
        for (const auto& [n, v] : params) {
            if (!k.empty()) k += ';';
            k += n + "=" + v;
        }
        return k;
    }

    /// Filesystem-friendly form of key().
    [[nodiscard]] std::string dir_name() const
    {
        std::string k;
        for (const auto& [n, v] : params) {
            if (!k.empty()) k += "__";
            k += n + "-" + v;
        }
        for (auto& c : k) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
        }
        return k.empty() ? "base" : k;
    }
};

namespace detail {

inline double to_double(const std::string& name, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("sweep axis '" + name + "': '" + v + "' is not a number");
    }
}

inline int to_int(const std::string& name, const std::string& v)
{
    const double d = to_double(name, v);
    if (d != std::floor(d)) throw ConfigError("sweep axis '" + name + "': '" + v + "' is not an integer");
    return static_cast<int>(d);
}

} // namespace detail

inline const std::vector<std::string>& sweep_parameter_names()
{
    static const std::vector<std::string> names = {
        "topology",     "rain_rate_mmh", "dl_rate_mbps", "ul_rate_factor",        "pattern",
        "mux",          "n_s_odd",       "du_bandwidth_fraction", "duration_s", "polarization",
        "traffic_kind", "reflection_coeff"};
    return names;
}

/// Applies one named parameter. "topology" swaps in the built-in deployment
/// and keeps every other setting.
inline void apply_param(Scenario& s, const std::string& name, const std::string& value)
{
    using detail::to_double;
    if (name == "topology") {
        auto b = builtin_topology(detail::to_int(name, value));
        s.nodes = b.nodes;
        s.flows.clear();
        s.name = b.name;
    } else if (name == "rain_rate_mmh") {
        s.channel.rain_rate_mmh = to_double(name, value);
    } else if (name == "dl_rate_mbps") {
        s.traffic.dl_rate_bps = to_double(name, value) * 1e6;
    } else if (name == "ul_rate_factor") {
        s.traffic.ul_rate_factor = to_double(name, value);
    } else if (name == "pattern") {
        s.pattern = SlotPattern::from_name(value);
    } else if (name == "mux") {
        s.mux.mode = mux_mode_from_string(value);
    } else if (name == "n_s_odd") {
        s.mux.n_s_odd = detail::to_int(name, value);
    } else if (name == "du_bandwidth_fraction") {
        s.mux.du_bandwidth_fraction = to_double(name, value);
    } else if (name == "duration_s") {
        s.duration_s = to_double(name, value);
    } else if (name == "polarization") {
        s.channel.polarization = polarization_from_string(value);
    } else if (name == "traffic_kind") {
        s.default_kind = traffic_kind_from_string(value);
    } else if (name == "reflection_coeff") {
        s.channel.reflection_coeff = to_double(name, value);
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

struct SweepSpec {
    Scenario base;
    std::vector<GridAxis> axes;
    int runs = 1;

    /// Cartesian product, last axis fastest.
    [[nodiscard]] std::vector<GridPoint> points() const
    {
        std::vector<GridPoint> out{GridPoint{}};
        for (const auto& ax : axes) {
            if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.name + "' has no values");
            std::vector<GridPoint> next;
            for (const auto& p : out) {
                for (const auto& v : ax.values) {
                    GridPoint q = p;
                    q.params.emplace_back(ax.name, v);
                    next.push_back(q);
                }
            }
            out = std::move(next);
        }
        return out;
    }

    /// Scenario for run `run_index` of `point`, seed already derived.
    [[nodiscard]] Scenario scenario_for(const GridPoint& point, int run_index) const
    {
        Scenario s = base;
        for (const auto& [n, v] : point.params) apply_param(s, n, v);
        s.seed = derive_seed(base.seed, point.key(), static_cast<std::uint64_t>(run_index));
        validate(s);
        return s;
    }
};

/// Grid file: {"base": <scenario or {"topology": k}>, "axes": {"name": [values...]}, "runs": n}.
/// Axis values may be numbers or strings. Axes are ordered by name, so the
/// grid does not depend on key order in the file.
inline SweepSpec parse_sweep(const Json& j)
{
    detail::check_keys(j, "sweep", {"base", "axes", "runs"});
    SweepSpec spec;
    spec.base = j.contains("base") ? scenario_from_json(j["base"]) : builtin_topology(1);
    spec.runs = j.value("runs", spec.base.run_count);
    if (spec.runs <= 0) throw ConfigError("sweep: runs must be positive");
    if (auto it = j.find("axes"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("sweep.axes: expected an object");
        for (const auto& [name, vals] : it->items()) {
            const auto& known = sweep_parameter_names();
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                throw ConfigError("unknown sweep parameter '" + name + "'");
            }
            GridAxis ax{name, {}};
            if (!vals.is_array()) throw ConfigError("sweep.axes." + name + ": expected an array");
            for (const auto& v : vals) {
                if (v.is_string()) {
                    ax.values.push_back(v.get<std::string>());
                } else if (v.is_number_integer()) {
                    ax.values.push_back(std::to_string(v.get<long long>()));
                } else if (v.is_number()) {
                    ax.values.push_back(fmt_double(v.get<double>()));
                } else {
                    throw ConfigError("sweep.axes." + name + ": values must be numbers or strings");
                }
            }
            spec.axes.push_back(ax);
        }
    }
    for (const auto& p : spec.points()) (void)spec.scenario_for(p, 0); // validate every point up front
    return spec;
}

inline SweepSpec load_sweep(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": parse error at byte " + std::to_string(e.byte));
    }
    return parse_sweep(j);
}

struct CampaignRun {
    GridPoint point;
    int run_index = 0;
    std::uint64_t seed = 0;
    MetricsBundle bundle;
};

struct CampaignOptions {
    /// Where to write <point>/run_<i>/; empty: keep in memory only.
    std::optional<std::filesystem::path> out_dir;
    /// Bundles are handed here in (point, run) order; when set they are not
    /// kept in the returned vector.
    std::function<void(CampaignRun&&)> consume;
    unsigned threads = 1;
    RunOptions run;
};

inline std::string run_dir_name(int i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%03d", i);
    return buf;
}

/// Runs every (point, run). Results do not depend on the thread count.
inline std::vector<CampaignRun> run_campaign(const SweepSpec& spec, const CampaignOptions& opt = {})
{
    struct Job {
        GridPoint point;
        int run = 0;
    };
    std::vector<Job> jobs;
    for (const auto& p : spec.points()) {
        for (int r = 0; r < spec.runs; ++r) jobs.push_back({p, r});
    }

    std::vector<std::optional<CampaignRun>> slots(jobs.size());
    std::vector<CampaignRun> kept;
    std::mutex mu;
    std::size_t emitted = 0;
    std::exception_ptr failure;

    auto emit_ready = [&] {
        // Caller holds mu. Hand results out strictly in job order.
        while (emitted < slots.size() && slots[emitted]) {
            CampaignRun r = std::move(*slots[emitted]);
            slots[emitted].reset();
            ++emitted;
            if (opt.out_dir) write_bundle(r.bundle, *opt.out_dir / r.point.dir_name() / run_dir_name(r.run_index));
            if (opt.consume) {
                opt.consume(std::move(r));
            } else {
                kept.push_back(std::move(r));
            }
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const auto j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                const Scenario s = spec.scenario_for(jobs[j].point, jobs[j].run);
                CampaignRun r{jobs[j].point, jobs[j].run, s.seed, run(s, opt.run)};
                std::lock_guard lock(mu);
                slots[j] = std::move(r);
                emit_ready();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = jobs.size();
                return;
            }
        }
    };

    const unsigned n_threads = std::max(1u, opt.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return kept;
}

} // namespace iabsim
