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

// Command-line front end.
//
//   iabsim run       one scenario (built-in topology or JSON file), 1..N runs
//   iabsim sweep     a parameter grid from a JSON file
//   iabsim validate  check a scenario file and print its topology
//   iabsim curves    path-loss or rain-attenuation curve as CSV
//   iabsim dump      print a scenario as JSON
//
// Exit status: 0 success, 2 configuration or usage error, 3 invariant
// violation during a run, 1 anything else.

#include "iabsim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace iabsim;

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct RunArgs {
    std::string scenario_file;
    int topology = 0;
    std::optional<double> rain_mmh;
    std::optional<double> dl_rate_mbps;
    std::optional<double> ul_factor;
    std::optional<std::string> pattern;
    std::optional<std::string> mux;
    std::optional<int> n_s_odd;
    std::optional<std::string> polarization;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s;
    std::optional<double> warmup;
    int runs = 1;
    std::string out;
    bool lenient = false;
    bool quiet = false;
};

std::string default_out_dir()
{
    const char* env = std::getenv("IABSIM_OUT_DIR");
    return env && *env ? env : "out";
}

Scenario build_scenario(const RunArgs& a)
{
    Scenario s = a.scenario_file.empty() ? builtin_topology(a.topology) : load_scenario(a.scenario_file);
    if (a.rain_mmh) s.channel.rain_rate_mmh = *a.rain_mmh;
    if (a.dl_rate_mbps) s.traffic.dl_rate_bps = *a.dl_rate_mbps * 1e6;
    if (a.ul_factor) s.traffic.ul_rate_factor = *a.ul_factor;
    if (a.pattern) s.pattern = SlotPattern::from_name(*a.pattern);
    if (a.mux) s.mux.mode = mux_mode_from_string(*a.mux);
    if (a.n_s_odd) s.mux.n_s_odd = *a.n_s_odd;
    if (a.polarization) s.channel.polarization = polarization_from_string(*a.polarization);
    if (a.seed) s.seed = *a.seed;
    if (a.duration_s) s.duration_s = *a.duration_s;
    if (a.warmup) s.warmup_fraction = *a.warmup;
    if (a.lenient) s.strict = false;
    validate(s);
    return s;
}

std::string opt_text(const std::optional<double>& v, int prec = 4)
{
    if (!v) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", prec, *v);
    return buf;
}

void print_summary(const std::string& label, const MetricsBundle& b)
{
    for (const auto* d : {&b.summary.dl, &b.summary.ul}) {
        const auto& t = d->traffic;
        std::cout << label << ' ' << to_string(d->direction) << ": pdr=" << opt_text(t.pdr)
                  << " lat_p50_ms=" << opt_text(t.latency_ms ? std::optional(t.latency_ms->p50) : std::nullopt)
                  << " snr_p50_db=" << opt_text(d->snr_db ? std::optional(d->snr_db->p50) : std::nullopt)
                  << " sinr_p50_db=" << opt_text(d->sinr_db ? std::optional(d->sinr_db->p50) : std::nullopt)
                  << " int_none_share=" << opt_text(d->interference_none_share) << '\n';
    }
}

int cmd_run(const RunArgs& a)
{
    const Scenario s = build_scenario(a);
    const std::filesystem::path out = a.out.empty() ? default_out_dir() : a.out;
    if (a.runs == 1) {
        const auto b = run(s);
        write_bundle(b, out);
        if (!a.quiet) print_summary(s.name, b);
        return 0;
    }
    SweepSpec spec{s, {}, a.runs};
    CampaignOptions opt;
    opt.consume = [&](CampaignRun&& r) {
        write_bundle(r.bundle, out / run_dir_name(r.run_index));
        if (!a.quiet) print_summary(s.name + "/" + run_dir_name(r.run_index), r.bundle);
    };
    run_campaign(spec, opt);
    return 0;
}

int cmd_sweep(const std::string& grid, const std::string& out_arg, unsigned threads, bool quiet)
{
    const auto spec = load_sweep(grid);
    const std::filesystem::path out = out_arg.empty() ? default_out_dir() : out_arg;
    CampaignOptions opt;
    opt.out_dir = out;
    opt.threads = threads;
    opt.consume = [&](CampaignRun&& r) {
        if (!quiet) print_summary(r.point.dir_name() + "/" + run_dir_name(r.run_index), r.bundle);
    };
    run_campaign(spec, opt);
    return 0;
}

int cmd_validate(const std::string& file)
{
    const auto s = load_scenario(file);
    const auto t = validate(s);
    std::cout << "ok: " << s.name << ", " << t.size() << " nodes, " << t.donor_count() << " donor(s), depth "
              << t.max_depth() << '\n';
    for (int i = 0; i < t.size(); ++i) {
        const auto& n = s.nodes[static_cast<std::size_t>(i)];
        std::cout << "  " << n.name << " layer " << t.layer[static_cast<std::size_t>(i)];
        if (n.parent) std::cout << " parent " << *n.parent;
        std::cout << '\n';
    }
    return 0;
}

struct CurveArgs {
    std::string kind = "pl";
    std::string model = "modified_two_ray";
    double freq_ghz = 26.0;
    double h_tx = 10.0;
    double h_rx = 10.0;
    double d_min = 10.0;
    double d_max = 4000.0;
    double step = 1.0;
    double reflection = -1.0;
    double rain_max = 200.0;
    double rain_step = 1.0;
    std::string out;
};

int cmd_curves(const CurveArgs& a)
{
    ChannelParams ch;
    ch.carrier_freq_ghz = a.freq_ghz;
    ch.reflection_coeff = a.reflection;
    ch.model = path_loss_model_from_string(a.model);
    ch.validate();
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw ConfigError("cannot write '" + a.out + "'");
    }
    std::ostream& os = a.out.empty() ? std::cout : file;
    if (a.kind == "rain") {
        if (!(a.rain_step > 0.0) || !(a.rain_max >= 0.0)) throw ConfigError("bad rain curve range");
        const auto& table = bundled_rain_table();
        os << "rain_rate_mmh,gamma_h_db_per_km,gamma_v_db_per_km\n";
        const auto n = static_cast<long>(std::floor(a.rain_max / a.rain_step + 1e-9));
        for (long i = 0; i <= n; ++i) {
            ch.rain_rate_mmh = static_cast<double>(i) * a.rain_step;
            ch.polarization = Polarization::horizontal;
            const double gh = rain_specific_attenuation(ch, table);
            ch.polarization = Polarization::vertical;
            const double gv = rain_specific_attenuation(ch, table);
            os << fmt_double(ch.rain_rate_mmh) << ',' << fmt_double(gh) << ',' << fmt_double(gv) << '\n';
        }
        return 0;
    }
    const auto curve = path_loss_curve(ch, a.h_tx, a.h_rx, a.d_min, a.d_max, a.step);
    os << "distance_m,pl_db\n";
    for (const auto& p : curve) os << fmt_double(p.distance_m) << ',' << fmt_double(p.value) << '\n';
    if (curve.size() >= 3) std::cerr << "peaks: " << peak_count(curve) << '\n';
    return 0;
}

int cmd_dump(const RunArgs& a)
{
    std::cout << dump_scenario(build_scenario(a));
    return 0;
}

void add_scenario_options(CLI::App* c, RunArgs& a)
{
    auto* file = c->add_option("--scenario", a.scenario_file, "Scenario JSON file")->check(CLI::ExistingFile);
    c->add_option("--topology", a.topology, "Built-in topology 1..4")->check(CLI::Range(1, 4))->excludes(file);
    c->add_option("--rain", a.rain_mmh, "Rain rate in mm/h");
    c->add_option("--dl-rate", a.dl_rate_mbps, "DL rate per node in Mb/s");
    c->add_option("--ul-factor", a.ul_factor, "UL rate as a fraction of the DL rate");
    c->add_option("--pattern", a.pattern, "TDD pattern: 4DS2U, 3DS2U or a D/S/U string");
    c->add_option("--mux", a.mux, "Multiplexing: tdm or fdm");
    c->add_option("--ns-odd", a.n_s_odd, "TDM data symbols for odd-layer transmitters (0..12)");
    c->add_option("--polarization", a.polarization, "vertical or horizontal");
    c->add_option("--seed", a.seed, "Base seed");
    c->add_option("--duration", a.duration_s, "Simulated time in seconds");
    c->add_option("--warmup", a.warmup, "Share of simulated time excluded from PDR/latency (0 disables)");
    c->add_flag("--lenient", a.lenient, "Count half-duplex violations instead of aborting");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"iabsim: slot-level simulator for multi-hop maritime IAB networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "iabsim 1.0");

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
    add_scenario_options(run_cmd, ra);
    run_cmd->add_option("--runs", ra.runs, "Independent runs; more than one writes run_XXX subdirectories")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", ra.out, "Output directory (default: $IABSIM_OUT_DIR or ./out)");
    run_cmd->add_flag("--quiet", ra.quiet, "Do not print the summary");

    std::string grid, sweep_out;
    unsigned threads = 1;
    bool sweep_quiet = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
    sweep_cmd->add_option("--grid", grid, "Grid JSON file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sweep_out, "Output directory (default: $IABSIM_OUT_DIR or ./out)");
    sweep_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--quiet", sweep_quiet, "Do not print summaries");

    std::string validate_file;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("file", validate_file, "Scenario JSON file")->required();

    CurveArgs ca;
    auto* curves_cmd = app.add_subcommand("curves", "Print a path-loss curve as CSV");
    curves_cmd->add_option("--kind", ca.kind, "pl (path loss vs distance) or rain (gamma vs rain rate)")
        ->check(CLI::IsMember({"pl", "rain"}));
    curves_cmd->add_option("--model", ca.model, "modified_two_ray, classical_two_ray or free_space");
    curves_cmd->add_option("--freq", ca.freq_ghz, "Carrier frequency in GHz");
    curves_cmd->add_option("--htx", ca.h_tx, "Transmitter height in m");
    curves_cmd->add_option("--hrx", ca.h_rx, "Receiver height in m");
    curves_cmd->add_option("--dmin", ca.d_min, "First distance in m");
    curves_cmd->add_option("--dmax", ca.d_max, "Last distance in m");
    curves_cmd->add_option("--step", ca.step, "Distance step in m");
    curves_cmd->add_option("--reflection", ca.reflection, "Ground reflection coefficient");
    curves_cmd->add_option("--rain-max", ca.rain_max, "Largest rain rate in mm/h (rain curves)");
    curves_cmd->add_option("--rain-step", ca.rain_step, "Rain rate step in mm/h (rain curves)");
    curves_cmd->add_option("--out", ca.out, "Output file (default: stdout)");

    RunArgs da;
    auto* dump_cmd = app.add_subcommand("dump", "Print a scenario as JSON");
    add_scenario_options(dump_cmd, da);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.back()->help());
        return kExitConfig;
    }

    auto needs_source = [](const RunArgs& a) {
        if (a.scenario_file.empty() && a.topology == 0) throw ConfigError("give --scenario FILE or --topology K");
    };

    try {
        if (*run_cmd) {
            needs_source(ra);
            return cmd_run(ra);
        }
        if (*sweep_cmd) return cmd_sweep(grid, sweep_out, threads, sweep_quiet);
        if (*validate_cmd) return cmd_validate(validate_file);
        if (*curves_cmd) return cmd_curves(ca);
        if (*dump_cmd) {
            needs_source(da);
            return cmd_dump(da);
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RangeError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
