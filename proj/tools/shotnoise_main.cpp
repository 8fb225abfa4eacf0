// Command-line front end: wires run configuration files to the samplers,
// analyzers and experiment harnesses, and writes CSV/JSON artifacts.
//
// Every command is a pure function of (config file, seed): reruns produce
// byte-identical output, whatever --threads says.
//
// Exit codes: 0 success, 2 config/schema error, 3 refused mathematical
// precondition, 4 numerical non-convergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shotnoise/arrivals.hpp"
#include "shotnoise/config.hpp"
#include "shotnoise/errors.hpp"
#include "shotnoise/laws.hpp"
#include "shotnoise/regularity.hpp"
#include "shotnoise/sde.hpp"
#include "shotnoise/series.hpp"
#include "shotnoise/spectral.hpp"

namespace {

using namespace shotnoise;
using config::ConfigError;
using config::RunConfig;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads_override;
    bool strict = false;
};

RunConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = RunConfig::from_file(args.config_path);
    if (args.seed_override) cfg.override_seed(*args.seed_override);
    if (args.threads_override) {
        if (*args.threads_override < 1) throw ConfigError("--threads must be >= 1");
        cfg.override_threads(*args.threads_override);
    }
    return cfg;
}

void write_output(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file " + args.out_path);
    out << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Reads the "value" column of a sampler CSV.
std::vector<double> read_value_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sample file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sample file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string col; std::getline(hs, col, ',');) header.push_back(col);
    std::size_t value_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "value") value_col = i;
    if (value_col == header.size())
        throw ConfigError("sample file has no 'value' column: " + path);
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; std::getline(ls, cell, ','); ++i)
            if (i == value_col) values.push_back(std::stod(cell));
    }
    if (values.empty()) throw ConfigError("sample file has no rows: " + path);
    return values;
}

series::SeriesConfig series_config(const RunConfig& cfg) {
    return series::SeriesConfig{cfg.kernel(), cfg.sigma(), cfg.rate(),
                                cfg.truncation(), series::CenteringMode::none};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("simulate");
    config::require_keys_subset(sec, {"mode", "n", "t", "p", "t_next"}, "simulate");
    const std::string mode = config::require_string(sec, "mode");
    const auto n = static_cast<std::size_t>(config::require_integer(sec, "n"));
    std::ostringstream out;
    if (mode == "full") {
        const auto validated = series::validate(series_config(cfg));
        const auto values =
            series::sample_full_batch(validated, n, cfg.seed(), cfg.threads());
        series::write_values_csv(out, values);
    } else if (mode == "truncated") {
        const double t = config::require_number(sec, "t");
        const auto draws = series::sample_truncated_batch(
            cfg.kernel(), t, cfg.sigma(), cfg.rate(), n, cfg.seed(), cfg.threads());
        series::write_truncated_csv(out, draws);
    } else if (mode == "conditional") {
        const int p = static_cast<int>(config::require_integer(sec, "p"));
        const double t_next = config::require_number(sec, "t_next");
        if (p < 1) throw ConfigError("simulate: p must be >= 1");
        const auto values = series::sample_conditional_batch(
            series_config(cfg), p, t_next, n, cfg.seed(), cfg.threads());
        series::write_conditional_csv(out, values, t_next);
    } else {
        throw ConfigError("simulate: unknown mode '" + mode + "'");
    }
    write_output(args, out.str());
    return 0;
}

spectral::CharFnOptions charfn_options(const RunConfig& cfg, const json& sec) {
    spectral::CharFnOptions opts;
    opts.threads = cfg.threads();
    if (sec.contains("tol")) opts.tol = config::require_number(sec, "tol");
    if (sec.contains("route")) {
        const std::string route = config::require_string(sec, "route");
        if (route == "general")
            opts.force_general_route = true;
        else if (route != "auto")
            throw ConfigError("charfn: route must be 'auto' or 'general'");
    }
    return opts;
}

int cmd_charfn(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("charfn");
    config::require_keys_subset(sec, {"grid", "tol", "route"}, "charfn");
    auto grid_u = config::parse_grid(config::require_string(sec, "grid"));
    if (std::find(grid_u.begin(), grid_u.end(), 0.0) == grid_u.end())
        grid_u.push_back(0.0); // the u = 0 row is part of the output contract
    const auto grid = spectral::charfn(cfg.kernel(), cfg.sigma(), cfg.rate(),
                                       std::move(grid_u), charfn_options(cfg, sec));
    std::ostringstream out;
    spectral::write_csv(out, grid);
    write_output(args, out.str());
    return 0;
}

int cmd_density(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("density");
    config::require_keys_subset(
        sec, {"method", "x_grid", "u_max", "u_points", "atom", "taper", "tol", "route"},
        "density");
    const double u_max = config::require_number(sec, "u_max");
    const auto u_points = static_cast<std::size_t>(config::require_integer(sec, "u_points"));
    if (!(u_max > 0.0) || u_points < 16)
        throw ConfigError("density: need u_max > 0 and u_points >= 16");
    const auto cf = spectral::charfn(cfg.kernel(), cfg.sigma(), cfg.rate(),
                                     spectral::linspace(0.0, u_max, u_points),
                                     charfn_options(cfg, sec));
    spectral::InvertOptions opts;
    opts.threads = cfg.threads();
    opts.strict = args.strict;
    if (sec.contains("method")) {
        const std::string m = config::require_string(sec, "method");
        if (m == "gil-pelaez")
            opts.method = spectral::InversionMethod::gil_pelaez;
        else if (m == "fft-grid")
            opts.method = spectral::InversionMethod::fft_grid;
        else
            throw ConfigError("density: method must be 'gil-pelaez' or 'fft-grid'");
    }
    if (sec.contains("atom")) opts.atom_mass = config::require_number(sec, "atom");
    if (sec.contains("taper")) opts.taper_fraction = config::require_number(sec, "taper");
    const auto result = spectral::invert_density(
        cf, config::parse_grid(config::require_string(sec, "x_grid")), opts);
    std::ostringstream out;
    spectral::write_csv(out, result);
    write_output(args, out.str());
    return 0;
}

int cmd_tv(const CommonArgs& args, const std::string& file_a, const std::string& file_b) {
    if (file_a.empty() || file_b.empty())
        throw ConfigError("tv: --a and --b sample files are required");
    laws::Binning binning = laws::Binning::automatic();
    if (!args.config_path.empty()) {
        const RunConfig cfg = RunConfig::from_file(args.config_path);
        if (cfg.has_section("tv")) {
            const json& sec = cfg.section("tv");
            config::require_keys_subset(sec, {"binning", "edges"}, "tv");
            if (sec.contains("binning") &&
                config::require_string(sec, "binning") == "explicit") {
                if (!sec.contains("edges")) throw ConfigError("tv: explicit binning needs 'edges'");
                binning = laws::Binning::with_edges(sec.at("edges").get<std::vector<double>>());
            }
        }
    }
    const auto a = read_value_column(file_a);
    const auto b = read_value_column(file_b);
    double tv;
    std::size_t bins;
    if (binning.mode == laws::Binning::Mode::explicit_edges) {
        const auto la = laws::estimate(a, binning);
        const auto lb = laws::estimate(b, binning);
        tv = laws::tv_distance(la, lb);
        bins = la.bins();
    } else {
        const auto [la, lb] = laws::estimate_pair(a, b);
        tv = laws::tv_distance(la, lb);
        bins = la.bins();
    }
    json report;
    report["tv"] = tv;
    report["bins"] = bins;
    report["n_a"] = a.size();
    report["n_b"] = b.size();
    report["convention"] = "unnormalized (distance between laws in [0,2])";
    write_output(args, report.dump(2) + "\n");
    return 0;
}

int cmd_check(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("check");
    config::require_keys_subset(sec,
                                {"condition", "tol", "t_lo", "t_hi", "n", "eps",
                                 "fail_fraction", "g", "g_limit", "sequence_c",
                                 "n_list", "a", "b", "n_grid", "p", "grid_bins", "t"},
                                "check");
    const std::string condition = config::require_string(sec, "condition");
    const double tol = sec.contains("tol") ? config::require_number(sec, "tol") : 1e-6;
    json out;
    out["condition"] = condition;

    const auto condition_json = [&](const kernels::ConditionReport& rep) {
        json j;
        j["value"] = rep.value;
        j["divergent"] = rep.divergent;
        j["converged"] = rep.converged;
        j["est_error"] = rep.est_error;
        j["diagnostics"] = rep.diagnostics;
        j["notes"] = rep.notes;
        return j;
    };

    if (condition == "l2" || condition == "centering") {
        kernels::IntegrationOptions opts;
        opts.tol = tol;
        if (condition == "l2") {
            out["report"] = condition_json(
                kernels::l2_condition(cfg.kernel(), cfg.sigma(), cfg.rate(), opts));
        } else {
            out["report"] = condition_json(kernels::centering_constant(
                cfg.kernel(), cfg.sigma(), cfg.rate(), tol, {}, opts));
        }
        const bool converged = out["report"]["converged"].get<bool>();
        write_output(args, out.dump(2) + "\n");
        if (args.strict && !converged) throw NonConvergedError("check: " + condition);
        return 0;
    }

    stochastic::RngStream stream(cfg.seed(), 0);
    const auto n = sec.contains("n")
                       ? static_cast<std::size_t>(config::require_integer(sec, "n"))
                       : 100000;
    const double eps = sec.contains("eps") ? config::require_number(sec, "eps") : 1e-8;
    const double frac =
        sec.contains("fail_fraction") ? config::require_number(sec, "fail_fraction") : 1e-3;
    regularity::TimeRange range{
        sec.contains("t_lo") ? config::require_number(sec, "t_lo") : 0.0,
        sec.contains("t_hi") ? config::require_number(sec, "t_hi") : 1.0};

    regularity::RegularityReport rep;
    if (condition == "tderiv") {
        rep = regularity::check_time_derivative(cfg.kernel(), range, cfg.sigma(), n,
                                                eps, frac, stream);
    } else if (condition == "xjac") {
        rep = regularity::check_space_jacobian(cfg.kernel(), range, cfg.sigma(), n,
                                               eps, frac, stream);
    } else if (condition == "davydov") {
        if (!sec.contains("g_limit") || !sec.contains("n_list"))
            throw ConfigError("check davydov: needs 'g_limit' and 'n_list'");
        const auto limit = config::build_time_function(sec.at("g_limit"));
        const double c = sec.contains("sequence_c")
                             ? config::require_number(sec, "sequence_c") : 1.0;
        std::vector<kernels::TimeFunction> seq;
        for (const auto& nj : sec.at("n_list"))
            seq.push_back(config::build_time_function(
                sec.at("g_limit"), 1.0 + c / nj.get<double>()));
        const double a = sec.contains("a") ? config::require_number(sec, "a") : 0.0;
        const double b = sec.contains("b") ? config::require_number(sec, "b") : 5.0;
        const auto n_grid = sec.contains("n_grid")
                                ? static_cast<std::size_t>(config::require_integer(sec, "n_grid"))
                                : 2048;
        rep = regularity::check_sequence_derivatives(seq, limit, a, b, n_grid, tol,
                                                     eps, 1e-3 * (b - a));
    } else if (condition == "convpow") {
        const auto p = static_cast<unsigned>(
            sec.contains("p") ? config::require_integer(sec, "p") : 2);
        const auto bins = static_cast<std::size_t>(
            sec.contains("grid_bins") ? config::require_integer(sec, "grid_bins") : 64);
        const double t = sec.contains("t") ? config::require_number(sec, "t") : 1.0;
        const auto samples = regularity::pushforward_samples_batch(
            cfg.kernel(), t, cfg.sigma(), n, cfg.seed(), cfg.threads());
        rep = regularity::convolution_power_diagnostic(samples, p, bins);
    } else {
        throw ConfigError("check: unknown condition '" + condition + "'");
    }
    write_output(args, rep.to_json() + "\n");
    return 0;
}

int cmd_converge(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("converge");
    config::require_keys_subset(
        sec, {"mode", "t", "n_list", "n_per_law", "sequence_c", "tol"}, "converge");
    const std::string mode = config::require_string(sec, "mode");
    if (mode != "full" && mode != "truncated")
        throw ConfigError("converge: mode must be 'full' or 'truncated'");
    const double t = sec.contains("t") ? config::require_number(sec, "t") : 1.0;
    const auto n_per_law =
        static_cast<std::size_t>(config::require_integer(sec, "n_per_law"));
    const double c = sec.contains("sequence_c")
                         ? config::require_number(sec, "sequence_c") : 1.0;
    const double tol = sec.contains("tol") ? config::require_number(sec, "tol") : 1e-6;
    if (!sec.contains("n_list")) throw ConfigError("converge: needs 'n_list'");
    const auto n_list = sec.at("n_list").get<std::vector<int>>();

    const auto& kernel_spec = cfg.raw().at("kernel");
    const auto sigma = cfg.sigma();
    const double rate = cfg.rate();
    const auto limit_kernel = cfg.kernel();

    kernels::IntegrationOptions iopts;
    iopts.tol = tol;

    // Limit-law reference draws plus an independent same-law run for the
    // noise floor; paired replicate streams throughout.
    std::vector<double> limit_values, floor_values;
    std::optional<series::ValidatedSeries> limit_validated;
    if (mode == "full") {
        limit_validated = series::validate(
            series::SeriesConfig{limit_kernel, sigma, rate, cfg.truncation(),
                                 series::CenteringMode::none}, iopts);
        limit_values = series::sample_full_batch(*limit_validated, n_per_law,
                                                 cfg.seed(), cfg.threads());
    } else {
        const auto draws = series::sample_truncated_batch(
            limit_kernel, t, sigma, rate, n_per_law, cfg.seed(), cfg.threads());
        limit_values.reserve(draws.size());
        for (const auto& d : draws) limit_values.push_back(d.value);
    }
    {
        const std::uint64_t floor_seed = cfg.seed() ^ 0x9E3779B97F4A7C15ull;
        if (mode == "full") {
            floor_values = series::sample_full_batch(*limit_validated, n_per_law,
                                                     floor_seed, cfg.threads());
        } else {
            const auto draws = series::sample_truncated_batch(
                limit_kernel, t, sigma, rate, n_per_law, floor_seed, cfg.threads());
            for (const auto& d : draws) floor_values.push_back(d.value);
        }
    }
    const double noise_floor = laws::tv_distance_paired(limit_values, floor_values);
    const auto a_limit =
        kernels::centering_constant(limit_kernel, sigma, rate, tol, {}, iopts);

    std::ostringstream out;
    out << "n,a_gap,l2_sq_gap,pushforward_tv,law_tv,atom\n";
    std::vector<double> law_tvs;
    bool hypotheses_decreasing = true;
    double prev_a = 0.0, prev_l2 = 0.0, prev_push = 0.0;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const int n = n_list[idx];
        const double factor = 1.0 + c / static_cast<double>(n);
        const auto kernel_n = config::build_kernel(kernel_spec, factor);
        // Scale sequences keep h_n - h in the registry: it is the same kernel
        // with amplitude (factor - 1).
        const auto diff_kernel = config::build_kernel(kernel_spec, factor - 1.0);

        const auto a_n = kernels::centering_constant(kernel_n, sigma, rate, tol, {}, iopts);
        const double a_gap = std::abs(a_n.value - a_limit.value);
        const double l2_gap = kernels::l2_condition(diff_kernel, sigma, rate, iopts).value;

        const auto push_n = regularity::pushforward_samples_batch(
            kernel_n, t, sigma, n_per_law, cfg.seed(), cfg.threads());
        const auto push_lim = regularity::pushforward_samples_batch(
            limit_kernel, t, sigma, n_per_law, cfg.seed(), cfg.threads());
        const double push_tv = laws::tv_distance_paired(push_n, push_lim);

        std::vector<double> values_n;
        double atom_n = 0.0;
        if (mode == "full") {
            const auto validated_n = series::validate(
                series::SeriesConfig{kernel_n, sigma, rate, cfg.truncation(),
                                     series::CenteringMode::none}, iopts);
            values_n = series::sample_full_batch(validated_n, n_per_law, cfg.seed(),
                                                 cfg.threads());
        } else {
            const auto draws = series::sample_truncated_batch(
                kernel_n, t, sigma, rate, n_per_law, cfg.seed(), cfg.threads());
            std::size_t zeros = 0;
            for (const auto& d : draws) {
                values_n.push_back(d.value);
                if (d.value == 0.0) ++zeros;
            }
            atom_n = static_cast<double>(zeros) / static_cast<double>(draws.size());
        }
        const double law_tv = laws::tv_distance_paired(values_n, limit_values);
        law_tvs.push_back(law_tv);
        if (idx > 0) {
            hypotheses_decreasing &= a_gap <= prev_a + tol &&
                                     l2_gap <= prev_l2 + tol &&
                                     push_tv <= prev_push + noise_floor;
        }
        prev_a = a_gap;
        prev_l2 = l2_gap;
        prev_push = push_tv;
        out << n << ',' << fmt(a_gap) << ',' << fmt(l2_gap) << ',' << fmt(push_tv)
            << ',' << fmt(law_tv) << ',' << fmt(atom_n) << '\n';
    }
    bool law_decreases = law_tvs.size() < 2 ||
                         (law_tvs.back() < law_tvs.front() &&
                          law_tvs.back() <= 2.0 * noise_floor);
    out << "# verdict: hypotheses_hold=" << (hypotheses_decreasing ? 1 : 0)
        << " law_tv_decreases=" << (law_decreases ? 1 : 0)
        << " noise_floor=" << fmt(noise_floor) << "\n";
    write_output(args, out.str());
    return 0;
}

int cmd_sde(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("sde");
    config::require_keys_subset(sec,
                                {"mode", "drift", "x0", "t_end", "ode_tol", "state_box",
                                 "n_list", "n_per_law", "drift_scale_c", "x0_shift_c",
                                 "fd_step", "cases"},
                                "sde");
    const std::string mode = config::require_string(sec, "mode");
    if (!sec.contains("drift")) throw ConfigError("sde: needs 'drift'");
    const auto drift = config::build_drift(sec.at("drift"));
    const double x0 = config::require_number(sec, "x0");
    const double t_end = sec.contains("t_end") ? config::require_number(sec, "t_end") : 1.0;
    sde::SdeOptions opts;
    if (sec.contains("ode_tol")) opts.ode_tol = config::require_number(sec, "ode_tol");
    if (sec.contains("state_box")) opts.state_box = config::require_number(sec, "state_box");

    std::ostringstream out;
    if (mode == "path") {
        stochastic::RngStream stream(cfg.seed(), 0);
        const auto path =
            sde::simulate(drift, x0, cfg.rate(), cfg.sigma(), t_end, opts, stream);
        out << "t,x\n";
        for (const auto& seg : path.segments) {
            const std::size_t steps = seg.states.size() - 1;
            for (std::size_t i = 0; i <= steps; ++i) {
                const double tt = steps == 0
                                      ? seg.t0
                                      : seg.t0 + (seg.t1 - seg.t0) * static_cast<double>(i) /
                                            static_cast<double>(steps);
                out << fmt(tt) << ',' << fmt(seg.states[i]) << '\n';
            }
        }
    } else if (mode == "deriv-check") {
        const auto cases = static_cast<std::size_t>(
            sec.contains("cases") ? config::require_integer(sec, "cases") : 20);
        const double fd_step =
            sec.contains("fd_step") ? config::require_number(sec, "fd_step") : 1e-5;
        out << "case,t1,delta1,closed_form,finite_diff,rel_err\n";
        for (std::size_t i = 0; i < cases; ++i) {
            stochastic::RngStream stream(cfg.seed(), i);
            auto path = sde::simulate(drift, x0, cfg.rate(), cfg.sigma(), t_end, opts,
                                      stream);
            if (path.jump_times.empty() || path.jump_times.front() >= t_end - 1e-3 ||
                path.jump_times.front() <= 1e-3)
                continue; // keep the difference quotient inside (0, t_end)
            const double closed = sde::jump_time_derivative(drift, path, t_end);
            auto times = path.jump_times;
            const auto& sizes = path.jump_sizes;
            const double t1 = times.front();
            times.front() = t1 + fd_step;
            const double up =
                sde::simulate_with_jumps(drift, x0, times, sizes, t_end, opts).terminal;
            times.front() = t1 - fd_step;
            const double dn =
                sde::simulate_with_jumps(drift, x0, times, sizes, t_end, opts).terminal;
            const double fd = (up - dn) / (2.0 * fd_step);
            const double rel =
                std::abs(fd - closed) / std::max(std::abs(closed), 1e-12);
            out << i << ',' << fmt(t1) << ',' << fmt(path.jump_sizes.front()) << ','
                << fmt(closed) << ',' << fmt(fd) << ',' << fmt(rel) << '\n';
        }
    } else if (mode == "converge") {
        if (!sec.contains("n_list") || !sec.contains("n_per_law"))
            throw ConfigError("sde converge: needs 'n_list' and 'n_per_law'");
        const auto n_list = sec.at("n_list").get<std::vector<int>>();
        const auto n_per_law =
            static_cast<std::size_t>(config::require_integer(sec, "n_per_law"));
        const double drift_c = sec.contains("drift_scale_c")
                                   ? config::require_number(sec, "drift_scale_c") : 1.0;
        const double x0_c = sec.contains("x0_shift_c")
                                ? config::require_number(sec, "x0_shift_c") : 1.0;
        std::vector<sde::DriftSpec> drift_seq;
        std::vector<double> x0_seq;
        for (int n : n_list) {
            drift_seq.push_back(config::build_drift(
                sec.at("drift"), 1.0 + drift_c / static_cast<double>(n)));
            x0_seq.push_back(x0 + x0_c / static_cast<double>(n));
        }
        const auto result = sde::tv_convergence_experiment(
            drift_seq, drift, x0_seq, x0, cfg.rate(), cfg.sigma(), t_end, n_per_law,
            opts, cfg.seed(), cfg.threads());
        out << "n,tv\n";
        for (std::size_t i = 0; i < result.rows.size(); ++i)
            out << n_list[i] << ',' << fmt(result.rows[i].tv) << '\n';
        out << "# verdict: pass=" << (result.pass ? 1 : 0)
            << " noise_floor=" << fmt(result.noise_floor)
            << " monotone_at_limit=" << (result.monotone_at_limit ? 1 : 0) << "\n";
    } else {
        throw ConfigError("sde: unknown mode '" + mode + "'");
    }
    write_output(args, out.str());
    return 0;
}

int cmd_condlaw(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    const json& sec = cfg.section("condlaw");
    config::require_keys_subset(sec, {"i", "t", "n"}, "condlaw");
    const int i = static_cast<int>(config::require_integer(sec, "i"));
    const double t = config::require_number(sec, "t");
    const auto n = static_cast<std::size_t>(config::require_integer(sec, "n"));
    if (i < 0) throw ConfigError("condlaw: i must be >= 0");

    json report;
    report["i"] = i;
    report["t"] = t;
    if (i == 0) {
        report["pure_atom"] = true;
        report["atom_mass"] = std::exp(-cfg.rate() * t);
        write_output(args, report.dump(2) + "\n");
        return 0;
    }

    const auto kernel = cfg.kernel();
    const auto sigma = cfg.sigma();
    const double rate = cfg.rate();

    // Conditional draws by rejection on the arrival count.
    std::vector<std::vector<double>> arrival_coords(static_cast<std::size_t>(i));
    std::vector<double> cond_values;
    cond_values.reserve(n);
    std::uint64_t stream_id = 0;
    const std::uint64_t max_attempts = 2000ull * n + 10000ull;
    while (cond_values.size() < n && stream_id < max_attempts) {
        stochastic::RngStream s(cfg.seed(), stream_id++);
        const auto arrivals =
            stochastic::sample_arrivals(stochastic::ArrivalProcess{rate}, t, s);
        if (static_cast<int>(arrivals.size()) != i) continue;
        double acc = 0.0;
        for (int k = 0; k < i; ++k) {
            arrival_coords[static_cast<std::size_t>(k)].push_back(
                arrivals[static_cast<std::size_t>(k)]);
            acc += kernel.eval(arrivals[static_cast<std::size_t>(k)], sigma.sample(s));
        }
        cond_values.push_back(acc);
    }
    if (cond_values.size() < n)
        throw NonConvergedError("condlaw: rejection sampling starved; count too unlikely");

    // Direct order-statistics sampler and the i-fold sum of single-term
    // pushforward draws.
    std::vector<std::vector<double>> direct_coords(static_cast<std::size_t>(i));
    std::vector<double> conv_values(n);
    for (std::size_t j = 0; j < n; ++j) {
        stochastic::RngStream s(cfg.seed() ^ 0xABCDEF12345ull, j);
        const auto times = stochastic::sample_conditional_order_stats(i, t, s);
        for (int k = 0; k < i; ++k)
            direct_coords[static_cast<std::size_t>(k)].push_back(
                times[static_cast<std::size_t>(k)]);
        double acc = 0.0;
        for (int k = 0; k < i; ++k)
            acc += kernel.eval(s.uniform(0.0, t), sigma.sample(s));
        conv_values[j] = acc;
    }

    const double threshold = laws::ks_threshold_two_sample(n, n, 0.01);
    double worst_arrival_ks = 0.0;
    for (int k = 0; k < i; ++k) {
        const double d = laws::ks_statistic_two_sample(
            arrival_coords[static_cast<std::size_t>(k)],
            direct_coords[static_cast<std::size_t>(k)]);
        report["ks_arrival_coord_" + std::to_string(k + 1)] = d;
        worst_arrival_ks = std::max(worst_arrival_ks, d);
    }
    const double value_ks = laws::ks_statistic_two_sample(cond_values, conv_values);
    report["ks_value_vs_convolution"] = value_ks;
    report["ks_threshold_1pct"] = threshold;
    report["arrival_law_matches"] = worst_arrival_ks < threshold;
    report["value_law_matches"] = value_ks < threshold;
    report["n"] = n;
    write_output(args, report.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shot noise series simulation and law-analysis toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string file_a, file_b;
    std::function<int()> run;

    const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* opt = cmd->add_option("--config", common.config_path, "run configuration file");
        if (needs_config) opt->required();
        cmd->add_option("--out", common.out_path, "output path (default: stdout)");
        cmd->add_option("--seed", common.seed_override, "override the config seed");
        cmd->add_option("--threads", common.threads_override, "shard count");
        cmd->add_flag("--strict", common.strict, "refuse instead of warn");
    };

    auto* simulate = app.add_subcommand("simulate", "draw series samples to CSV");
    add_common(simulate);
    simulate->callback([&] { run = [&] { return cmd_simulate(common); }; });

    auto* charfn = app.add_subcommand("charfn", "characteristic function on a u-grid");
    add_common(charfn);
    charfn->callback([&] { run = [&] { return cmd_charfn(common); }; });

    auto* density = app.add_subcommand("density", "density recovery by inversion");
    add_common(density);
    density->callback([&] { run = [&] { return cmd_density(common); }; });

    auto* tv = app.add_subcommand("tv", "TV distance between two sample files");
    add_common(tv, false);
    tv->add_option("--a", file_a, "first sample CSV")->required();
    tv->add_option("--b", file_b, "second sample CSV")->required();
    tv->callback([&] { run = [&] { return cmd_tv(common, file_a, file_b); }; });

    auto* check = app.add_subcommand("check", "numerical condition checks");
    add_common(check);
    check->callback([&] { run = [&] { return cmd_check(common); }; });

    auto* converge = app.add_subcommand("converge", "law convergence experiment");
    add_common(converge);
    converge->callback([&] { run = [&] { return cmd_converge(common); }; });

    auto* sde_cmd = app.add_subcommand("sde", "jump-SDE paths, sensitivities, experiments");
    add_common(sde_cmd);
    sde_cmd->callback([&] { run = [&] { return cmd_sde(common); }; });

    auto* condlaw = app.add_subcommand("condlaw", "count-conditioned law checks");
    add_common(condlaw);
    condlaw->callback([&] { run = [&] { return cmd_condlaw(common); }; });

    try {
        app.parse(argc, argv);
        return run();
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RefusedError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const NonConvergedError& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
