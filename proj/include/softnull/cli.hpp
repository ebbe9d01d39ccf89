// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "softnull/config.hpp"
#include "softnull/errors.hpp"
#include "softnull/experiments.hpp"
#include "softnull/link.hpp"
#include "softnull/trace_io.hpp"

// Exit codes: 0 success, 1 configuration/usage error, 2 runtime or numerical
// failure (malformed traces, non-convergence, rank deficiency, ...).

namespace softnull {

namespace detail {

// Experiment subcommands share one option set. Overrides are collected as
// (key, value) pairs and replayed through the config-file key machinery, so
// flags and file entries cannot drift apart. Precedence: defaults, then
// --config file, then flags.
struct CommonOpts {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    void add_to(CLI::App *sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        auto bind = [this, sub](const std::string &flag, const std::string &key,
                                const std::string &help) {
            auto holder = std::make_shared<std::string>();
            sub->add_option(flag, *holder, help)->each(
                [this, key, holder](const std::string &v) {
                    overrides.emplace_back(key, v);
                    (void)holder;
                });
        };
        bind("--seed", "seed", "master seed; every random draw derives from it (default 1)");
        bind("--rows", "rows", "array rows");
        bind("--cols", "cols", "array columns");
        bind("--spacing", "spacing_m", "element pitch in meters");
        bind("--carrier", "carrier_hz", "carrier frequency in Hz");
        bind("--partition", "partition",
             "east_west|north_south|nw_se|interleaved|random");
        bind("--mtx", "m_tx", "transmit elements M_Tx");
        bind("--source", "source", "synthetic|trace");
        bind("--preset", "preset", "outdoor-like|indoor-like");
        bind("--kappa", "kappa", "backscatter ratio");
        bind("--coupling-db", "reference_coupling_db",
             "adjacent-element coupling in dB");
        bind("--trace", "trace", "channel trace file (for source=trace)");
        bind("--k", "k", "number of uplink = downlink users");
        bind("--pl", "path_loss_db", "path loss list in dB");
        bind("--dtx", "d_tx", "effective-antenna sweep (list / a:b:step)");
        bind("--trials", "n_trials", "channel realizations per point");
        bind("--subcarriers", "n_subcarriers", "independent subcarriers per trial");
        bind("--random-partitions", "n_random_partitions",
             "random partitions averaged in the comparison");
        bind("--users", "users", "user-count sweep list");
        bind("--bs-power", "bs_power_dbm", "array sum power in dBm");
        bind("--user-power", "user_power_dbm", "per-user power in dBm");
        bind("--thermal", "thermal_noise_dbm", "thermal noise floor in dBm");
        bind("--d0-bs", "d0_bs_db", "base-station dynamic noise figure in dB");
        bind("--d0-user", "d0_user_db", "client dynamic noise figure in dB");
        bind("--format", "format", "csv|json");
        bind("--output,-o", "output", "output path (default stdout)");
    }

    ExperimentConfig build() const {
        ExperimentConfig cfg;
        if (!config_path.empty())
            load_config_file(cfg, config_path);
        for (const auto &[key, value] : overrides)
            apply_config_key(cfg, key, value);
        return cfg;
    }
};

inline void emit(const ExperimentConfig &cfg, const Table &table) {
    const std::string body = render(table, cfg.format);
    if (cfg.output_path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw config_error("cannot open output file " + cfg.output_path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out)
        throw std::runtime_error("write failed for " + cfg.output_path);
}

} // namespace detail

/// The `softnull` command line tool. Callable in-process for testing.
inline int cli_main(int argc, const char *const *argv) {
    CLI::App app{"softnull: full-duplex many-antenna MU-MIMO simulation"};
    app.require_subcommand(1);

    detail::CommonOpts supp_opts, part_opts, rate_opts, users_opts;
    auto *supp = app.add_subcommand(
        "suppression", "self-interference reduction vs effective antennas");
    supp_opts.add_to(supp);
    auto *parts = app.add_subcommand(
        "partitions", "compare Tx/Rx partition heuristics by mean suppression");
    part_opts.add_to(parts);
    auto *rates = app.add_subcommand(
        "rates", "achievable rates vs effective antennas for all schemes");
    rate_opts.add_to(rates);
    auto *users = app.add_subcommand(
        "users", "sum rate vs number of users, SoftNull maximized over d_tx");
    users_opts.add_to(users);

    double b_tx = 0.0, b_pl = 0.0, b_supp = 0.0, b_thermal = -95.0, b_dr = 25.0;
    std::string b_mode = "dominant";
    auto *budget = app.add_subcommand(
        "budget", "scalar uplink link budget after digital cancellation");
    budget->add_option("--tx", b_tx, "transmit power in dBm")->required();
    budget->add_option("--pl", b_pl, "path loss in dB")->required();
    budget->add_option("--supp", b_supp, "self-interference suppression in dB")->required();
    budget->add_option("--thermal", b_thermal, "thermal noise floor in dBm")->required();
    budget->add_option("--dr", b_dr, "dynamic noise figure in dB")->required();
    budget->add_option("--mode", b_mode, "dominant|sum (default dominant)");

    std::string t_in, t_out;
    auto *trace = app.add_subcommand("trace", "inspect, convert or analyze channel traces");
    trace->require_subcommand(1);
    auto *inspect = trace->add_subcommand("inspect", "print trace header and metadata");
    inspect->add_option("file", t_in, "trace file")->required();
    auto *convert = trace->add_subcommand("convert", "dump trace entries to CSV");
    convert->add_option("input", t_in, "trace file")->required();
    convert->add_option("output", t_out, "CSV output path")->required();
    auto *coupling = trace->add_subcommand(
        "coupling", "per-pair coupling magnitudes in dB from a trace's h_self");
    coupling->add_option("input", t_in, "trace file")->required();
    coupling->add_option("output", t_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (supp->parsed()) {
            const ExperimentConfig cfg = supp_opts.build();
            detail::emit(cfg, to_table(run_suppression_curve(cfg)));
        } else if (parts->parsed()) {
            const ExperimentConfig cfg = part_opts.build();
            detail::emit(cfg, to_table(run_partition_compare(cfg)));
        } else if (rates->parsed()) {
            const ExperimentConfig cfg = rate_opts.build();
            detail::emit(cfg, to_table(run_rate_curve(cfg)));
        } else if (users->parsed()) {
            const ExperimentConfig cfg = users_opts.build();
            detail::emit(cfg, to_table(run_users_sweep(cfg)));
        } else if (budget->parsed()) {
            NoiseCombine mode;
            if (b_mode == "dominant")
                mode = NoiseCombine::Dominant;
            else if (b_mode == "sum")
                mode = NoiseCombine::Sum;
            else
                throw config_error("budget: unknown mode '" + b_mode + "' (dominant|sum)");
            const double snr = link_budget_snr(b_tx, b_pl, b_supp, b_thermal, b_dr, mode);
            std::printf("%.1f dB\n", snr);
        } else if (inspect->parsed()) {
            const auto sets = load_trace(t_in);
            std::printf("magic: SNCT\nversion: 1\n");
            std::printf("n_subcarriers: %zu\n", sets.size());
            if (!sets.empty()) {
                const auto &s = sets.front();
                std::printf("m_rx: %zu\nm_tx: %zu\nk_up: %zu\nk_down: %zu\n",
                            s.h_self.rows(), s.h_self.cols(), s.h_up.cols(),
                            s.h_down.rows());
            }
            for (const auto &[k, v] : load_trace_metadata(t_in))
                std::printf("meta %s = %s\n", k.c_str(), v.c_str());
        } else if (convert->parsed()) {
            const auto sets = load_trace(t_in);
            std::ofstream out(t_out, std::ios::binary | std::ios::trunc);
            if (!out)
                throw config_error("cannot open output file " + t_out);
            out << "subcarrier,matrix,row,col,re,im\n";
            auto dump = [&out](std::uint32_t sc, const char *name, const ComplexMatrix &m) {
                char buf[64];
                for (std::size_t r = 0; r < m.rows(); ++r)
                    for (std::size_t c = 0; c < m.cols(); ++c) {
                        std::snprintf(buf, sizeof buf, "%u,%s,%zu,%zu,%.17g,%.17g\n", sc,
                                      name, r, c, m(r, c).real(), m(r, c).imag());
                        out << buf;
                    }
            };
            for (const auto &s : sets) {
                dump(s.subcarrier_index, "h_self", s.h_self);
                dump(s.subcarrier_index, "h_up", s.h_up);
                dump(s.subcarrier_index, "h_down", s.h_down);
                if (s.h_usr)
                    dump(s.subcarrier_index, "h_usr", *s.h_usr);
            }
        } else if (coupling->parsed()) {
            const auto sets = load_trace(t_in);
            Table table;
            table.columns = {"subcarrier", "rx", "tx", "coupling_db"};
            for (const auto &s : sets) {
                const RealMatrix map = coupling_map(s.h_self);
                for (std::size_t r = 0; r < map.rows(); ++r)
                    for (std::size_t c = 0; c < map.cols(); ++c)
                        table.rows.push_back({int_cell(s.subcarrier_index), int_cell(r),
                                              int_cell(c), num_cell(map(r, c))});
            }
            const std::string body = to_csv(table);
            if (t_out.empty()) {
                std::fwrite(body.data(), 1, body.size(), stdout);
            } else {
                std::ofstream out(t_out, std::ios::binary | std::ios::trunc);
                if (!out)
                    throw config_error("cannot open output file " + t_out);
                out << body;
            }
        }
    } catch (const config_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const capability_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace softnull
