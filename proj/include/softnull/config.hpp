// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "softnull/errors.hpp"
#include "softnull/experiments.hpp"

// Flat "key = value" experiment configuration files. '#' starts a comment,
// blank lines are ignored, later keys override earlier ones. Numeric lists
// are comma separated and accept a:b or a:b:step ranges, e.g. "4:36:4".

namespace softnull {

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string &key, const std::string &value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception &) {
        throw config_error("config: bad numeric value for '" + key + "': " + value);
    }
}

inline std::uint64_t parse_u64(const std::string &key, const std::string &value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception &) {
        throw config_error("config: bad integer value for '" + key + "': " + value);
    }
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string &key,
                                                const std::string &value) {
    std::vector<std::size_t> out;
    for (const auto &piece : split(value, ',')) {
        if (piece.empty())
            continue;
        const auto range = split(piece, ':');
        if (range.size() == 1) {
            out.push_back(static_cast<std::size_t>(parse_u64(key, range[0])));
        } else if (range.size() == 2 || range.size() == 3) {
            const auto lo = parse_u64(key, range[0]);
            const auto hi = parse_u64(key, range[1]);
            const auto step = range.size() == 3 ? parse_u64(key, range[2]) : 1;
            if (step == 0 || hi < lo)
                throw config_error("config: bad range for '" + key + "': " + piece);
            for (std::uint64_t v = lo; v <= hi; v += step)
                out.push_back(static_cast<std::size_t>(v));
        } else {
            throw config_error("config: bad list entry for '" + key + "': " + piece);
        }
    }
    if (out.empty())
        throw config_error("config: empty list for '" + key + "'");
    return out;
}

inline std::vector<double> parse_double_list(const std::string &key,
                                             const std::string &value) {
    std::vector<double> out;
    for (const auto &piece : split(value, ','))
        if (!piece.empty())
            out.push_back(parse_double(key, piece));
    if (out.empty())
        throw config_error("config: empty list for '" + key + "'");
    return out;
}

} // namespace detail

inline PartitionKind parse_partition_kind(const std::string &name) {
    if (name == "east_west") return PartitionKind::EastWest;
    if (name == "north_south") return PartitionKind::NorthSouth;
    if (name == "nw_se") return PartitionKind::NwSe;
    if (name == "interleaved") return PartitionKind::Interleaved;
    if (name == "random") return PartitionKind::Random;
    throw config_error("config: unknown partition '" + name +
                       "' (east_west|north_south|nw_se|interleaved|random)");
}

/// Applies one key/value pair onto the configuration.
inline void apply_config_key(ExperimentConfig &cfg, const std::string &key,
                             const std::string &value) {
    using detail::parse_double;
    using detail::parse_u64;
    if (key == "rows") cfg.n_rows = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "cols") cfg.n_cols = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "spacing_m") cfg.spacing_m = parse_double(key, value);
    else if (key == "carrier_hz") cfg.carrier_hz = parse_double(key, value);
    else if (key == "partition") cfg.partition = parse_partition_kind(value);
    else if (key == "m_tx") cfg.m_tx = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "source") {
        if (value == "synthetic") cfg.source = ChannelSource::Synthetic;
        else if (value == "trace") cfg.source = ChannelSource::Trace;
        else throw config_error("config: unknown source '" + value + "' (synthetic|trace)");
    } else if (key == "preset") {
        if (value == "outdoor-like") cfg.kappa = 100.0;
        else if (value == "indoor-like") cfg.kappa = 1.0;
        else throw config_error("config: unknown preset '" + value +
                                "' (outdoor-like|indoor-like)");
    } else if (key == "kappa") cfg.kappa = parse_double(key, value);
    else if (key == "reference_coupling_db") cfg.reference_coupling_db = parse_double(key, value);
    else if (key == "trace") cfg.trace_path = value;
    else if (key == "k") cfg.k_users = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "path_loss_db") cfg.path_loss_db = detail::parse_double_list(key, value);
    else if (key == "d_tx") cfg.d_tx_sweep = detail::parse_size_list(key, value);
    else if (key == "n_trials") cfg.n_trials = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "n_subcarriers") cfg.n_subcarriers = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "n_random_partitions") cfg.n_random_partitions = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "bs_power_dbm") cfg.link.bs_power_dbm = parse_double(key, value);
    else if (key == "user_power_dbm") cfg.link.user_power_dbm = parse_double(key, value);
    else if (key == "thermal_noise_dbm") cfg.link.thermal_noise_dbm = parse_double(key, value);
    else if (key == "d0_bs_db") cfg.link.d0_bs_db = parse_double(key, value);
    else if (key == "d0_user_db") cfg.link.d0_user_db = parse_double(key, value);
    else if (key == "users") cfg.users_sweep = detail::parse_size_list(key, value);
    else if (key == "format") {
        if (value == "csv") cfg.format = OutputFormat::Csv;
        else if (value == "json") cfg.format = OutputFormat::Json;
        else throw config_error("config: unknown format '" + value + "' (csv|json)");
    } else if (key == "output") cfg.output_path = value;
    else throw config_error("config: unknown key '" + key + "'");
}

/// Loads a flat key-value config file over the defaults in cfg.
inline void load_config_file(ExperimentConfig &cfg, const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) +
                               " is not 'key = value': " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config: line " + std::to_string(lineno) + " has empty key");
        apply_config_key(cfg, key, value);
    }
}

} // namespace softnull
