// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "softnull/channels.hpp"
#include "softnull/errors.hpp"
#include "softnull/geometry.hpp"
#include "softnull/link.hpp"
#include "softnull/precoding.hpp"
#include "softnull/trace_io.hpp"

namespace softnull {

enum class ChannelSource { Synthetic, Trace };
enum class PartitionKind { EastWest, NorthSouth, NwSe, Interleaved, Random };
enum class OutputFormat { Csv, Json };

inline std::string partition_name(PartitionKind k) {
    switch (k) {
    case PartitionKind::EastWest: return "east_west";
    case PartitionKind::NorthSouth: return "north_south";
    case PartitionKind::NwSe: return "nw_se";
    case PartitionKind::Interleaved: return "interleaved";
    case PartitionKind::Random: return "random";
    }
    return "?";
}

/// Everything an experiment run needs. Defaults are sized for desk-scale
/// runs; raise n_trials / n_random_partitions for production sweeps.
struct ExperimentConfig {
    std::size_t n_rows = 8;
    std::size_t n_cols = 9;
    double spacing_m = 0.076;
    double carrier_hz = 2.4e9;
    PartitionKind partition = PartitionKind::EastWest;
    std::size_t m_tx = 36;
    ChannelSource source = ChannelSource::Synthetic;
    double kappa = 100.0; // backscatter ratio: 100 outdoor-like, 1 indoor-like
    double reference_coupling_db = -15.0;
    std::string trace_path;
    std::size_t k_users = 4; // K_Up = K_Down
    std::vector<double> path_loss_db{85.0};
    std::vector<std::size_t> d_tx_sweep; // empty = 1..m_tx
    std::size_t n_trials = 20;
    std::size_t n_subcarriers = 1;
    std::size_t n_random_partitions = 200;
    std::uint64_t seed = 1;
    LinkConfig link;
    std::vector<std::size_t> users_sweep{1, 2, 4, 8, 12, 16};
    OutputFormat format = OutputFormat::Csv;
    std::string output_path; // empty = stdout

    double wavelength_m() const { return 299792458.0 / carrier_hz; }
};

struct SuppressionRow {
    std::size_t d_tx = 0;
    double mean_db = 0.0;
    std::vector<double> per_antenna_db;
};

struct PartitionRow {
    std::string partition;
    std::size_t d_tx = 0;
    double mean_db = 0.0;
};

struct RateRow {
    double path_loss_db = 0.0;
    std::size_t d_tx = 0;
    Scheme scheme = Scheme::HalfDuplex;
    double uplink_rate = 0.0;
    double downlink_rate = 0.0;
    double sum_rate = 0.0;
};

struct UsersRow {
    std::size_t k_users = 0;
    double path_loss_db = 0.0;
    Scheme scheme = Scheme::HalfDuplex;
    std::size_t best_d_tx = 0; // 0 for half-duplex (not applicable)
    double sum_rate = 0.0;
};

namespace detail {

// Sub-stream labels so every random draw has its own derived seed and the
// results are independent of evaluation order.
inline constexpr std::uint64_t kStreamSi = 1;
inline constexpr std::uint64_t kStreamUplink = 2;
inline constexpr std::uint64_t kStreamDownlink = 3;
inline constexpr std::uint64_t kStreamPartition = 4;

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t trial, std::uint64_t subcarrier) {
    return derive_seed(derive_seed(master, stream), trial, subcarrier);
}

// Bad geometry/partition settings coming from a config are configuration
// errors, not runtime failures.
inline ArrayGeometry make_geometry(const ExperimentConfig &cfg) {
    try {
        return ArrayGeometry::rectangular(cfg.n_rows, cfg.n_cols, cfg.spacing_m);
    } catch (const std::invalid_argument &e) {
        throw config_error(e.what());
    }
}

inline Partition make_partition(const ExperimentConfig &cfg, const ArrayGeometry &geom) {
    try {
        switch (cfg.partition) {
        case PartitionKind::EastWest: return east_west(geom, cfg.m_tx);
        case PartitionKind::NorthSouth: return north_south(geom, cfg.m_tx);
        case PartitionKind::NwSe: return nw_se(geom, cfg.m_tx);
        case PartitionKind::Interleaved: return interleaved(geom, cfg.m_tx);
        case PartitionKind::Random:
            return random_partition(geom, cfg.m_tx,
                                    derive_seed(cfg.seed, kStreamPartition));
        }
    } catch (const std::invalid_argument &e) {
        throw config_error(e.what());
    }
    throw config_error("unknown partition kind");
}

inline std::vector<std::size_t> effective_sweep(const ExperimentConfig &cfg) {
    std::vector<std::size_t> sweep = cfg.d_tx_sweep;
    if (sweep.empty()) {
        sweep.resize(cfg.m_tx);
        std::iota(sweep.begin(), sweep.end(), 1);
    }
    for (std::size_t d : sweep)
        if (d < 1 || d > cfg.m_tx)
            throw config_error("d_tx sweep value " + std::to_string(d) +
                               " outside [1, m_tx=" + std::to_string(cfg.m_tx) + "]");
    return sweep;
}

inline void validate_common(const ExperimentConfig &cfg) {
    if (cfg.n_trials < 1)
        throw config_error("n_trials must be >= 1");
    if (cfg.n_subcarriers < 1)
        throw config_error("n_subcarriers must be >= 1");
    if (cfg.path_loss_db.empty())
        throw config_error("path loss list must be non-empty");
    if (cfg.users_sweep.empty())
        throw config_error("users sweep must be non-empty");
    if (!(cfg.link.d0_bs_db > 0.0) || !(cfg.link.d0_user_db > 0.0))
        throw config_error("dynamic noise figures must be positive");
    for (double v : {cfg.link.bs_power_dbm, cfg.link.user_power_dbm,
                     cfg.link.thermal_noise_dbm})
        if (!std::isfinite(v))
            throw config_error("link powers must be finite dB values");
}

inline ComplexMatrix synthetic_si(const ExperimentConfig &cfg, const ArrayGeometry &geom,
                                  const Partition &part, std::size_t trial,
                                  std::size_t subcarrier) {
    SiChannelParams p;
    p.wavelength_m = cfg.wavelength_m();
    p.backscatter_ratio = cfg.kappa;
    p.reference_coupling_db = cfg.reference_coupling_db;
    p.seed = trial_seed(cfg.seed, kStreamSi, trial, subcarrier);
    return geometric_self_interference(geom, part, p);
}

// Self-interference channels for a suppression-style run: synthetic draws,
// or every subcarrier of a loaded trace (validated against the configured
// partition shape).
inline std::vector<ComplexMatrix> si_channels(const ExperimentConfig &cfg,
                                              const ArrayGeometry &geom,
                                              const Partition &part) {
    std::vector<ComplexMatrix> out;
    if (cfg.source == ChannelSource::Trace) {
        if (cfg.trace_path.empty())
            throw config_error("source=trace requires a trace path");
        const std::vector<ChannelSet> sets = load_trace(cfg.trace_path);
        if (sets.empty())
            throw std::runtime_error("trace " + cfg.trace_path + " holds no subcarriers");
        for (const auto &s : sets) {
            if (s.h_self.rows() != part.m_rx() || s.h_self.cols() != part.m_tx())
                throw std::runtime_error(
                    "trace dimension mismatch: h_self is " + std::to_string(s.h_self.rows()) +
                    "x" + std::to_string(s.h_self.cols()) + " but the configured partition is " +
                    std::to_string(part.m_rx()) + "x" + std::to_string(part.m_tx()));
            out.push_back(s.h_self);
        }
        return out;
    }
    out.reserve(cfg.n_trials * cfg.n_subcarriers);
    for (std::size_t t = 0; t < cfg.n_trials; ++t)
        for (std::size_t s = 0; s < cfg.n_subcarriers; ++s)
            out.push_back(synthetic_si(cfg, geom, part, t, s));
    return out;
}

// Mean over finite/infinite dB values; degenerates to +inf if any term is
// +inf (an exactly nulled channel dominates the average).
inline double mean_db(const std::vector<double> &xs) {
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

struct SuppressionStats {
    std::vector<double> mean_curve;                  // [d]
    std::vector<std::vector<double>> antenna_curves; // [d][antenna]
};

// Suppression at every d_tx for a set of channels, from one SVD per channel.
// The aggregate residual for d effective antennas is the suffix sum of the
// squared singular values; the per-antenna split weights each thin mode by
// |u(r, j)|^2 (nullspace modes contribute nothing).
inline SuppressionStats suppression_stats(const std::vector<ComplexMatrix> &channels,
                                          const std::vector<std::size_t> &sweep,
                                          bool per_antenna) {
    const std::size_t m_rx = channels.front().rows();
    const std::size_t m_tx = channels.front().cols();
    SuppressionStats st;
    st.mean_curve.assign(sweep.size(), 0.0);
    if (per_antenna)
        st.antenna_curves.assign(sweep.size(), std::vector<double>(m_rx, 0.0));

    for (const auto &h : channels) {
        const SvdResult s = svd(h);
        const std::vector<double> residual = residual_power_curve(s, m_tx);
        for (std::size_t di = 0; di < sweep.size(); ++di) {
            const std::size_t d = sweep[di];
            st.mean_curve[di] += suppression_db_from_residual(residual[d - 1], d, m_rx);
            if (per_antenna) {
                const std::size_t k = s.sigma.size();
                const std::size_t first = m_tx - d; // first kept mode index
                for (std::size_t r = 0; r < m_rx; ++r) {
                    double res_r = 0.0;
                    for (std::size_t j = first; j < k; ++j)
                        res_r += s.sigma[j] * s.sigma[j] * std::norm(s.u(r, j));
                    st.antenna_curves[di][r] += suppression_db_from_residual(res_r, d, 1);
                }
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(channels.size());
    for (auto &x : st.mean_curve)
        x *= inv;
    for (auto &row : st.antenna_curves)
        for (auto &x : row)
            x *= inv;
    return st;
}

} // namespace detail

/// Self-interference reduction versus preserved effective antennas, averaged
/// over trials (dB mean), with the per-receive-antenna breakdown.
inline std::vector<SuppressionRow> run_suppression_curve(const ExperimentConfig &cfg) {
    detail::validate_common(cfg);
    const ArrayGeometry geom = detail::make_geometry(cfg);
    const Partition part = detail::make_partition(cfg, geom);
    const auto sweep = detail::effective_sweep(cfg);
    const auto channels = detail::si_channels(cfg, geom, part);
    const auto st = detail::suppression_stats(channels, sweep, true);

    std::vector<SuppressionRow> rows;
    rows.reserve(sweep.size());
    for (std::size_t di = 0; di < sweep.size(); ++di)
        rows.push_back({sweep[di], st.mean_curve[di], st.antenna_curves[di]});
    return rows;
}

/// Mean suppression for the four heuristic partitions plus the average of
/// n_random_partitions random ones, on paired synthetic channels.
inline std::vector<PartitionRow> run_partition_compare(const ExperimentConfig &cfg) {
    detail::validate_common(cfg);
    if (cfg.source != ChannelSource::Synthetic)
        throw config_error("partition comparison requires source=synthetic "
                           "(a trace is already sliced by one fixed partition)");
    const ArrayGeometry geom = detail::make_geometry(cfg);
    const auto sweep = detail::effective_sweep(cfg);
    if (cfg.n_random_partitions < 1)
        throw config_error("n_random_partitions must be >= 1");
    const std::size_t m = geom.size();
    if (cfg.m_tx < 1 || cfg.m_tx >= m)
        throw config_error("partition comparison: need 1 <= m_tx < total elements");
    if (cfg.m_tx != m / 2 && cfg.m_tx != (m + 1) / 2)
        throw config_error("partition comparison: the interleaved heuristic needs a "
                           "balanced split, m_tx = floor(M/2) or ceil(M/2)");

    std::vector<PartitionRow> rows;
    auto emit = [&](const std::string &label, const std::vector<double> &curve) {
        for (std::size_t di = 0; di < sweep.size(); ++di)
            rows.push_back({label, sweep[di], curve[di]});
    };
    auto curve_for = [&](const Partition &part) {
        std::vector<ComplexMatrix> channels;
        channels.reserve(cfg.n_trials * cfg.n_subcarriers);
        for (std::size_t t = 0; t < cfg.n_trials; ++t)
            for (std::size_t s = 0; s < cfg.n_subcarriers; ++s)
                channels.push_back(detail::synthetic_si(cfg, geom, part, t, s));
        return detail::suppression_stats(channels, sweep, false).mean_curve;
    };

    emit("east_west", curve_for(east_west(geom, cfg.m_tx)));
    emit("north_south", curve_for(north_south(geom, cfg.m_tx)));
    emit("nw_se", curve_for(nw_se(geom, cfg.m_tx)));
    emit("interleaved", curve_for(interleaved(geom, cfg.m_tx)));

    std::vector<double> random_mean(sweep.size(), 0.0);
    for (std::size_t j = 0; j < cfg.n_random_partitions; ++j) {
        const Partition part = random_partition(
            geom, cfg.m_tx, derive_seed(cfg.seed, detail::kStreamPartition, j));
        const auto curve = curve_for(part);
        for (std::size_t di = 0; di < sweep.size(); ++di)
            random_mean[di] += curve[di];
    }
    for (auto &x : random_mean)
        x /= static_cast<double>(cfg.n_random_partitions);
    emit("random_mean", random_mean);
    return rows;
}

namespace detail {

struct TrialChannels {
    std::vector<ChannelSet> full_duplex; // partitioned dimensions
    std::vector<ChannelSet> half_duplex; // all-M user channels
};

// One batch of channel realizations: synthetic self-interference plus
// full-array i.i.d. Rayleigh user channels, sliced to the partition for the
// full-duplex schemes. k_master distinguishes user-count sweeps.
inline TrialChannels make_trials(const ExperimentConfig &cfg, const ArrayGeometry &geom,
                                 const Partition &part, std::size_t k, double path_loss_db,
                                 std::uint64_t k_master) {
    TrialChannels out;
    const std::size_t m = geom.size();
    for (std::size_t t = 0; t < cfg.n_trials; ++t) {
        for (std::size_t s = 0; s < cfg.n_subcarriers; ++s) {
            const ComplexMatrix h_up_full = rayleigh_channel(
                m, k, path_loss_db, trial_seed(k_master, kStreamUplink, t, s));
            const ComplexMatrix h_down_full = rayleigh_channel(
                k, m, path_loss_db, trial_seed(k_master, kStreamDownlink, t, s));
            ChannelSet fd;
            fd.subcarrier_index = static_cast<std::uint32_t>(s);
            fd.h_self = synthetic_si(cfg, geom, part, t, s);
            fd.h_up = select_rows(h_up_full, part.rx);
            fd.h_down = select_cols(h_down_full, part.tx);
            out.full_duplex.push_back(std::move(fd));
            ChannelSet hd;
            hd.subcarrier_index = static_cast<std::uint32_t>(s);
            hd.h_up = h_up_full;
            hd.h_down = h_down_full;
            out.half_duplex.push_back(std::move(hd));
        }
    }
    return out;
}

inline void require_synthetic(const ExperimentConfig &cfg, const char *what) {
    if (cfg.source != ChannelSource::Synthetic)
        throw config_error(std::string(what) +
                           " requires source=synthetic (traces carry no full-array "
                           "user channels for the half-duplex baseline)");
}

} // namespace detail

/// Achievable rates versus preserved effective antennas for the three
/// schemes, one block per configured path loss. Half-duplex and ideal
/// full-duplex do not depend on d_tx; their row repeats so every d_tx row is
/// complete. d_tx values below the user count are infeasible for ZF and are
/// skipped.
inline std::vector<RateRow> run_rate_curve(const ExperimentConfig &cfg) {
    detail::validate_common(cfg);
    detail::require_synthetic(cfg, "rate curve");
    const ArrayGeometry geom = detail::make_geometry(cfg);
    const Partition part = detail::make_partition(cfg, geom);
    const auto sweep = detail::effective_sweep(cfg);
    const std::size_t k = cfg.k_users;
    if (k < 1)
        throw config_error("rate curve: need at least one user");
    if (k > part.m_rx())
        throw capability_error("rate curve: more uplink users than receive antennas");

    std::vector<std::size_t> feasible;
    for (std::size_t d : sweep)
        if (d >= k)
            feasible.push_back(d);
    if (feasible.empty())
        throw capability_error("rate curve: no d_tx in the sweep can serve " +
                               std::to_string(k) + " downlink users");

    std::vector<RateRow> rows;
    for (double pl : cfg.path_loss_db) {
        const auto trials = detail::make_trials(cfg, geom, part, k, pl, cfg.seed);
        const RateReport hd =
            simulate_scheme(Scheme::HalfDuplex, trials.half_duplex, cfg.link, 0);
        const RateReport ifd =
            simulate_scheme(Scheme::IdealFullDuplex, trials.full_duplex, cfg.link, 0);
        for (std::size_t d : feasible) {
            const RateReport sn = simulate_scheme(Scheme::SoftNull, trials.full_duplex,
                                                  cfg.link, d);
            rows.push_back({pl, d, Scheme::HalfDuplex, hd.uplink_rate, hd.downlink_rate,
                            hd.sum_rate});
            rows.push_back({pl, d, Scheme::SoftNull, sn.uplink_rate, sn.downlink_rate,
                            sn.sum_rate});
            rows.push_back({pl, d, Scheme::IdealFullDuplex, ifd.uplink_rate,
                            ifd.downlink_rate, ifd.sum_rate});
        }
    }
    return rows;
}

/// Sum rate versus number of served users: SoftNull maximized over the d_tx
/// grid (the argmax is reported) against the half-duplex baseline.
inline std::vector<UsersRow> run_users_sweep(const ExperimentConfig &cfg) {
    detail::validate_common(cfg);
    detail::require_synthetic(cfg, "users sweep");
    const ArrayGeometry geom = detail::make_geometry(cfg);
    const Partition part = detail::make_partition(cfg, geom);
    const auto sweep = detail::effective_sweep(cfg);

    for (std::size_t k : cfg.users_sweep) {
        if (k < 1)
            throw config_error("users sweep: user counts must be >= 1");
        if (k > part.m_tx())
            throw capability_error("users sweep: K=" + std::to_string(k) +
                                   " exceeds m_tx=" + std::to_string(part.m_tx()));
        if (k > part.m_rx())
            throw capability_error("users sweep: K=" + std::to_string(k) +
                                   " exceeds m_rx=" + std::to_string(part.m_rx()));
    }

    std::vector<UsersRow> rows;
    for (std::size_t k : cfg.users_sweep) {
        const std::uint64_t k_master = derive_seed(cfg.seed, k);
        for (double pl : cfg.path_loss_db) {
            const auto trials = detail::make_trials(cfg, geom, part, k, pl, k_master);
            const RateReport hd =
                simulate_scheme(Scheme::HalfDuplex, trials.half_duplex, cfg.link, 0);
            double best_sum = -std::numeric_limits<double>::infinity();
            std::size_t best_d = 0;
            for (std::size_t d : sweep) {
                if (d < k)
                    continue; // infeasible (K, d_tx) pairs are excluded
                const RateReport sn = simulate_scheme(Scheme::SoftNull, trials.full_duplex,
                                                      cfg.link, d);
                if (sn.sum_rate > best_sum) {
                    best_sum = sn.sum_rate;
                    best_d = d;
                }
            }
            if (best_d == 0)
                throw capability_error("users sweep: no feasible d_tx for K=" +
                                       std::to_string(k));
            rows.push_back({k, pl, Scheme::HalfDuplex, 0, hd.sum_rate});
            rows.push_back({k, pl, Scheme::SoftNull, best_d, best_sum});
        }
    }
    return rows;
}

// ---- Tabular output -------------------------------------------------------

struct Cell {
    std::string text;
    bool numeric = false;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline Cell num_cell(double v) {
    if (std::isinf(v))
        return {v > 0 ? "inf" : "-inf", false};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return {buf, true};
}

inline Cell int_cell(std::size_t v) { return {std::to_string(v), true}; }
inline Cell text_cell(std::string s) { return {std::move(s), false}; }

inline Table to_table(const std::vector<SuppressionRow> &rows) {
    Table t;
    t.columns = {"d_tx", "mean_suppression_db"};
    const std::size_t m_rx = rows.empty() ? 0 : rows.front().per_antenna_db.size();
    for (std::size_t r = 0; r < m_rx; ++r)
        t.columns.push_back("suppression_rx" + std::to_string(r) + "_db");
    for (const auto &row : rows) {
        std::vector<Cell> cells{int_cell(row.d_tx), num_cell(row.mean_db)};
        for (double v : row.per_antenna_db)
            cells.push_back(num_cell(v));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline Table to_table(const std::vector<PartitionRow> &rows) {
    Table t;
    t.columns = {"partition", "d_tx", "mean_suppression_db"};
    for (const auto &row : rows)
        t.rows.push_back({text_cell(row.partition), int_cell(row.d_tx),
                          num_cell(row.mean_db)});
    return t;
}

inline Table to_table(const std::vector<RateRow> &rows) {
    Table t;
    t.columns = {"path_loss_db", "d_tx",          "scheme",
                 "uplink_rate_bps_hz", "downlink_rate_bps_hz", "sum_rate_bps_hz"};
    for (const auto &row : rows)
        t.rows.push_back({num_cell(row.path_loss_db), int_cell(row.d_tx),
                          text_cell(scheme_name(row.scheme)), num_cell(row.uplink_rate),
                          num_cell(row.downlink_rate), num_cell(row.sum_rate)});
    return t;
}

inline Table to_table(const std::vector<UsersRow> &rows) {
    Table t;
    t.columns = {"k_users", "path_loss_db", "scheme", "best_d_tx", "sum_rate_bps_hz"};
    for (const auto &row : rows) {
        std::vector<Cell> cells{int_cell(row.k_users), num_cell(row.path_loss_db),
                                text_cell(scheme_name(row.scheme))};
        cells.push_back(row.scheme == Scheme::SoftNull ? int_cell(row.best_d_tx)
                                                       : text_cell(""));
        cells.push_back(num_cell(row.sum_rate));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline std::string to_csv(const Table &t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c)
            out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto &row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += row[c].text;
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const Table &t) {
    auto escape = [](const std::string &s) {
        std::string out;
        for (char ch : s) {
            if (ch == '"' || ch == '\\')
                out += '\\';
            out += ch;
        }
        return out;
    };
    std::string out = "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += "  {";
        for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
            if (c)
                out += ", ";
            out += '"' + escape(t.columns[c]) + "\": ";
            const Cell &cell = t.rows[r][c];
            if (cell.numeric)
                out += cell.text;
            else
                out += '"' + escape(cell.text) + '"';
        }
        out += r + 1 < t.rows.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

inline std::string render(const Table &t, OutputFormat f) {
    return f == OutputFormat::Csv ? to_csv(t) : to_json(t);
}

} // namespace softnull
