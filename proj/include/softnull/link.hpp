// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "softnull/channels.hpp"
#include "softnull/errors.hpp"
#include "softnull/matrix.hpp"
#include "softnull/precoding.hpp"

namespace softnull {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

/// Link parameters. Dynamic noise figures model receiver dynamic-range
/// limitations (A/D quantization, oscillator noise, amplifier
/// non-linearities) as Gaussian noise a fixed number of dB below the total
/// received power; they cap the useful digital cancellation at that figure.
struct LinkConfig {
    double bs_power_dbm = 0.0;       // array sum power
    double user_power_dbm = -10.0;   // per uplink user
    double thermal_noise_dbm = -95.0; // per receive chain
    double d0_bs_db = 25.0;          // base-station dynamic noise figure
    double d0_user_db = 25.0;        // client dynamic noise figure
    bool include_h_usr = false;
};

enum class Scheme { HalfDuplex, SoftNull, IdealFullDuplex };

inline std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::HalfDuplex: return "half_duplex";
    case Scheme::SoftNull: return "softnull";
    case Scheme::IdealFullDuplex: return "ideal_full_duplex";
    }
    return "?";
}

/// Per-scheme achievable rates plus the per-trial per-user SINRs they were
/// computed from.
struct RateReport {
    Scheme scheme = Scheme::HalfDuplex;
    std::size_t d_tx = 0;
    double uplink_rate = 0.0;   // bits/s/Hz
    double downlink_rate = 0.0; // bits/s/Hz
    double sum_rate = 0.0;      // bits/s/Hz
    std::vector<std::vector<double>> per_user_sinr_up;   // [trial][user], linear
    std::vector<std::vector<double>> per_user_sinr_down; // [trial][user], linear
};

/// Dynamic-range noise floor: fixed d0_db below the received power.
inline double dynamic_noise_power(double received_power, double d0_db) {
    if (!(received_power >= 0.0))
        throw std::invalid_argument("dynamic_noise_power: received power must be >= 0");
    return received_power / db_to_linear(d0_db);
}

enum class NoiseCombine { Dominant, Sum };

/// Scalar uplink link budget after perfect digital cancellation, all in dB.
/// `Dominant` keeps only the dominant received component's floor (the
/// dynamic floor whenever self-interference exceeds thermal noise), which is
/// the back-of-envelope arithmetic; `Sum` power-sums thermal and dynamic
/// noise and is what the full simulator uses.
inline double link_budget_snr(double tx_dbm, double path_loss_db, double suppression_db,
                              double thermal_dbm, double d0_db, NoiseCombine mode) {
    const double signal_dbm = tx_dbm - path_loss_db;
    const double si_dbm = tx_dbm - suppression_db;
    const double floor_dyn_dbm = si_dbm - d0_db;
    double noise_dbm;
    if (mode == NoiseCombine::Dominant)
        noise_dbm = si_dbm > thermal_dbm ? floor_dyn_dbm : thermal_dbm;
    else
        noise_dbm = mw_to_dbm(dbm_to_mw(thermal_dbm) + dbm_to_mw(floor_dyn_dbm));
    return signal_dbm - noise_dbm;
}

/// Per-user uplink SINR at the base station. bs_tx_composite is the full
/// transmit chain p_self * p_down (pass an empty matrix when the downlink is
/// silent). Each receive chain's dynamic noise is proportional to its total
/// received power (uplink signal + self-interference + thermal); the known
/// self-interference itself is then cancelled digitally, leaving thermal
/// plus dynamic noise behind the equalizer.
inline std::vector<double> uplink_sinr(const ChannelSet &ch,
                                       const ComplexMatrix &bs_tx_composite,
                                       const ComplexMatrix &w, const LinkConfig &cfg) {
    const std::size_t m_rx = ch.h_up.rows();
    const std::size_t k_up = ch.h_up.cols();
    if (w.cols() != m_rx || w.rows() != k_up)
        throw std::invalid_argument("uplink_sinr: equalizer dimensions inconsistent");
    const bool with_si = !bs_tx_composite.empty();
    ComplexMatrix si;
    if (with_si) {
        if (ch.h_self.rows() != m_rx || ch.h_self.cols() != bs_tx_composite.rows())
            throw std::invalid_argument("uplink_sinr: self-interference dimensions inconsistent");
        si = ch.h_self * bs_tx_composite;
    }

    const double p_user = dbm_to_mw(cfg.user_power_dbm);
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    std::vector<double> chain_noise(m_rx);
    for (std::size_t r = 0; r < m_rx; ++r) {
        double sig = 0.0;
        for (std::size_t i = 0; i < k_up; ++i)
            sig += std::norm(ch.h_up(r, i)) * p_user;
        double si_pow = 0.0;
        if (with_si)
            for (std::size_t k = 0; k < si.cols(); ++k)
                si_pow += std::norm(si(r, k));
        const double received = sig + si_pow + thermal;
        chain_noise[r] = thermal + dynamic_noise_power(received, cfg.d0_bs_db);
    }

    const ComplexMatrix g = w * ch.h_up;
    std::vector<double> out(k_up);
    for (std::size_t i = 0; i < k_up; ++i) {
        const double desired = std::norm(g(i, i)) * p_user;
        double cross = 0.0;
        for (std::size_t j = 0; j < k_up; ++j)
            if (j != i)
                cross += std::norm(g(i, j)) * p_user;
        double noise = 0.0;
        for (std::size_t r = 0; r < m_rx; ++r)
            noise += std::norm(w(i, r)) * chain_noise[r];
        out[i] = desired / (cross + noise);
    }
    return out;
}

/// Per-user downlink SINR. Inter-user leakage comes from the off-diagonal of
/// h_eff * p_down (zero for ZF up to numerics); uplink users leak through
/// h_usr when enabled. Each client receiver adds dynamic noise proportional
/// to its total received power.
inline std::vector<double> downlink_sinr(const ComplexMatrix &h_eff,
                                         const ComplexMatrix &p_down, const ChannelSet &ch,
                                         const LinkConfig &cfg) {
    if (h_eff.cols() != p_down.rows())
        throw std::invalid_argument("downlink_sinr: precoder dimensions inconsistent");
    const std::size_t k_down = h_eff.rows();
    if (p_down.cols() != k_down)
        throw std::invalid_argument("downlink_sinr: precoder user count inconsistent");
    const ComplexMatrix g = h_eff * p_down;

    const double p_user = dbm_to_mw(cfg.user_power_dbm);
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    const bool with_usr = cfg.include_h_usr && ch.h_usr.has_value();
    if (with_usr && ch.h_usr->rows() != k_down)
        throw std::invalid_argument("downlink_sinr: h_usr dimensions inconsistent");

    std::vector<double> out(k_down);
    for (std::size_t j = 0; j < k_down; ++j) {
        const double desired = std::norm(g(j, j));
        double inter = 0.0, total_bs = 0.0;
        for (std::size_t k = 0; k < k_down; ++k) {
            const double p = std::norm(g(j, k));
            total_bs += p;
            if (k != j)
                inter += p;
        }
        double usr = 0.0;
        if (with_usr)
            for (std::size_t i = 0; i < ch.h_usr->cols(); ++i)
                usr += std::norm((*ch.h_usr)(j, i)) * p_user;
        const double received = total_bs + usr + thermal;
        const double dyn = dynamic_noise_power(received, cfg.d0_user_db);
        out[j] = desired / (inter + usr + thermal + dyn);
    }
    return out;
}

/// Ergodic achievable rate: time fraction alpha times the Shannon sum rate
/// averaged over channel realizations.
inline double achievable_rate(const std::vector<std::vector<double>> &sinrs, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("achievable_rate: alpha must be in [0, 1]");
    if (sinrs.empty())
        throw std::invalid_argument("achievable_rate: need at least one trial");
    double total = 0.0;
    for (const auto &trial : sinrs)
        for (double s : trial) {
            if (!(s >= 0.0))
                throw std::invalid_argument("achievable_rate: SINRs must be >= 0");
            total += std::log2(1.0 + s);
        }
    return alpha * total / static_cast<double>(sinrs.size());
}

namespace detail {

struct TrialSinrs {
    std::vector<double> up;
    std::vector<double> down;
};

inline TrialSinrs simulate_trial(Scheme scheme, const ChannelSet &ch, const LinkConfig &cfg,
                                 std::size_t d_tx) {
    const std::size_t k_up = ch.h_up.cols();
    const std::size_t k_down = ch.h_down.rows();
    const std::size_t m_rx = ch.h_up.rows();
    const std::size_t m_tx = ch.h_down.cols();
    if (k_up > m_rx)
        throw capability_error("simulate_scheme: more uplink users than receive antennas");
    const double bs_power = dbm_to_mw(cfg.bs_power_dbm);

    TrialSinrs out;
    switch (scheme) {
    case Scheme::HalfDuplex: {
        // All M antennas, uplink and downlink in separate time slots: no
        // self-interference on either side.
        if (k_down > m_tx)
            throw capability_error("simulate_scheme: more downlink users than antennas");
        const ComplexMatrix p_down = zf_precoder(ch.h_down, bs_power);
        const ComplexMatrix w = decorrelator(ch.h_up);
        out.up = uplink_sinr(ch, ComplexMatrix{}, w, cfg);
        out.down = downlink_sinr(ch.h_down, p_down, ch, cfg);
        break;
    }
    case Scheme::SoftNull: {
        if (k_down > d_tx)
            throw capability_error("simulate_scheme: more downlink users than effective antennas");
        const SoftNullPrecoder pre = softnull_precoder(ch.h_self, d_tx);
        const ComplexMatrix h_eff = effective_channel(ch.h_down, pre.p_self);
        const ComplexMatrix p_down = zf_precoder(h_eff, bs_power);
        const ComplexMatrix w = decorrelator(ch.h_up);
        out.up = uplink_sinr(ch, pre.p_self * p_down, w, cfg);
        out.down = downlink_sinr(h_eff, p_down, ch, cfg);
        break;
    }
    case Scheme::IdealFullDuplex: {
        // Same partitioned operation, but the self-interference channel is
        // forced to zero and all m_tx effective antennas are kept.
        if (k_down > m_tx)
            throw capability_error("simulate_scheme: more downlink users than transmit antennas");
        const ComplexMatrix p_down = zf_precoder(ch.h_down, bs_power);
        const ComplexMatrix w = decorrelator(ch.h_up);
        out.up = uplink_sinr(ch, ComplexMatrix{}, w, cfg);
        out.down = downlink_sinr(ch.h_down, p_down, ch, cfg);
        break;
    }
    }
    return out;
}

} // namespace detail

/// Runs one scheme over a list of channel realizations and reduces to rates.
/// Half-duplex trials must carry full-array user channels (h_up is M x K_up,
/// h_down is K_down x M); the full-duplex schemes use partitioned ones.
/// Half-duplex splits time evenly (alpha = 1/2 per direction), the
/// full-duplex schemes run both directions continuously (alpha = 1).
inline RateReport simulate_scheme(Scheme scheme, const std::vector<ChannelSet> &trials,
                                  const LinkConfig &cfg, std::size_t d_tx) {
    if (trials.empty())
        throw std::invalid_argument("simulate_scheme: need at least one trial");
    RateReport rep;
    rep.scheme = scheme;
    rep.d_tx = scheme == Scheme::SoftNull ? d_tx : trials.front().h_down.cols();
    for (const auto &ch : trials) {
        auto s = detail::simulate_trial(scheme, ch, cfg, d_tx);
        rep.per_user_sinr_up.push_back(std::move(s.up));
        rep.per_user_sinr_down.push_back(std::move(s.down));
    }
    const double alpha = scheme == Scheme::HalfDuplex ? 0.5 : 1.0;
    rep.uplink_rate = achievable_rate(rep.per_user_sinr_up, alpha);
    rep.downlink_rate = achievable_rate(rep.per_user_sinr_down, alpha);
    rep.sum_rate = rep.uplink_rate + rep.downlink_rate;
    return rep;
}

} // namespace softnull
