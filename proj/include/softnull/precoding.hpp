// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "softnull/errors.hpp"
#include "softnull/matrix.hpp"
#include "softnull/svd.hpp"

namespace softnull {

/// Self-interference-minimizing transmit projection. p_self has d_tx
/// orthonormal columns: the right singular vectors of the self-interference
/// channel belonging to the d_tx smallest singular values. residual_power is
/// the total interference power it leaves, ||h_self * p_self||_F^2, which
/// equals the sum of those smallest squared singular values.
struct SoftNullPrecoder {
    ComplexMatrix p_self; // m_tx x d_tx
    std::size_t d_tx = 0;
    double residual_power = 0.0;
};

/// Builds the precoder from an existing decomposition of h_self. The thin
/// right basis is extended with nullspace directions (singular value zero)
/// when the channel is wide, so every d_tx up to m_tx is reachable.
/// residual_power is evaluated from the singular values: it equals
/// ||h_self * p_self||_F^2 but stays an exact zero on nullspace-only
/// selections instead of picking up basis-completion dust.
inline SoftNullPrecoder softnull_precoder_from_svd(const ComplexMatrix &h_self,
                                                   const SvdResult &s, std::size_t d_tx) {
    const std::size_t m_tx = h_self.cols();
    if (d_tx < 1 || d_tx > m_tx)
        throw std::invalid_argument("softnull_precoder: need 1 <= d_tx <= m_tx");
    const ComplexMatrix v = full_right_basis(s, m_tx);

    SoftNullPrecoder out;
    out.d_tx = d_tx;
    out.p_self = ComplexMatrix(m_tx, d_tx);
    // Columns of v are ordered by descending singular value (appended
    // nullspace columns count as zero), so the last d_tx are the smallest.
    for (std::size_t j = 0; j < d_tx; ++j)
        for (std::size_t i = 0; i < m_tx; ++i)
            out.p_self(i, j) = v(i, m_tx - d_tx + j);
    out.residual_power = 0.0;
    for (std::size_t i = m_tx - d_tx; i < s.sigma.size(); ++i)
        out.residual_power += s.sigma[i] * s.sigma[i];
    return out;
}

inline SoftNullPrecoder softnull_precoder(const ComplexMatrix &h_self, std::size_t d_tx) {
    return softnull_precoder_from_svd(h_self, svd(h_self), d_tx);
}

/// Residual self-interference power for every d_tx in [1, m_tx], from one
/// decomposition: entry d-1 is the sum of the d smallest squared singular
/// values. Matches softnull_precoder(...).residual_power.
inline std::vector<double> residual_power_curve(const SvdResult &s, std::size_t m_tx) {
    std::vector<double> sq(m_tx, 0.0);
    for (std::size_t i = 0; i < s.sigma.size() && i < m_tx; ++i)
        sq[i] = s.sigma[i] * s.sigma[i];
    std::vector<double> out(m_tx, 0.0);
    double acc = 0.0;
    for (std::size_t d = 1; d <= m_tx; ++d) {
        acc += sq[m_tx - d];
        out[d - 1] = acc;
    }
    return out;
}

/// Transmit-to-residual power ratio in dB: unit transmit power split evenly
/// over the d_tx effective antennas, self-interference averaged per receive
/// antenna. +inf when the projection nulls the channel exactly.
inline double suppression_db_from_residual(double residual_power, std::size_t d_tx,
                                           std::size_t m_rx) {
    if (d_tx == 0 || m_rx == 0)
        throw std::invalid_argument("suppression: d_tx and m_rx must be positive");
    if (residual_power < 0.0)
        throw std::invalid_argument("suppression: negative residual power");
    if (residual_power == 0.0)
        return std::numeric_limits<double>::infinity();
    const double mean_si = residual_power / static_cast<double>(d_tx) /
                           static_cast<double>(m_rx);
    return -10.0 * std::log10(mean_si);
}

inline double suppression_db(const ComplexMatrix &h_self, const SoftNullPrecoder &pre,
                             std::size_t m_rx) {
    if (h_self.cols() != pre.p_self.rows() || h_self.rows() != m_rx)
        throw std::invalid_argument("suppression: dimensions inconsistent");
    return suppression_db_from_residual(pre.residual_power, pre.d_tx, m_rx);
}

/// Downlink channel as seen by the MU-MIMO stage: h_down * p_self.
inline ComplexMatrix effective_channel(const ComplexMatrix &h_down,
                                       const ComplexMatrix &p_self) {
    return h_down * p_self;
}

/// Zero-forcing downlink precoder: scaled right pseudoinverse of the
/// effective channel, so h_eff * p_down = alpha * I and, with unit-power
/// independent user symbols, the expected transmit power equals total_power.
inline ComplexMatrix zf_precoder(const ComplexMatrix &h_eff, double total_power) {
    if (!(total_power >= 0.0))
        throw std::invalid_argument("zf_precoder: total_power must be >= 0");
    const std::size_t k = h_eff.rows(), d = h_eff.cols();
    if (k > d)
        throw rank_error("zf_precoder: more users than effective antennas");
    const SvdResult s = svd(h_eff);
    const double tol = default_rank_tol(k, d);
    if (s.sigma.back() <= tol * s.sigma.front() || s.sigma.back() == 0.0)
        throw rank_error("zf_precoder: effective channel is row rank deficient");
    ComplexMatrix raw(d, k);
    for (std::size_t j = 0; j < k; ++j) {
        const double inv = 1.0 / s.sigma[j];
        for (std::size_t i = 0; i < d; ++i) {
            const cxd vi = s.v(i, j) * inv;
            for (std::size_t r = 0; r < k; ++r)
                raw(i, r) += vi * std::conj(s.u(r, j));
        }
    }
    const double alpha = std::sqrt(total_power / frobenius_norm_sq(raw));
    return alpha * raw;
}

/// Matched-filter (MRT) downlink precoder: conjugate-transposed channel,
/// scaled to the sum-power constraint.
inline ComplexMatrix matched_filter_precoder(const ComplexMatrix &h_eff,
                                             double total_power) {
    if (!(total_power >= 0.0))
        throw std::invalid_argument("matched_filter_precoder: total_power must be >= 0");
    const double norm_sq = frobenius_norm_sq(h_eff);
    if (norm_sq == 0.0)
        throw std::invalid_argument("matched_filter_precoder: channel is zero");
    return std::sqrt(total_power / norm_sq) * adjoint(h_eff);
}

/// Uplink decorrelator: left pseudoinverse of the uplink channel, so
/// w * h_up = I and inter-user interference is nulled.
inline ComplexMatrix decorrelator(const ComplexMatrix &h_up) {
    const std::size_t m = h_up.rows(), k = h_up.cols();
    if (k > m)
        throw rank_error("decorrelator: more uplink users than receive antennas");
    const SvdResult s = svd(h_up);
    const double tol = default_rank_tol(m, k);
    if (s.sigma.back() <= tol * s.sigma.front() || s.sigma.back() == 0.0)
        throw rank_error("decorrelator: uplink channel is column rank deficient");
    ComplexMatrix w(k, m);
    for (std::size_t j = 0; j < k; ++j) {
        const double inv = 1.0 / s.sigma[j];
        for (std::size_t i = 0; i < k; ++i) {
            const cxd vi = s.v(i, j) * inv;
            for (std::size_t r = 0; r < m; ++r)
                w(i, r) += vi * std::conj(s.u(r, j));
        }
    }
    return w;
}

} // namespace softnull
