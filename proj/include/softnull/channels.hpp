// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "softnull/geometry.hpp"
#include "softnull/matrix.hpp"
#include "softnull/rng.hpp"
#include "softnull/svd.hpp"

namespace softnull {

/// One trial's channel matrices. Entries are linear amplitude gains, so
/// |entry|^2 is a power gain. h_usr (uplink-user to downlink-user) defaults
/// to absent, i.e. zero.
struct ChannelSet {
    ComplexMatrix h_self; // m_rx x m_tx
    ComplexMatrix h_up;   // m_rx x k_up
    ComplexMatrix h_down; // k_down x m_tx
    std::optional<ComplexMatrix> h_usr; // k_down x k_up
    std::uint32_t subcarrier_index = 0;
};

/// Parameters of the synthetic (Rician-mixture) self-interference channel.
/// backscatter_ratio is the LOS-to-scattered power ratio: large values give
/// the correlated, outdoor-like channel; small values emulate indoor
/// backscattering. May be infinity for a pure line-of-sight channel.
struct SiChannelParams {
    double wavelength_m = 0.125;
    double backscatter_ratio = 100.0;
    double reference_coupling_db = -15.0;
    std::uint64_t seed = 0;
};

/// Synthetic self-interference channel for a partitioned array:
///   H = sqrt(k/(1+k)) * H_los + sqrt(1/(1+k)) * H_scat
/// H_los decays as 1/distance with phase exp(-j*2*pi*d/lambda), anchored so
/// the coupling magnitude between elements at pitch distance equals
/// reference_coupling_db. H_scat is i.i.d. complex Gaussian with the same
/// mean per-entry power as H_los.
inline ComplexMatrix geometric_self_interference(const ArrayGeometry &geom,
                                                 const Partition &part,
                                                 const SiChannelParams &p) {
    if (!(p.wavelength_m > 0.0))
        throw std::invalid_argument("si channel: wavelength must be positive");
    if (std::isnan(p.backscatter_ratio) || p.backscatter_ratio < 0.0)
        throw std::invalid_argument("si channel: backscatter ratio must be >= 0");
    const std::size_t m_rx = part.m_rx(), m_tx = part.m_tx();
    if (m_rx == 0 || m_tx == 0)
        throw std::invalid_argument("si channel: empty partition");

    const double g = std::pow(10.0, p.reference_coupling_db / 20.0);
    const double d0 = geom.spacing_m;
    ComplexMatrix los(m_rx, m_tx);
    for (std::size_t r = 0; r < m_rx; ++r) {
        const auto &pr = geom.positions.at(part.rx[r]);
        for (std::size_t t = 0; t < m_tx; ++t) {
            const auto &pt = geom.positions.at(part.tx[t]);
            const double dx = pr[0] - pt[0], dy = pr[1] - pt[1], dz = pr[2] - pt[2];
            const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (d == 0.0)
                throw std::invalid_argument("si channel: coincident tx/rx elements");
            const double amp = g * d0 / d;
            const double ph = -2.0 * std::numbers::pi * d / p.wavelength_m;
            los(r, t) = cxd{amp * std::cos(ph), amp * std::sin(ph)};
        }
    }
    if (std::isinf(p.backscatter_ratio))
        return los;

    const double mean_power = frobenius_norm_sq(los) / static_cast<double>(m_rx * m_tx);
    const double scat_amp = std::sqrt(mean_power);
    Rng rng(p.seed);
    const double w_los = std::sqrt(p.backscatter_ratio / (1.0 + p.backscatter_ratio));
    const double w_scat = std::sqrt(1.0 / (1.0 + p.backscatter_ratio));
    ComplexMatrix h(m_rx, m_tx);
    for (std::size_t r = 0; r < m_rx; ++r)
        for (std::size_t t = 0; t < m_tx; ++t)
            h(r, t) = w_los * los(r, t) + w_scat * scat_amp * rng.complex_normal();
    return h;
}

/// i.i.d. Rayleigh-fading channel: circular complex Gaussian entries with
/// per-entry mean power 10^(-path_loss_db/10). Deterministic per seed.
inline ComplexMatrix rayleigh_channel(std::size_t rows, std::size_t cols,
                                      double path_loss_db, std::uint64_t seed) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("rayleigh channel: empty dimensions");
    if (!(path_loss_db >= 0.0))
        throw std::invalid_argument("rayleigh channel: path loss must be >= 0 dB");
    const double amp = std::pow(10.0, -path_loss_db / 20.0);
    Rng rng(seed);
    ComplexMatrix h(rows, cols);
    for (auto &x : h.data())
        x = amp * rng.complex_normal();
    return h;
}

/// Entry-wise coupling magnitudes in dB: 20*log10|h|, -inf for exact zeros.
inline RealMatrix coupling_map(const ComplexMatrix &h_self) {
    if (!is_finite(h_self))
        throw std::invalid_argument("coupling map: matrix has non-finite entries");
    RealMatrix out(h_self.rows(), h_self.cols());
    for (std::size_t i = 0; i < h_self.rows(); ++i)
        for (std::size_t j = 0; j < h_self.cols(); ++j) {
            const double a = std::abs(h_self(i, j));
            out(i, j) = a == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : 20.0 * std::log10(a);
        }
    return out;
}

/// Fraction of the channel's Frobenius power carried by the n dominant
/// singular modes.
inline double eigenvalue_concentration(const ComplexMatrix &h, std::size_t n) {
    const std::size_t k = std::min(h.rows(), h.cols());
    if (n < 1 || n > k)
        throw std::invalid_argument("eigenvalue_concentration: need 1 <= n <= min(rows, cols)");
    const SvdResult s = svd(h);
    double head = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.sigma.size(); ++i) {
        const double p = s.sigma[i] * s.sigma[i];
        total += p;
        if (i < n)
            head += p;
    }
    if (total == 0.0)
        return 1.0;
    return head / total;
}

} // namespace softnull
