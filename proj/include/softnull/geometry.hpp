// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "softnull/rng.hpp"

namespace softnull {

/// Rectangular planar antenna array. Elements are indexed row-major
/// (index = row * n_cols + col) and sit in the x/y plane: columns advance
/// east (+x), rows advance south (-y).
struct ArrayGeometry {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    double spacing_m = 0.0;
    std::vector<std::array<double, 3>> positions;

    static ArrayGeometry rectangular(std::size_t n_rows, std::size_t n_cols,
                                     double spacing_m) {
        if (n_rows == 0 || n_cols == 0)
            throw std::invalid_argument("geometry: array must have rows and columns");
        if (!(spacing_m > 0.0))
            throw std::invalid_argument("geometry: spacing must be positive");
        ArrayGeometry g;
        g.n_rows = n_rows;
        g.n_cols = n_cols;
        g.spacing_m = spacing_m;
        g.positions.reserve(n_rows * n_cols);
        for (std::size_t r = 0; r < n_rows; ++r)
            for (std::size_t c = 0; c < n_cols; ++c)
                g.positions.push_back({static_cast<double>(c) * spacing_m,
                                       -static_cast<double>(r) * spacing_m, 0.0});
        return g;
    }

    std::size_t size() const { return n_rows * n_cols; }
    std::size_t row_of(std::size_t index) const { return index / n_cols; }
    std::size_t col_of(std::size_t index) const { return index % n_cols; }
};

/// Disjoint transmit/receive element sets. Indices are stored ascending;
/// they define the row (receive) and column (transmit) ordering of the
/// self-interference channel matrix.
struct Partition {
    std::vector<std::size_t> tx;
    std::vector<std::size_t> rx;

    std::size_t m_tx() const { return tx.size(); }
    std::size_t m_rx() const { return rx.size(); }
};

namespace detail {

inline void check_m_tx(const ArrayGeometry &geom, std::size_t m_tx) {
    if (m_tx < 1 || m_tx >= geom.size())
        throw std::invalid_argument("partition: need 1 <= m_tx < total elements");
}

// Splits the fill order: first m_tx indices transmit, the rest receive.
inline Partition from_fill_order(std::vector<std::size_t> order, std::size_t m_tx) {
    Partition p;
    p.tx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m_tx));
    p.rx.assign(order.begin() + static_cast<std::ptrdiff_t>(m_tx), order.end());
    std::sort(p.tx.begin(), p.tx.end());
    std::sort(p.rx.begin(), p.rx.end());
    return p;
}

} // namespace detail

/// Transmit side fills whole columns west to east, each column top to bottom.
inline Partition east_west(const ArrayGeometry &geom, std::size_t m_tx) {
    detail::check_m_tx(geom, m_tx);
    std::vector<std::size_t> order;
    order.reserve(geom.size());
    for (std::size_t c = 0; c < geom.n_cols; ++c)
        for (std::size_t r = 0; r < geom.n_rows; ++r)
            order.push_back(r * geom.n_cols + c);
    return detail::from_fill_order(std::move(order), m_tx);
}

/// Transmit side fills whole rows top to bottom, each row left to right.
inline Partition north_south(const ArrayGeometry &geom, std::size_t m_tx) {
    detail::check_m_tx(geom, m_tx);
    std::vector<std::size_t> order(geom.size());
    std::iota(order.begin(), order.end(), 0);
    return detail::from_fill_order(std::move(order), m_tx);
}

/// Transmit side grows from the northwest corner in anti-diagonal bands:
/// ascending row + col, ties broken by ascending column.
inline Partition nw_se(const ArrayGeometry &geom, std::size_t m_tx) {
    detail::check_m_tx(geom, m_tx);
    std::vector<std::size_t> order(geom.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const std::size_t ka = geom.row_of(a) + geom.col_of(a);
        const std::size_t kb = geom.row_of(b) + geom.col_of(b);
        if (ka != kb)
            return ka < kb;
        return geom.col_of(a) < geom.col_of(b);
    });
    return detail::from_fill_order(std::move(order), m_tx);
}

/// Checkerboard: transmit gets the even (row + col) parity cells, truncated
/// or extended in row-major order when the parity classes are uneven.
/// Only the two balanced sizes are meaningful, anything else is rejected.
inline Partition interleaved(const ArrayGeometry &geom, std::size_t m_tx) {
    detail::check_m_tx(geom, m_tx);
    const std::size_t m = geom.size();
    if (m_tx != m / 2 && m_tx != (m + 1) / 2)
        throw std::invalid_argument("interleaved: m_tx must be floor(M/2) or ceil(M/2)");
    std::vector<std::size_t> order;
    order.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        if ((geom.row_of(i) + geom.col_of(i)) % 2 == 0)
            order.push_back(i);
    for (std::size_t i = 0; i < m; ++i)
        if ((geom.row_of(i) + geom.col_of(i)) % 2 == 1)
            order.push_back(i);
    return detail::from_fill_order(std::move(order), m_tx);
}

/// Uniformly random m_tx-subset as the transmit side (Fisher-Yates over the
/// element indices). Deterministic per seed.
inline Partition random_partition(const ArrayGeometry &geom, std::size_t m_tx,
                                  std::uint64_t seed) {
    detail::check_m_tx(geom, m_tx);
    std::vector<std::size_t> order(geom.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(order[i], order[j]);
    }
    return detail::from_fill_order(std::move(order), m_tx);
}

} // namespace softnull
