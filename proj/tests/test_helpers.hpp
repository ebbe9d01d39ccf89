// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "softnull/matrix.hpp"
#include "softnull/rng.hpp"

namespace testutil {

using softnull::ComplexMatrix;
using softnull::cxd;

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    softnull::Rng rng(seed);
    ComplexMatrix m(rows, cols);
    for (auto &x : m.data())
        x = rng.complex_normal();
    return m;
}

inline ComplexMatrix diag(const std::vector<double> &d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = cxd{d[i], 0.0};
    return m;
}

inline double max_entry_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

/// Frobenius distance from a†a to the identity.
inline double orthonormality_error(const ComplexMatrix &a) {
    const ComplexMatrix g = softnull::adjoint(a) * a;
    double s = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
            const cxd want = i == j ? cxd{1.0, 0.0} : cxd{0.0, 0.0};
            s += std::norm(g(i, j) - want);
        }
    return std::sqrt(s);
}

/// Determinant by plain Gaussian elimination with partial pivoting;
/// independent of the library's decompositions.
inline cxd determinant(ComplexMatrix a) {
    const std::size_t n = a.rows();
    cxd det{1.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c)))
                piv = r;
        if (std::abs(a(piv, c)) == 0.0)
            return cxd{0.0, 0.0};
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(piv, j), a(c, j));
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const cxd f = a(r, c) / a(c, c);
            for (std::size_t j = c; j < n; ++j)
                a(r, j) -= f * a(c, j);
        }
    }
    return det;
}

} // namespace testutil
