// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "softnull/errors.hpp"
#include "softnull/matrix.hpp"
#include "softnull/rng.hpp"

namespace softnull {

/// Thin SVD, a = u * diag(sigma) * adjoint(v), with k = min(rows, cols)
/// columns in u and v and sigma sorted descending.
struct SvdResult {
    ComplexMatrix u;
    std::vector<double> sigma;
    ComplexMatrix v;
};

inline constexpr std::size_t kSvdMaxSweeps = 10000;
inline constexpr double kSvdTol = 1e-12;

inline double default_rank_tol(std::size_t rows, std::size_t cols) {
    return 1e-12 * static_cast<double>(std::max(rows, cols));
}

namespace detail {

// One-sided Jacobi on b with rows >= cols. Orthogonalizes the columns of the
// working copy w = b * v by unitary plane rotations; on return the singular
// values are the column norms of w and v holds the accumulated rotations.
// Convergence: largest relative column inner product <= kSvdTol.
inline void one_sided_jacobi(ComplexMatrix &w, ComplexMatrix &v) {
    const std::size_t q = w.cols();
    if (q < 2)
        return;
    for (std::size_t sweep = 0; sweep < kSvdMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < q; ++p) {
            for (std::size_t r = p + 1; r < q; ++r) {
                double alpha = 0.0, beta = 0.0;
                cxd gamma{0.0, 0.0};
                for (std::size_t i = 0; i < w.rows(); ++i) {
                    const cxd wp = w(i, p), wr = w(i, r);
                    alpha += std::norm(wp);
                    beta += std::norm(wr);
                    gamma += std::conj(wp) * wr;
                }
                if (alpha == 0.0 || beta == 0.0)
                    continue;
                const double g = std::abs(gamma);
                const double rel = g / std::sqrt(alpha * beta);
                off = std::max(off, rel);
                if (rel <= kSvdTol)
                    continue;
                // Strip the phase of gamma, then a real Jacobi rotation
                // annihilates the (p, r) Gram entry.
                const cxd phase = gamma / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const cxd sp = s * std::conj(phase);
                const cxd cp = c * std::conj(phase);
                for (std::size_t i = 0; i < w.rows(); ++i) {
                    const cxd wp = w(i, p), wr = w(i, r);
                    w(i, p) = c * wp - sp * wr;
                    w(i, r) = s * wp + cp * wr;
                }
                for (std::size_t i = 0; i < v.rows(); ++i) {
                    const cxd vp = v(i, p), vr = v(i, r);
                    v(i, p) = c * vp - sp * vr;
                    v(i, r) = s * vp + cp * vr;
                }
            }
        }
        if (off <= kSvdTol)
            return;
    }
    throw numerical_error("svd: Jacobi iteration did not converge within " +
                          std::to_string(kSvdMaxSweeps) + " sweeps");
}

// Appends orthonormal columns to u (m x k, k <= m, existing columns assumed
// orthonormal) until it has `target` columns. Candidates are standard basis
// vectors; at each step the one with the largest residual is taken, which is
// deterministic and never degenerate since the residual projector has rank
// m - k.
inline void complete_orthonormal_columns(ComplexMatrix &u, std::size_t target) {
    const std::size_t m = u.rows();
    std::size_t k = u.cols();
    if (target <= k)
        return;
    ComplexMatrix out(m, target);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m; ++i)
            out(i, j) = u(i, j);
    while (k < target) {
        std::vector<cxd> best;
        double best_norm = -1.0;
        for (std::size_t cand = 0; cand < m; ++cand) {
            std::vector<cxd> vec(m, cxd{0.0, 0.0});
            vec[cand] = cxd{1.0, 0.0};
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j < k; ++j) {
                    cxd dot{0.0, 0.0};
                    for (std::size_t i = 0; i < m; ++i)
                        dot += std::conj(out(i, j)) * vec[i];
                    for (std::size_t i = 0; i < m; ++i)
                        vec[i] -= dot * out(i, j);
                }
            }
            double n = 0.0;
            for (const auto &x : vec)
                n += std::norm(x);
            if (n > best_norm) {
                best_norm = n;
                best = std::move(vec);
            }
        }
        const double inv = 1.0 / std::sqrt(best_norm);
        for (std::size_t i = 0; i < m; ++i)
            out(i, k) = best[i] * inv;
        ++k;
    }
    u = std::move(out);
}

// Multiplies each (u, v) column pair by the unit phase that makes the
// largest-magnitude entry of the v column real and positive. Keeps precoders
// reproducible: the SVD is otherwise unique only up to per-column phase.
inline void normalize_column_phases(ComplexMatrix &u, ComplexMatrix &v) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (best <= 0.0)
            continue;
        const cxd ph = std::conj(v(arg, j)) / best;
        for (std::size_t i = 0; i < v.rows(); ++i)
            v(i, j) *= ph;
        if (j < u.cols())
            for (std::size_t i = 0; i < u.rows(); ++i)
                u(i, j) *= ph;
    }
}

// SVD of b with rows >= cols: b = u * diag(sigma) * adjoint(v), u thin
// (rows x cols), v square (cols x cols). No phase normalization here.
inline SvdResult svd_tall(const ComplexMatrix &b) {
    const std::size_t m = b.rows(), n = b.cols();
    ComplexMatrix w = b;
    ComplexMatrix v = ComplexMatrix::identity(n);
    one_sided_jacobi(w, v);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            s += std::norm(w(i, j));
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return norms[a] > norms[c]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = ComplexMatrix(m, n);
    out.v = ComplexMatrix(n, n);
    std::size_t rank_end = n;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = norms[src];
        for (std::size_t i = 0; i < n; ++i)
            out.v(i, j) = v(i, src);
        if (norms[src] > 0.0) {
            const double inv = 1.0 / norms[src];
            for (std::size_t i = 0; i < m; ++i)
                out.u(i, j) = w(i, src) * inv;
        } else if (rank_end == n) {
            rank_end = j; // exact zero columns: left vectors filled in below
        }
    }
    if (rank_end < n) {
        ComplexMatrix head(m, rank_end);
        for (std::size_t j = 0; j < rank_end; ++j)
            for (std::size_t i = 0; i < m; ++i)
                head(i, j) = out.u(i, j);
        complete_orthonormal_columns(head, n);
        out.u = std::move(head);
    }
    return out;
}

} // namespace detail

/// Thin SVD with descending singular values. Deterministic: each right
/// singular vector's largest-magnitude entry is made real and positive.
/// Throws std::invalid_argument on empty/non-finite input and
/// numerical_error if the Jacobi sweeps fail to converge.
inline SvdResult svd(const ComplexMatrix &a) {
    if (a.rows() == 0 || a.cols() == 0)
        throw std::invalid_argument("svd: matrix must have at least one row and column");
    if (!is_finite(a))
        throw std::invalid_argument("svd: matrix has non-finite entries");

    SvdResult out;
    if (a.rows() >= a.cols()) {
        out = detail::svd_tall(a);
    } else {
        SvdResult t = detail::svd_tall(adjoint(a));
        out.u = std::move(t.v);
        out.sigma = std::move(t.sigma);
        out.v = std::move(t.u);
    }
    detail::normalize_column_phases(out.u, out.v);
    return out;
}

/// Moore-Penrose pseudoinverse. Singular values <= rank_tol * sigma_max are
/// treated as zero.
inline ComplexMatrix pseudoinverse(const ComplexMatrix &a, double rank_tol) {
    if (rank_tol < 0.0 || !std::isfinite(rank_tol))
        throw std::invalid_argument("pseudoinverse: rank_tol must be >= 0");
    const SvdResult s = svd(a);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double cutoff = rank_tol * smax;
    // a+ = v * diag(1/sigma) * adjoint(u)
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        if (s.sigma[j] <= cutoff || s.sigma[j] == 0.0)
            continue;
        const double inv = 1.0 / s.sigma[j];
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const cxd vi = s.v(i, j) * inv;
            for (std::size_t r = 0; r < a.rows(); ++r)
                out(i, r) += vi * std::conj(s.u(r, j));
        }
    }
    return out;
}

inline ComplexMatrix pseudoinverse(const ComplexMatrix &a) {
    return pseudoinverse(a, default_rank_tol(a.rows(), a.cols()));
}

/// Haar-distributed m x d matrix with orthonormal columns: modified
/// Gram-Schmidt QR of an i.i.d. complex Gaussian matrix (MGS leaves the R
/// diagonal real and positive, which is exactly the phase convention that
/// makes Q Haar). Deterministic per seed.
inline ComplexMatrix random_orthonormal_columns(std::size_t m, std::size_t d,
                                                std::uint64_t seed) {
    if (d < 1 || d > m)
        throw std::invalid_argument("random_orthonormal_columns: need 1 <= d <= m");
    Rng rng(seed);
    ComplexMatrix q(m, d);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j)
            q(i, j) = rng.complex_normal();
    for (std::size_t j = 0; j < d; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                cxd dot{0.0, 0.0};
                for (std::size_t i = 0; i < m; ++i)
                    dot += std::conj(q(i, k)) * q(i, j);
                for (std::size_t i = 0; i < m; ++i)
                    q(i, j) -= dot * q(i, k);
            }
        }
        double n = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            n += std::norm(q(i, j));
        if (n == 0.0)
            throw numerical_error("random_orthonormal_columns: degenerate draw");
        const double inv = 1.0 / std::sqrt(n);
        for (std::size_t i = 0; i < m; ++i)
            q(i, j) *= inv;
    }
    return q;
}

/// Extends the right singular vectors of `s` (for a matrix with n columns) to
/// a full orthonormal basis of C^n. The appended columns span the nullspace
/// directions not present in the thin factor and carry singular value zero;
/// they are ordered deterministically.
inline ComplexMatrix full_right_basis(const SvdResult &s, std::size_t n) {
    if (s.v.rows() != n)
        throw std::invalid_argument("full_right_basis: v does not match column count");
    ComplexMatrix v = s.v;
    detail::complete_orthonormal_columns(v, n);
    return v;
}

} // namespace softnull
