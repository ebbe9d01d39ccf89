// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#include <doctest.h>

#include <limits>

#include "softnull/precoding.hpp"
#include "test_helpers.hpp"

using namespace softnull;
using testutil::orthonormality_error;
using testutil::random_complex;

namespace {

double sum_smallest_sq(const ComplexMatrix &h, std::size_t d) {
    // independent route: singular values of a fresh decomposition, padded
    // with zeros for nullspace dimensions
    const SvdResult s = svd(h);
    std::vector<double> sq(h.cols(), 0.0);
    for (std::size_t i = 0; i < s.sigma.size(); ++i)
        sq[i] = s.sigma[i] * s.sigma[i];
    double acc = 0.0;
    for (std::size_t i = h.cols() - d; i < h.cols(); ++i)
        acc += sq[i];
    return acc;
}

ComplexMatrix projector(const ComplexMatrix &p) { return p * adjoint(p); }

} // namespace

TEST_SUITE_BEGIN("precoding");

TEST_CASE("identity channel: any orthonormal basis leaves full residual") {
    const auto pre = softnull_precoder(ComplexMatrix::identity(3), 3);
    CHECK(pre.residual_power == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(orthonormality_error(pre.p_self) < 1e-10);
}

TEST_CASE("diagonal channel selects the weakest axis") {
    const auto pre = softnull_precoder(testutil::diag({3.0, 2.0, 1.0}), 1);
    CHECK(pre.residual_power == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(pre.p_self(2, 0)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(pre.p_self(0, 0)) < 1e-10);
    CHECK(std::abs(pre.p_self(1, 0)) < 1e-10);
}

TEST_CASE("residual equals the sum of the smallest squared singular values") {
    const auto h = random_complex(6, 6, 3);
    const auto pre = softnull_precoder(h, 2);
    CHECK(pre.residual_power ==
          doctest::Approx(sum_smallest_sq(h, 2)).epsilon(1e-9));
}

TEST_CASE("brute-force oracle: no sampled orthonormal candidate does better") {
    const auto h = random_complex(6, 6, 3);
    const auto pre = softnull_precoder(h, 2);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 100000; ++s) {
        const auto q = random_orthonormal_columns(6, 2, s);
        best = std::min(best, frobenius_norm_sq(h * q));
    }
    CHECK(pre.residual_power <= best * (1.0 + 1e-9));
}

TEST_CASE("wide channel: nullspace dimensions come first and cost nothing") {
    const auto h = random_complex(3, 6, 4); // rank 3, nullspace dim 3
    const auto pre = softnull_precoder(h, 3);
    CHECK(pre.residual_power < 1e-18);
    CHECK(orthonormality_error(pre.p_self) < 1e-10);
    const auto pre5 = softnull_precoder(h, 5);
    CHECK(pre5.residual_power ==
          doctest::Approx(sum_smallest_sq(h, 5)).epsilon(1e-9));
}

TEST_CASE("d_tx bounds are enforced") {
    const auto h = random_complex(3, 4, 5);
    CHECK_THROWS_AS(softnull_precoder(h, 0), std::invalid_argument);
    CHECK_THROWS_AS(softnull_precoder(h, 5), std::invalid_argument);
}

TEST_CASE("residual grows and suppression falls as d_tx grows") {
    const auto h = random_complex(5, 5, 6);
    double prev_res = -1.0;
    double prev_supp = std::numeric_limits<double>::infinity();
    for (std::size_t d = 1; d <= 5; ++d) {
        const auto pre = softnull_precoder(h, d);
        CHECK(pre.residual_power >= prev_res - 1e-12);
        const double supp = suppression_db(h, pre, 5);
        CHECK(supp <= prev_supp + 1e-9);
        prev_res = pre.residual_power;
        prev_supp = supp;
    }
}

TEST_CASE("suppression on the identity channel is 10*log10(3)") {
    const auto h = ComplexMatrix::identity(3);
    const auto pre = softnull_precoder(h, 3);
    CHECK(suppression_db(h, pre, 3) ==
          doctest::Approx(10.0 * std::log10(3.0)).epsilon(1e-9));
}

TEST_CASE("rank-deficient channel yields a perfect null") {
    const auto pre = softnull_precoder(testutil::diag({2.0, 1.0, 0.0}), 1);
    CHECK(suppression_db(testutil::diag({2.0, 1.0, 0.0}), pre, 3) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("scaling the channel does not move the selected subspace") {
    const auto h = random_complex(5, 5, 8);
    const auto base = softnull_precoder(h, 2);
    for (cxd c : {cxd{3.0, 0.0}, cxd{0.0, -2.0}, cxd{-0.5, 1.5}}) {
        const auto scaled = softnull_precoder(c * h, 2);
        CHECK(frobenius_norm(projector(base.p_self) - projector(scaled.p_self)) < 1e-9);
    }
}

TEST_CASE("effective channel is the plain product") {
    const auto h_down = random_complex(2, 4, 50);
    CHECK(testutil::max_entry_diff(effective_channel(h_down, ComplexMatrix::identity(4)),
                                   h_down) == 0.0);
    const auto p = random_complex(4, 3, 51);
    const auto z = effective_channel(ComplexMatrix(2, 4), p);
    CHECK(frobenius_norm_sq(z) == 0.0);
    const auto eff = effective_channel(h_down, p);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            cxd want{0.0, 0.0};
            for (std::size_t k = 0; k < 4; ++k)
                want += h_down(i, k) * p(k, j);
            CHECK(std::abs(eff(i, j) - want) < 1e-12);
        }
}

TEST_CASE("ZF on the identity with matching power is the identity") {
    const auto p = zf_precoder(ComplexMatrix::identity(2), 2.0);
    CHECK(testutil::max_entry_diff(p, ComplexMatrix::identity(2)) < 1e-12);
}

TEST_CASE("ZF diagonalizes with equal diagonal entries") {
    const auto h = testutil::diag({2.0, 1.0});
    const auto p = zf_precoder(h, 4.0);
    const auto g = h * p;
    CHECK(std::abs(g(0, 0) - g(1, 1)) < 1e-12);
    CHECK(std::abs(g(0, 1)) < 1e-12);
    CHECK(std::abs(g(1, 0)) < 1e-12);
    CHECK(frobenius_norm_sq(p) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ZF nulling and power constraint on a random wide channel") {
    const auto h = random_complex(2, 4, 9);
    const double total = 2.5;
    const auto p = zf_precoder(h, total);
    const auto g = h * p;
    const double diag_mag = std::min(std::abs(g(0, 0)), std::abs(g(1, 1)));
    CHECK(std::abs(g(0, 1)) < 1e-9 * diag_mag);
    CHECK(std::abs(g(1, 0)) < 1e-9 * diag_mag);
    CHECK(frobenius_norm_sq(p) == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("ZF rejects rank-deficient effective channels") {
    ComplexMatrix h(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        h(0, j) = cxd{1.0, 0.0};
        h(1, j) = cxd{2.0, 0.0}; // row 1 = 2 * row 0
    }
    CHECK_THROWS_AS(zf_precoder(h, 1.0), rank_error);
    CHECK_THROWS_AS(zf_precoder(random_complex(4, 2, 10), 1.0), rank_error);
}

TEST_CASE("matched filter points along the conjugate channel") {
    const auto h = random_complex(1, 5, 12);
    const auto p = matched_filter_precoder(h, 3.0);
    CHECK(frobenius_norm_sq(p) == doctest::Approx(3.0).epsilon(1e-12));
    // direction check: p is a positive real multiple of adjoint(h)
    const auto ha = adjoint(h);
    const cxd ratio = p(0, 0) / ha(0, 0);
    for (std::size_t i = 1; i < 5; ++i)
        CHECK(std::abs(p(i, 0) / ha(i, 0) - ratio) < 1e-12);
    CHECK(ratio.real() > 0.0);
    CHECK(std::abs(ratio.imag()) < 1e-15);

    CHECK_THROWS_AS(matched_filter_precoder(ComplexMatrix(2, 3), 1.0),
                    std::invalid_argument);
}

TEST_CASE("matched filter on the identity matches the ZF direction") {
    const auto mf = matched_filter_precoder(ComplexMatrix::identity(2), 2.0);
    const auto zf = zf_precoder(ComplexMatrix::identity(2), 2.0);
    CHECK(testutil::max_entry_diff(mf, zf) < 1e-12);
}

TEST_CASE("matched filter beam beats sampled unit beams per user") {
    const auto h = random_complex(3, 6, 13);
    const auto p = matched_filter_precoder(h, 1.0);
    for (std::size_t user = 0; user < 3; ++user) {
        // normalize this user's beam
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < 6; ++i)
            norm_sq += std::norm(p(i, user));
        cxd mf_gain{0.0, 0.0};
        for (std::size_t i = 0; i < 6; ++i)
            mf_gain += h(user, i) * p(i, user);
        const double mf_abs = std::abs(mf_gain) / std::sqrt(norm_sq);
        for (std::uint64_t s = 0; s < 10000; ++s) {
            const auto q = random_orthonormal_columns(6, 1, 5000 + s);
            cxd gain{0.0, 0.0};
            for (std::size_t i = 0; i < 6; ++i)
                gain += h(user, i) * q(i, 0);
            CHECK(std::abs(gain) <= mf_abs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("decorrelator inverts the uplink channel from the left") {
    CHECK(testutil::max_entry_diff(decorrelator(ComplexMatrix::identity(3)),
                                   ComplexMatrix::identity(3)) < 1e-12);
    const auto w_half = decorrelator(2.0 * ComplexMatrix::identity(2));
    CHECK(testutil::max_entry_diff(w_half, 0.5 * ComplexMatrix::identity(2)) < 1e-12);

    const auto h = random_complex(6, 3, 13);
    const auto w = decorrelator(h);
    CHECK(testutil::max_entry_diff(w * h, ComplexMatrix::identity(3)) < 1e-10);
}

TEST_CASE("decorrelator rejects rank deficiency") {
    ComplexMatrix h(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        h(i, 0) = cxd{1.0, static_cast<double>(i)};
        h(i, 1) = cxd{2.0, 2.0 * static_cast<double>(i)};
    }
    CHECK_THROWS_AS(decorrelator(h), rank_error);
    CHECK_THROWS_AS(decorrelator(random_complex(2, 4, 14)), rank_error);
}

TEST_CASE("residual curve matches per-d precoders") {
    const auto h = random_complex(4, 7, 15);
    const SvdResult s = svd(h);
    const auto curve = residual_power_curve(s, 7);
    for (std::size_t d = 1; d <= 7; ++d) {
        const auto pre = softnull_precoder_from_svd(h, s, d);
        CHECK(curve[d - 1] == doctest::Approx(pre.residual_power).epsilon(1e-9));
    }
}

TEST_SUITE_END();
