// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#include <doctest.h>

#include "softnull/link.hpp"
#include "test_helpers.hpp"

using namespace softnull;
using testutil::random_complex;

namespace {

LinkConfig quiet_config() {
    LinkConfig cfg;
    cfg.bs_power_dbm = 0.0;
    cfg.user_power_dbm = -10.0;
    cfg.thermal_noise_dbm = -95.0;
    cfg.d0_bs_db = 25.0;
    cfg.d0_user_db = 25.0;
    return cfg;
}

ChannelSet scalar_set(cxd h_self, cxd h_up, cxd h_down) {
    ChannelSet ch;
    ch.h_self = ComplexMatrix(1, 1);
    ch.h_self(0, 0) = h_self;
    ch.h_up = ComplexMatrix(1, 1);
    ch.h_up(0, 0) = h_up;
    ch.h_down = ComplexMatrix(1, 1);
    ch.h_down(0, 0) = h_down;
    return ch;
}

std::vector<ChannelSet> rayleigh_trials(std::size_t n, std::size_t m_rx, std::size_t m_tx,
                                        std::size_t k, double pl, std::uint64_t seed) {
    std::vector<ChannelSet> trials;
    for (std::size_t t = 0; t < n; ++t) {
        ChannelSet ch;
        ch.h_self = 0.01 * random_complex(m_rx, m_tx, derive_seed(seed, t, 0));
        ch.h_up = rayleigh_channel(m_rx, k, pl, derive_seed(seed, t, 1));
        ch.h_down = rayleigh_channel(k, m_tx, pl, derive_seed(seed, t, 2));
        trials.push_back(std::move(ch));
    }
    return trials;
}

} // namespace

TEST_SUITE_BEGIN("link");

TEST_CASE("dynamic noise floor sits d0 below the received power") {
    CHECK(mw_to_dbm(dynamic_noise_power(dbm_to_mw(-20.0), 40.0)) ==
          doctest::Approx(-60.0).epsilon(1e-9));
    CHECK(mw_to_dbm(dynamic_noise_power(dbm_to_mw(-50.0), 40.0)) ==
          doctest::Approx(-90.0).epsilon(1e-9));
    CHECK(dynamic_noise_power(3.5, 0.0) == doctest::Approx(3.5));
    CHECK_THROWS_AS(dynamic_noise_power(-1.0, 10.0), std::invalid_argument);
}

TEST_CASE("link budget reproduces the worked dominant-mode arithmetic") {
    CHECK(link_budget_snr(0, 80, 20, -90, 40, NoiseCombine::Dominant) ==
          doctest::Approx(-20.0).epsilon(1e-9));
    CHECK(link_budget_snr(0, 80, 50, -90, 40, NoiseCombine::Dominant) ==
          doctest::Approx(10.0).epsilon(1e-9));
    CHECK(link_budget_snr(0, 100, 70, -90, 40, NoiseCombine::Dominant) ==
          doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("link budget with thermal-dominated reception uses the thermal floor") {
    // suppression so strong the SI falls below thermal noise
    CHECK(link_budget_snr(0, 80, 120, -90, 40, NoiseCombine::Dominant) ==
          doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("sum mode power-sums both floors") {
    const double snr = link_budget_snr(0, 80, 50, -90, 40, NoiseCombine::Sum);
    const double noise = mw_to_dbm(dbm_to_mw(-90.0) + dbm_to_mw(-90.0));
    CHECK(snr == doctest::Approx(-80.0 - noise).epsilon(1e-9));
    CHECK(snr < link_budget_snr(0, 80, 50, -90, 40, NoiseCombine::Dominant));
}

TEST_CASE("single-user uplink with silent downlink reduces to an SNR") {
    LinkConfig cfg = quiet_config();
    cfg.d0_bs_db = 1000.0; // dynamic noise off
    // |h|^2 * p_user = 100 * thermal  ->  SINR = 20 dB
    cfg.user_power_dbm = cfg.thermal_noise_dbm + 20.0;
    auto ch = scalar_set(cxd{0.0, 0.0}, cxd{1.0, 0.0}, cxd{0.0, 0.0});
    const auto w = decorrelator(ch.h_up);
    const auto sinr = uplink_sinr(ch, ComplexMatrix{}, w, cfg);
    REQUIRE(sinr.size() == 1);
    CHECK(10.0 * std::log10(sinr[0]) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("huge self-interference caps the SINR at the dynamic-range limit") {
    LinkConfig cfg = quiet_config();
    cfg.d0_bs_db = 25.0;
    auto ch = scalar_set(cxd{1000.0, 0.0}, cxd{1.0, 0.0}, cxd{1.0, 0.0});
    ComplexMatrix tx(1, 1);
    tx(0, 0) = cxd{1.0, 0.0}; // unit downlink drive
    const auto w = decorrelator(ch.h_up);
    const auto sinr = uplink_sinr(ch, tx, w, cfg);

    const double p_user = dbm_to_mw(cfg.user_power_dbm);
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    const double si = 1000.0 * 1000.0;
    const double closed_form =
        p_user / (thermal + (p_user + si + thermal) / db_to_linear(25.0));
    CHECK(sinr[0] == doctest::Approx(closed_form).epsilon(1e-9));
    // bounded by signal over (SI / d0)
    CHECK(sinr[0] <= p_user / (si / db_to_linear(25.0)));
}

TEST_CASE("zero self-interference equals the no-SI SNR exactly") {
    LinkConfig cfg = quiet_config();
    auto ch = rayleigh_trials(1, 4, 4, 2, 10.0, 99).front();
    const auto w = decorrelator(ch.h_up);
    ComplexMatrix zero_tx(4, 2); // transmitting zeros through a nonzero channel
    const auto with_zero_tx = uplink_sinr(ch, zero_tx, w, cfg);
    ch.h_self = ComplexMatrix(4, 4);
    ComplexMatrix live_tx = random_complex(4, 2, 100);
    const auto with_zero_channel = uplink_sinr(ch, live_tx, w, cfg);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(with_zero_tx[i] == doctest::Approx(with_zero_channel[i]).epsilon(1e-12));
}

TEST_CASE("ZF downlink with huge client dynamic range hits alpha^2 over thermal") {
    LinkConfig cfg = quiet_config();
    cfg.d0_user_db = 1000.0;
    const auto h_eff = random_complex(2, 5, 101);
    const auto p_down = zf_precoder(h_eff, dbm_to_mw(cfg.bs_power_dbm));
    ChannelSet ch;
    ch.h_up = ComplexMatrix(2, 2);
    ch.h_down = h_eff;
    const auto sinr = downlink_sinr(h_eff, p_down, ch, cfg);
    const auto g = h_eff * p_down;
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(sinr[j] == doctest::Approx(std::norm(g(j, j)) / thermal).epsilon(1e-9));
}

TEST_CASE("uplink users leak into the downlink through h_usr") {
    LinkConfig cfg = quiet_config();
    cfg.include_h_usr = true;
    cfg.d0_user_db = 1000.0;
    const cxd g_usr{0.3, -0.4};
    ChannelSet ch = scalar_set(cxd{0.0, 0.0}, cxd{1.0, 0.0}, cxd{1.0, 0.0});
    ch.h_usr = ComplexMatrix(1, 1);
    (*ch.h_usr)(0, 0) = g_usr;
    ComplexMatrix h_eff(1, 1);
    h_eff(0, 0) = cxd{1.0, 0.0};
    ComplexMatrix p_down(1, 1);
    p_down(0, 0) = cxd{1.0, 0.0};

    const auto sinr = downlink_sinr(h_eff, p_down, ch, cfg);
    const double p_user = dbm_to_mw(cfg.user_power_dbm);
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    const double want = 1.0 / (std::norm(g_usr) * p_user + thermal);
    CHECK(sinr[0] == doctest::Approx(want).epsilon(1e-12));

    cfg.include_h_usr = false; // flag off: the same channel no longer interferes
    const auto sinr_off = downlink_sinr(h_eff, p_down, ch, cfg);
    CHECK(sinr_off[0] > sinr[0]);
}

TEST_CASE("zero downlink precoder gives zero SINR") {
    LinkConfig cfg = quiet_config();
    const auto h_eff = random_complex(2, 3, 103);
    ChannelSet ch;
    const auto sinr = downlink_sinr(h_eff, ComplexMatrix(3, 2), ch, cfg);
    CHECK(sinr[0] == 0.0);
    CHECK(sinr[1] == 0.0);
}

TEST_CASE("achievable rate arithmetic") {
    CHECK(achievable_rate({{1.0}}, 1.0) == doctest::Approx(1.0));
    CHECK(achievable_rate({{1.0}}, 0.5) == doctest::Approx(0.5));
    CHECK(achievable_rate({{1.0}, {3.0}}, 1.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(achievable_rate({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(achievable_rate({{1.0}}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(achievable_rate({{-0.5}}, 1.0), std::invalid_argument);
}

TEST_CASE("ideal full duplex dominates SoftNull trial by trial") {
    LinkConfig cfg = quiet_config();
    const auto trials = rayleigh_trials(10, 6, 6, 2, 40.0, 7);
    for (const auto &trial : trials) {
        const std::vector<ChannelSet> one{trial};
        const auto ideal = simulate_scheme(Scheme::IdealFullDuplex, one, cfg, 0);
        for (std::size_t d = 2; d <= 6; ++d) {
            const auto sn = simulate_scheme(Scheme::SoftNull, one, cfg, d);
            CHECK(ideal.sum_rate >= sn.sum_rate - 1e-12);
        }
    }
}

TEST_CASE("perfect suppression and huge dynamic range meet the ideal uplink") {
    LinkConfig cfg = quiet_config();
    cfg.d0_bs_db = 4000.0;
    cfg.d0_user_db = 4000.0;
    auto trials = rayleigh_trials(3, 5, 5, 2, 30.0, 8);
    for (auto &t : trials)
        t.h_self = ComplexMatrix(5, 5); // exact null: suppression is perfect
    const auto sn = simulate_scheme(Scheme::SoftNull, trials, cfg, 3);
    const auto ideal = simulate_scheme(Scheme::IdealFullDuplex, trials, cfg, 0);
    CHECK(sn.uplink_rate == doctest::Approx(ideal.uplink_rate).epsilon(1e-9));
}

TEST_CASE("single-user toy link matches the closed form") {
    LinkConfig cfg = quiet_config();
    const cxd s{0.02, 0.01}, a{0.8, -0.3}, b{1.1, 0.4};
    const ChannelSet ch = scalar_set(s, a, b);
    const auto rep = simulate_scheme(Scheme::SoftNull, {ch}, cfg, 1);

    // worked by hand: P_Self is a unit phase, ZF pours all power down the
    // scalar channel, the uplink sees SI power |s|^2 * p_bs
    const double p_bs = dbm_to_mw(cfg.bs_power_dbm);
    const double p_user = dbm_to_mw(cfg.user_power_dbm);
    const double thermal = dbm_to_mw(cfg.thermal_noise_dbm);
    const double d0 = db_to_linear(cfg.d0_bs_db);
    const double d0u = db_to_linear(cfg.d0_user_db);

    const double si = std::norm(s) * p_bs;
    const double sig_up = std::norm(a) * p_user;
    const double up_noise = thermal + (sig_up + si + thermal) / d0;
    const double want_up = std::log2(1.0 + sig_up / up_noise);

    const double sig_down = std::norm(b) * p_bs;
    const double down_noise = thermal + (sig_down + thermal) / d0u;
    const double want_down = std::log2(1.0 + sig_down / down_noise);

    CHECK(rep.uplink_rate == doctest::Approx(want_up).epsilon(1e-9));
    CHECK(rep.downlink_rate == doctest::Approx(want_down).epsilon(1e-9));
    CHECK(rep.sum_rate == doctest::Approx(want_up + want_down).epsilon(1e-9));
}

TEST_CASE("half duplex halves the full-time rate exactly") {
    LinkConfig cfg = quiet_config();
    const auto trials = rayleigh_trials(4, 6, 6, 2, 50.0, 9);
    const auto hd = simulate_scheme(Scheme::HalfDuplex, trials, cfg, 0);
    CHECK(2.0 * hd.uplink_rate == achievable_rate(hd.per_user_sinr_up, 1.0));
    CHECK(2.0 * hd.downlink_rate == achievable_rate(hd.per_user_sinr_down, 1.0));
}

TEST_CASE("rates are monotone in the transmit powers") {
    LinkConfig lo = quiet_config();
    const auto trials = rayleigh_trials(4, 6, 6, 2, 60.0, 10);
    LinkConfig hi_bs = lo;
    hi_bs.bs_power_dbm += 6.0;
    LinkConfig hi_user = lo;
    hi_user.user_power_dbm += 6.0;
    for (Scheme s : {Scheme::HalfDuplex, Scheme::SoftNull, Scheme::IdealFullDuplex}) {
        const auto base = simulate_scheme(s, trials, lo, 4);
        const auto bs = simulate_scheme(s, trials, hi_bs, 4);
        const auto user = simulate_scheme(s, trials, hi_user, 4);
        CHECK(bs.downlink_rate >= base.downlink_rate - 1e-12);
        CHECK(user.uplink_rate >= base.uplink_rate - 1e-12);
    }
}

TEST_CASE("SoftNull uplink SINR trends down as d_tx grows") {
    // The residual SI power is monotone in d_tx (tested in precoding), but the
    // per-trial SINR is not: the ZF stage redistributes power over the grown
    // subspace and can momentarily shed interference. The mean trend is what
    // survives, and it is steep.
    LinkConfig cfg = quiet_config();
    const auto trials = rayleigh_trials(10, 6, 6, 2, 60.0, 11);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t d = 2; d <= 6; ++d) {
        double mean_db = 0.0;
        std::size_t n = 0;
        for (const auto &trial : trials) {
            const auto rep = simulate_scheme(Scheme::SoftNull, {trial}, cfg, d);
            for (double s : rep.per_user_sinr_up.front()) {
                mean_db += 10.0 * std::log10(s);
                ++n;
            }
        }
        mean_db /= static_cast<double>(n);
        CHECK(mean_db <= prev + 1e-9);
        prev = mean_db;
    }
}

TEST_CASE("energy accounting: transmit power equals the constraint") {
    LinkConfig cfg = quiet_config();
    const auto trials = rayleigh_trials(1, 6, 6, 2, 50.0, 12);
    const auto &ch = trials.front();
    const double p_bs = dbm_to_mw(cfg.bs_power_dbm);
    const auto pre = softnull_precoder(ch.h_self, 4);
    const auto h_eff = effective_channel(ch.h_down, pre.p_self);
    const auto p_down = zf_precoder(h_eff, p_bs);
    const auto composite = pre.p_self * p_down;
    CHECK(frobenius_norm_sq(composite) == doctest::Approx(p_bs).epsilon(1e-9));
}

TEST_CASE("capability errors on infeasible user counts") {
    LinkConfig cfg = quiet_config();
    const auto trials = rayleigh_trials(1, 3, 6, 3, 40.0, 13);
    CHECK_THROWS_AS(simulate_scheme(Scheme::SoftNull, trials, cfg, 2), capability_error);
    const auto too_many_up = rayleigh_trials(1, 2, 6, 3, 40.0, 14);
    CHECK_THROWS_AS(simulate_scheme(Scheme::SoftNull, too_many_up, cfg, 4),
                    capability_error);
}

TEST_SUITE_END();
