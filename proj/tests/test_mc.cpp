#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qnet/mc.hpp"

using namespace qnet;

namespace {

IntercityScenario toy(double p_m, double p_b, long long t_m, long long t_b, long long t_msg,
                      long long t_cut, double t_coh_us) {
    IntercityScenario scn;
    scn.p_m = p_m;
    scn.p_b = p_b;
    scn.t_m = t_m;
    scn.t_b = t_b;
    scn.t_msg = t_msg;
    scn.t_int_class = t_msg + 2;
    scn.t_coh_us = t_coh_us;
    scn.w_m = 0.9;
    scn.w_b = 0.8;
    scn.t_cut = t_cut;
    return scn;
}

} // namespace

TEST_CASE("seed determinism") {
    McConfig cfg;
    cfg.scenario = toy(0.3, 0.25, 2, 3, 1, 4, 60.0);
    cfg.mode = Mode::QR;
    cfg.batches = 10;
    cfg.runs_per_batch = 50;
    cfg.master_seed = 987;
    McStats a = run_batches(cfg);
    McStats b = run_batches(cfg);
    CHECK(a.mean_fidelity == b.mean_fidelity);
    CHECK(a.mean_rate == b.mean_rate);
    CHECK(a.fid_p5 == b.fid_p5);
    CHECK(a.n_rounds_total == b.n_rounds_total);
    for (std::size_t i = 0; i < a.batches.size(); ++i)
        CHECK(a.batches[i].mean_fidelity == b.batches[i].mean_fidelity);

    cfg.master_seed = 988;
    McStats c = run_batches(cfg);
    CHECK(c.mean_fidelity != a.mean_fidelity);
}

TEST_CASE("single-run determinism with one batch and one run") {
    McConfig cfg;
    cfg.scenario = toy(0.5, 0.5, 2, 3, 1, 4, 80.0);
    cfg.batches = 1;
    cfg.runs_per_batch = 1;
    cfg.master_seed = 42;
    McStats a = run_batches(cfg);
    McStats b = run_batches(cfg);
    CHECK(a.mean_fidelity == b.mean_fidelity);
    CHECK(a.batches[0].mean_e2e_us == b.batches[0].mean_e2e_us);
}

TEST_CASE("deterministic scenario reproduces the closed-form round exactly") {
    IntercityScenario scn = toy(1.0, 1.0, 2, 5, 3, 6, 200.0);
    Rng rng(1);
    RoundOutcome r = sample_round(rng, scn);
    CHECK(r.y);
    CHECK(r.z_us == scn.t_b + scn.t_msg);
    double k = scn.k();
    CHECK(r.w_e2e ==
          doctest::Approx(scn.w_m * scn.w_m * scn.w_b *
                          std::exp(-k * (2.0 * (scn.t_b - scn.t_m) + scn.t_msg)))
              .epsilon(1e-14));
    RunResult run = simulate_run(rng, scn, Mode::ER);
    CHECK(run.fidelity ==
          doctest::Approx(0.5 * (1.0 + r.w_e2e * std::exp(-k * scn.t_int_class / 2.0)))
              .epsilon(1e-14));
}

TEST_CASE("success frequency agrees with the analytic probability") {
    IntercityScenario scn = toy(0.35, 0.22, 2, 3, 1, 5, 70.0);
    double p = success_probability(scn);
    Rng rng(2718);
    const int n = 1000000;
    int successes = 0;
    for (int i = 0; i < n; ++i) successes += sample_round(rng, scn).y ? 1 : 0;
    double phat = static_cast<double>(successes) / n;
    double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(phat - p) < 3.0 * sigma);
}

TEST_CASE("failed-round durations agree with the analytic expectation") {
    IntercityScenario scn = toy(0.3, 0.25, 3, 4, 2, 6, 90.0);
    double expect = expected_z_fail(scn);
    Rng rng(31415);
    const int n = 1000000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        RoundOutcome r = sample_round(rng, scn);
        double v = r.y ? 0.0 : static_cast<double>(r.z_us);
        acc += v;
        acc2 += v * v;
    }
    double mean = acc / n;
    double var = acc2 / n - mean * mean;
    double sigma = std::sqrt(var / n);
    CHECK(std::abs(mean - expect) < 3.0 * sigma);
}

TEST_CASE("per-round Werner parameter: sequential swaps equal the one-shot form") {
    IntercityScenario scn = toy(0.4, 0.3, 3, 5, 2, 7, 120.0);
    double k = scn.k();
    Rng rng(5);
    int successes = 0;
    while (successes < 20000) {
        RoundOutcome r = sample_round(rng, scn);
        if (!r.y) continue;
        ++successes;
        // Swap-as-soon-as-possible, link by link: each border swaps once both
        // adjacent links exist; composites decay at the pair rate k.
        long long tb1 = std::max(r.x1, r.xb);
        long long tb2 = std::max(r.x2, r.xb);
        long long tf = std::min(tb1, tb2);
        long long ts = std::max(tb1, tb2);
        long long first_metro = (tb1 <= tb2) ? r.x1 : r.x2;
        long long second_metro = (tb1 <= tb2) ? r.x2 : r.x1;
        double expo = static_cast<double>((tf - first_metro) + (tf - r.xb) + (ts - tf) +
                                          (ts - second_metro) + scn.t_msg);
        double w_row = scn.w_m * scn.w_m * scn.w_b * std::exp(-k * expo);
        CHECK(w_row == doctest::Approx(r.w_e2e).epsilon(1e-12));
    }
}

TEST_CASE("batch estimator converges to the analytic QR fidelity") {
    IntercityScenario scn = toy(0.45, 0.35, 2, 3, 1, 5, 300.0);
    double expect = intercity_fidelity_qr(scn);
    Rng rng(77);
    const int n = 1000000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = simulate_run(rng, scn, Mode::QR).fidelity;
        acc += f;
        acc2 += f * f;
    }
    double mean = acc / n;
    double sigma = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - expect) < 3.0 * sigma);

    double expect_time = expected_e2e_time(scn);
    Rng rng2(78);
    acc = acc2 = 0.0;
    for (int i = 0; i < n / 10; ++i) {
        double t = simulate_run(rng2, scn, Mode::ER).e2e_us;
        acc += t;
        acc2 += t * t;
    }
    mean = acc / (n / 10);
    sigma = std::sqrt((acc2 / (n / 10) - mean * mean) / (n / 10));
    CHECK(std::abs(mean - expect_time) < 3.0 * sigma);
}

TEST_CASE("a corrupted coherence time falls outside the band") {
    // Analytic prediction evaluated with a deliberately different t_coh must
    // leave the Monte Carlo percentile band of the true scenario.
    IntercityScenario scn = toy(0.45, 0.35, 2, 3, 1, 5, 40.0);
    McConfig cfg;
    cfg.scenario = scn;
    cfg.mode = Mode::QR;
    cfg.batches = 100;
    cfg.runs_per_batch = 100;
    cfg.master_seed = 314;
    McStats st = run_batches(cfg);

    IntercityScenario corrupted = scn;
    corrupted.t_coh_us = 400.0;
    double wrong = intercity_fidelity_qr(corrupted);
    CHECK((wrong < st.fid_p5 || wrong > st.fid_p95));

    double right = intercity_fidelity_qr(scn);
    CHECK(right >= st.fid_p5);
    CHECK(right <= st.fid_p95);
}

TEST_CASE("metro batches bracket the analytic values") {
    Preset base = load_preset("baseline");
    for (double pm0 : {1e-3, 1e-2, 0.1}) {
        HardwareParams hw = base.hw;
        hw.p_m0 = pm0;
        MetroScenario scn = make_metro_scenario(hw, base.geometry);
        McConfig cfg;
        cfg.scenario = scn;
        cfg.mode = Mode::QR;
        cfg.batches = 100;
        cfg.runs_per_batch = 100;
        cfg.master_seed = 1000 + static_cast<std::uint64_t>(pm0 * 1e4);
        McStats st = run_batches(cfg);
        double fid = metro_fidelity_qr(scn);
        double rate = metro_rate(scn);
        CHECK(fid >= st.fid_p5);
        CHECK(fid <= st.fid_p95);
        CHECK(rate >= st.rate_p5);
        CHECK(rate <= st.rate_p95);
    }
}

TEST_CASE("density-matrix teleportation oracle") {
    // Perfect resources teleport perfectly; a maximally mixed resource
    // teleports nothing.
    CHECK(dm_teleport_oracle(1.0, 1.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dm_teleport_oracle(0.0, 0.7, 3.0, 10.0) == doctest::Approx(0.5).epsilon(1e-13));

    double f = dm_teleport_oracle(0.7, 0.9, 1.0, 10.0);
    CHECK(f == doctest::Approx(0.5 * (1.0 + 0.7 * 0.9 * std::exp(-0.1))).epsilon(1e-12));

    Rng rng(99);
    for (int i = 0; i < 120; ++i) {
        double w = rng.unit_open();
        double pd = rng.unit_open();
        double t = rng.unit_open() * 5.0;
        double tcoh = 0.5 + rng.unit_open() * 10.0;
        double theta = rng.unit_open() * 3.141592653589793;
        double phi = rng.unit_open() * 6.283185307179586;
        std::complex<double> a0{std::cos(theta / 2.0), 0.0};
        std::complex<double> a1{std::sin(theta / 2.0) * std::cos(phi),
                                std::sin(theta / 2.0) * std::sin(phi)};
        double terr = 0.0;
        double got = dm_teleport_fidelity(w, pd, t, tcoh, a0, a1, &terr);
        double want = 0.5 * (1.0 + w * pd * std::exp(-t / tcoh));
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(terr < 1e-12);
    }

    // State independence across a batch of random inputs.
    CHECK_NOTHROW(dm_teleport_oracle(0.42, 0.77, 2.5, 7.0, 25, 4321));
}
