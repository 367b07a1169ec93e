#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "qnet/params.hpp"

using namespace qnet;

TEST_CASE("derive_timing reproduces the reference geometry") {
    Geometry g;
    Timing t = derive_timing(g);
    CHECK(t.t_m_class == 125);
    CHECK(t.t_b_class == 2250);
    CHECK(t.t_m == 425);
    CHECK(t.t_mprime == 425);
    CHECK(t.t_b == 2425);
    CHECK(t.t_msg == 2375);
    CHECK(t.t_int_class == 2500);
    CHECK(t.m_star == 97);

    // Deterministic: recomputation yields identical integers.
    Timing t2 = derive_timing(g);
    CHECK(t.t_m == t2.t_m);
    CHECK(t.m_star == t2.m_star);
}

TEST_CASE("derive_timing rejects off-grid distances") {
    Geometry g;
    g.d_metro_km = 25.0001;
    CHECK_THROWS_AS(derive_timing(g), NonIntegerSlot);
}

TEST_CASE("link_success_probs") {
    Geometry g;
    auto lp = link_success_probs(5.95e-4, g);
    CHECK(lp.p_mprime == doctest::Approx(5.95e-5).epsilon(1e-12));
    CHECK(lp.p_m == doctest::Approx(5.95e-4 * std::pow(10.0, -0.5)).epsilon(1e-12));

    Geometry lossless = g;
    lossless.alpha_per_km = 0.0;
    auto lp0 = link_success_probs(0.3, lossless);
    CHECK(lp0.p_mprime == doctest::Approx(0.3));
    CHECK(lp0.p_m == doctest::Approx(0.3));
}

TEST_CASE("base efficiency reproduces the tabulated values") {
    Preset base = load_preset("baseline");
    Preset opt = load_preset("optimistic");
    CHECK(base_efficiency(base.ion) == doctest::Approx(5.95e-4).epsilon(5e-3));
    CHECK(base_efficiency(opt.ion) == doctest::Approx(1.43e-2).epsilon(5e-3));
    IonExperimentParams perfect{1, 1, 1, 1, 1, 0};
    CHECK(base_efficiency(perfect) == doctest::Approx(0.5));
}

TEST_CASE("werner conversions") {
    CHECK(werner_from_fidelity(1.0) == doctest::Approx(1.0));
    CHECK(werner_from_fidelity(0.25) == doctest::Approx(0.0));
    CHECK(werner_from_fidelity(0.88) == doctest::Approx(0.84));
    CHECK_THROWS_AS(werner_from_fidelity(0.2), OutOfRange);
    CHECK_THROWS_AS(fidelity_from_werner(1.5), OutOfRange);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> f(0.25, 1.0);
    for (int i = 0; i < 200; ++i) {
        double fi = f(rng);
        CHECK(fidelity_from_werner(werner_from_fidelity(fi)) == doctest::Approx(fi).epsilon(1e-14));
    }
}

TEST_CASE("p_ni mapping and monotonicity") {
    CHECK(p_ni(ParamKind::MetroFidelity, 0.88) == doctest::Approx(0.84));
    CHECK(p_ni(ParamKind::CoherenceTime, 0.062) == doctest::Approx(std::exp(-1.0 / 0.062)));
    CHECK(p_ni(ParamKind::BaseEfficiency, 0.123) == doctest::Approx(0.123));
    CHECK(p_ni(ParamKind::BackboneProb, 0.321) == doctest::Approx(0.321));

    std::mt19937_64 rng(4);
    for (ParamKind k : {ParamKind::BaseEfficiency, ParamKind::CoherenceTime,
                        ParamKind::MetroFidelity, ParamKind::BackboneProb,
                        ParamKind::BackboneFidelity}) {
        std::uniform_real_distribution<double> dom(
            k == ParamKind::MetroFidelity || k == ParamKind::BackboneFidelity ? 0.26 : 1e-3,
            k == ParamKind::CoherenceTime ? 10.0 : 0.999);
        for (int i = 0; i < 100; ++i) {
            double x = dom(rng), y = dom(rng);
            if (x > y) std::swap(x, y);
            if (x == y) continue;
            CHECK(p_ni(k, x) < p_ni(k, y));
        }
        // Round trip through the inverse.
        for (int i = 0; i < 50; ++i) {
            double x = dom(rng);
            CHECK(p_ni_inverse(k, p_ni(k, x)) == doctest::Approx(x).epsilon(1e-10));
        }
    }
}

TEST_CASE("improvement factors") {
    CHECK(improvement_factor(ParamKind::BaseEfficiency, 0.37, 0.37) == doctest::Approx(1.0));
    // Coherence-time improvement reduces to the plain ratio.
    CHECK(improvement_factor(ParamKind::CoherenceTime, 0.196, 0.062) ==
          doctest::Approx(0.196 / 0.062).epsilon(1e-12));
    CHECK(improvement_factor(ParamKind::MetroFidelity, 0.95, 0.88) ==
          doctest::Approx(std::log(0.84) / std::log((4.0 * 0.95 - 1.0) / 3.0)).epsilon(1e-12));
    CHECK(improvement_factor(ParamKind::BackboneProb, 4.18e-3, 1.51e-6) ==
          doctest::Approx(std::log(1.51e-6) / std::log(4.18e-3)).epsilon(1e-12));
    CHECK_THROWS_AS(improvement_factor(ParamKind::MetroFidelity, 1.0, 0.88), DegenerateLog);

    // IF >= 1 whenever value >= baseline, equality only at the baseline.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> f(0.3, 0.99);
    for (int i = 0; i < 200; ++i) {
        double lo = f(rng), hi = f(rng);
        if (lo > hi) std::swap(lo, hi);
        double v = improvement_factor(ParamKind::MetroFidelity, hi, lo);
        CHECK(v >= 1.0 - 1e-12);
        if (hi > lo + 1e-9) CHECK(v > 1.0);
    }
}

TEST_CASE("hardware cost sums improvement factors") {
    Preset base = load_preset("baseline");
    std::vector<ParamKind> metro{ParamKind::BaseEfficiency, ParamKind::CoherenceTime,
                                 ParamKind::MetroFidelity};
    CHECK(hardware_cost(base.hw, base.hw, metro) == doctest::Approx(3.0));

    HardwareParams pt = base.hw;
    pt.p_m0 = 1.43e-2;
    pt.t_coh_s = 0.196;
    double h = hardware_cost(pt, base.hw, metro);
    double expect = improvement_factor(ParamKind::BaseEfficiency, 1.43e-2, 5.95e-4) +
                    0.196 / 0.062 + 1.0;
    CHECK(h == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("presets carry the tabulated values") {
    Preset base = load_preset("baseline");
    CHECK(base.hw.p_m0 == doctest::Approx(5.95e-4));
    CHECK(base.hw.t_coh_s == doctest::Approx(0.062));
    CHECK(base.hw.f_link_metro == doctest::Approx(0.88));
    CHECK(base.hw.p_b == doctest::Approx(1.51e-6));
    CHECK(base.hw.f_b == doctest::Approx(0.60));
    Preset opt = load_preset("optimistic");
    CHECK(opt.hw.p_m0 == doctest::Approx(1.43e-2));
    CHECK(opt.hw.t_coh_s == doctest::Approx(4.0));
    CHECK(opt.hw.f_link_metro == doctest::Approx(0.95));
    CHECK(opt.hw.p_b == doctest::Approx(4.18e-3));
    CHECK(opt.hw.f_b == doctest::Approx(0.90));
    CHECK(base.geometry.d_metro_km == doctest::Approx(25.0));
    CHECK(base.geometry.d_backbone_km == doctest::Approx(450.0));
    CHECK(base.geometry.t_prep_us == 175);
    CHECK_THROWS_AS(load_preset("nope"), UnknownPreset);
}

TEST_CASE("config file round trip") {
    Preset opt = load_preset("optimistic");
    std::string path = "qnet_test_config.json";
    {
        std::ofstream out(path);
        out << config_to_json(opt);
    }
    Preset back = load_config_file(path, "baseline");
    CHECK(back.hw.p_m0 == doctest::Approx(opt.hw.p_m0));
    CHECK(back.hw.t_coh_s == doctest::Approx(opt.hw.t_coh_s));
    CHECK(back.hw.f_link_metro == doctest::Approx(opt.hw.f_link_metro));
    CHECK(back.hw.p_b == doctest::Approx(opt.hw.p_b));
    CHECK(back.hw.f_b == doctest::Approx(opt.hw.f_b));
    CHECK(back.geometry.t_prep_us == opt.geometry.t_prep_us);
    std::remove(path.c_str());
}
