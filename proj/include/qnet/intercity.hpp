#pragma once

#include "qnet/params.hpp"

namespace qnet {

// One end-to-end generation round across the chain: two end<->border links
// (attempt cycle t_m, success probability p_m each) plus the backbone link
// (cycle t_b, probability p_b), under a global cut-off t_cut.
struct IntercityScenario {
    double p_m = 0.0;
    double p_b = 0.0;
    long long t_m = 0;
    long long t_b = 0;
    long long t_msg = 0;
    long long t_int_class = 0;
    double t_coh_us = 0.0;
    double w_m = 0.0;
    double w_b = 0.0;
    long long t_cut = 0;

    double k() const { return 2.0 / t_coh_us; }
    void validate() const;
};

IntercityScenario make_intercity_scenario(const HardwareParams& hw, const Geometry& geometry,
                                          long long t_cut);

// Expectations of one payoff functional restricted to each event of a
// successful round. The events classify which link finished last (and, for
// the pair/triple events, ties).
struct SuccessTerms {
    double a1 = 0;       // link 1 last
    double ab = 0;       // backbone last
    double a1a2 = 0;     // both metro links tie for last
    double a1ab = 0;     // link 1 ties with the backbone
    double a1a2ab = 0;   // all three simultaneous
};

// Finer decomposition used for the success-conditioned exponential payoffs:
// the "link 1 last" event is split by which link finished first.
struct UPlusTerms {
    double a12 = 0;      // link 1 last, link 2 first
    double a1b = 0;      // link 1 last, backbone first
    double a12_a1b = 0;  // link 1 last, link 2 and backbone tie for first
    double ab = 0;
    double a1a2 = 0;
    double a1ab = 0;
    double a1a2ab = 0;
    double total() const { return 2.0 * (a12 + a1b - a12_a1b) + ab - a1a2 - 2.0 * a1ab + a1a2ab; }
};

// Events of a failed round, classified by (last, first) link.
struct FailureTerms {
    double a12 = 0;      // metro 1 last, metro 2 first
    double a1b = 0;      // metro 1 last, backbone first
    double ab1 = 0;      // backbone last, metro 1 first
    double a12_a1b = 0;  // metro 1 last, first-place tie
    double ab1_ab2 = 0;  // backbone last, metro tie for first
    double a1a2 = 0;     // metro links tie for last
    double a1ab = 0;     // metro 1 ties with backbone for last
    double total() const {
        return 2.0 * (a12 + a1b + ab1) - 2.0 * a12_a1b - ab1_ab2 - a1a2 - 2.0 * a1ab;
    }
};

// E(e^{-v (X_diff + (alpha-2) X_max)} 1_{Y=1}) and its per-event terms.
// alpha = 2 gives U1, alpha = 5/2 gives U2.
UPlusTerms u_alpha_terms(double v, double alpha, const IntercityScenario& scn);
double u_alpha(double v, double alpha, const IntercityScenario& scn);

// E(e^{-v X_min / 2} 1_{Y=0}) and its per-event terms.
FailureTerms u3_terms(double v, const IntercityScenario& scn);
double u3(double v, const IntercityScenario& scn);

// E(Z 1_event) for the round duration Z (X_max + t_msg on success,
// X_min + t_cut on failure).
SuccessTerms z_success_terms(const IntercityScenario& scn);
FailureTerms z_failure_terms(const IntercityScenario& scn);

double success_probability(const IntercityScenario& scn);
double expected_z_success(const IntercityScenario& scn);
double expected_z_fail(const IntercityScenario& scn);

// Expected end-to-end generation time in us and the teleportation rate in 1/s.
double expected_e2e_time(const IntercityScenario& scn);
double intercity_rate(const IntercityScenario& scn);

struct WernerExpectation {
    double w_e2e;
    double fidelity_e2e;
};
WernerExpectation e2e_werner_expectation(const IntercityScenario& scn);

double intercity_fidelity_er(const IntercityScenario& scn);
double intercity_fidelity_qr(const IntercityScenario& scn);
double intercity_fidelity(const IntercityScenario& scn, Mode mode);

} // namespace qnet
