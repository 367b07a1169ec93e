#pragma once

#include "qnet/params.hpp"

namespace qnet {

// Teleportation between two end nodes attached to the same hub. No cut-off
// applies: there is a single link to generate.
struct MetroScenario {
    double p_mprime = 0.0;   // end-to-end attempt success probability
    double w_mprime = 0.0;   // fresh link Werner parameter
    long long t_m_class = 0; // one-way end node <-> hub, us
    long long t_mprime = 0;  // attempt cycle, us
    double t_coh_us = 0.0;
};

MetroScenario make_metro_scenario(const HardwareParams& hw, const Geometry& geometry);

// Teleportation rate in 1/s; identical for ER and QR.
double metro_rate(const MetroScenario& scn);

double metro_fidelity_er(const MetroScenario& scn);
double metro_fidelity_qr(const MetroScenario& scn);
double metro_fidelity(const MetroScenario& scn, Mode mode);

} // namespace qnet
