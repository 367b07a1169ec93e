#include "qnet/metro.hpp"

#include <cmath>

namespace qnet {

MetroScenario make_metro_scenario(const HardwareParams& hw, const Geometry& geometry) {
    Timing t = derive_timing(geometry);
    MetroScenario scn;
    scn.p_mprime = link_success_probs(hw.p_m0, geometry).p_mprime;
    scn.w_mprime = werner_from_fidelity(hw.f_link_metro);
    scn.t_m_class = t.t_m_class;
    scn.t_mprime = t.t_mprime;
    scn.t_coh_us = hw.t_coh_s * 1e6;
    return scn;
}

double metro_rate(const MetroScenario& scn) {
    double per_us = scn.p_mprime /
                    (2.0 * scn.p_mprime * static_cast<double>(scn.t_m_class) +
                     static_cast<double>(scn.t_mprime));
    return per_us * 1e6;
}

double metro_fidelity_er(const MetroScenario& scn) {
    return 0.5 * (1.0 + scn.w_mprime * std::exp(-static_cast<double>(scn.t_m_class) / scn.t_coh_us));
}

double metro_fidelity_qr(const MetroScenario& scn) {
    // E(e^{-X/t_coh}) for X = t_m' M', M' geometric, gives
    // p' / (e^{t_m'/t_coh} + p' - 1).
    double p = scn.p_mprime;
    double wait = p / (std::exp(static_cast<double>(scn.t_mprime) / scn.t_coh_us) + p - 1.0);
    return 0.5 + 0.5 * scn.w_mprime *
                     std::exp(-static_cast<double>(scn.t_m_class) / scn.t_coh_us) * wait;
}

double metro_fidelity(const MetroScenario& scn, Mode mode) {
    return mode == Mode::ER ? metro_fidelity_er(scn) : metro_fidelity_qr(scn);
}

} // namespace qnet
