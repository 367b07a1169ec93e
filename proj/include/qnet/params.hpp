#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qnet/errors.hpp"

namespace qnet {

enum class Mode { ER, QR };

// Network geometry and fixed per-attempt overhead.
struct Geometry {
    double d_metro_km = 25.0;     // end node -> hub
    double d_backbone_km = 450.0; // border node -> border node
    double alpha_per_km = 0.2;    // fiber attenuation
    double c_km_s = 200000.0;     // speed of light in fiber
    long long t_prep_us = 175;    // local preparation overhead per attempt

    void validate() const;
};

// The five free hardware parameters.
struct HardwareParams {
    double p_m0 = 0.0;         // base efficiency, (0,1]
    double t_coh_s = 0.0;      // memory coherence time, seconds
    double f_link_metro = 0.0; // fresh metro link fidelity, (1/4,1]
    double p_b = 0.0;          // backbone attempt success probability, (0,1]
    double f_b = 0.0;          // fresh backbone link fidelity, (1/4,1]

    void validate() const;
};

// All derived discrete times, exact integers in microseconds.
struct Timing {
    long long t_m_class = 0; // one-way end node <-> hub
    long long t_b_class = 0; // one-way across the backbone
    long long t_mprime = 0;  // metro end-to-end attempt cycle
    long long t_m = 0;       // end node <-> border attempt cycle
    long long t_b = 0;       // backbone attempt cycle
    long long t_msg = 0;     // final-swap notification delay
    long long t_int_class = 0; // end-to-end classical delay
    long long m_star = 0;    // t_b / gcd(t_m, t_b)
};

// Trapped-ion efficiencies feeding the base-efficiency model.
struct IonExperimentParams {
    double eta_ion = 0.0;
    double eta_det_ion_freq = 0.0;
    double eta_fc = 0.0;
    double eta_penalty = 0.0;
    double eta_det_telecom = 0.0;
    double t_m_prep_us = 0.0;
};

enum class ParamKind { BaseEfficiency, CoherenceTime, MetroFidelity, BackboneProb, BackboneFidelity };

constexpr int kNumParamKinds = 5;
const char* param_kind_name(ParamKind k);

struct Preset {
    HardwareParams hw;
    Geometry geometry;
    IonExperimentParams ion;
};

Timing derive_timing(const Geometry& geometry);

// (p_mprime, p_m): attempt success probabilities for the end-to-end metro link
// and the end-to-border link, after fiber attenuation.
struct LinkProbs {
    double p_mprime;
    double p_m;
};
LinkProbs link_success_probs(double p_m0, const Geometry& geometry);

double base_efficiency(const IonExperimentParams& ion);

double werner_from_fidelity(double f);
double fidelity_from_werner(double w);

// Map a hardware parameter into its no-imperfection probability in (0,1].
double p_ni(ParamKind kind, double value);
double p_ni_inverse(ParamKind kind, double z);

double improvement_factor(ParamKind kind, double value, double baseline);

double get_param(const HardwareParams& hw, ParamKind kind);
void set_param(HardwareParams& hw, ParamKind kind, double value);

// Sum of improvement factors over the given parameters.
double hardware_cost(const HardwareParams& point, const HardwareParams& baseline,
                     const std::vector<ParamKind>& params);

Preset load_preset(const std::string& name);

// Reads hardware/geometry values from a JSON file; unspecified fields fall
// back to the given preset (baseline by default).
Preset load_config_file(const std::string& path, const std::string& fallback_preset = "baseline");
std::string config_to_json(const Preset& preset);

} // namespace qnet
