#include "qnet/params.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace qnet {

void Geometry::validate() const {
    if (!(d_metro_km > 0) || !(d_backbone_km > 0))
        throw OutOfRange("geometry: distances must be positive");
    if (!(alpha_per_km >= 0)) throw OutOfRange("geometry: alpha must be nonnegative");
    if (!(c_km_s > 0)) throw OutOfRange("geometry: c must be positive");
    if (t_prep_us < 0) throw OutOfRange("geometry: t_prep must be nonnegative");
}

void HardwareParams::validate() const {
    if (!(p_m0 > 0.0 && p_m0 <= 1.0)) throw OutOfRange("p_m0 outside (0,1]");
    if (!(t_coh_s > 0.0)) throw OutOfRange("t_coh must be positive");
    if (!(f_link_metro > 0.25 && f_link_metro <= 1.0)) throw OutOfRange("f_m outside (1/4,1]");
    if (!(p_b > 0.0 && p_b <= 1.0)) throw OutOfRange("p_b outside (0,1]");
    if (!(f_b > 0.25 && f_b <= 1.0)) throw OutOfRange("f_b outside (1/4,1]");
}

const char* param_kind_name(ParamKind k) {
    switch (k) {
        case ParamKind::BaseEfficiency: return "p_m0";
        case ParamKind::CoherenceTime: return "t_coh_s";
        case ParamKind::MetroFidelity: return "f_m";
        case ParamKind::BackboneProb: return "p_b";
        case ParamKind::BackboneFidelity: return "f_b";
    }
    return "?";
}

namespace {

// Propagation time in integer microseconds; rejects distances that do not
// land on the slot grid.
long long propagation_us(double d_km, double c_km_s, const char* what) {
    double us = d_km / c_km_s * 1e6;
    double rounded = std::round(us);
    if (std::abs(us - rounded) > 1e-6)
        throw NonIntegerSlot(std::string(what) + " propagation time is not an integer number of us");
    return static_cast<long long>(rounded);
}

} // namespace

Timing derive_timing(const Geometry& g) {
    g.validate();
    Timing t;
    t.t_m_class = propagation_us(g.d_metro_km, g.c_km_s, "metro");
    t.t_b_class = propagation_us(g.d_backbone_km, g.c_km_s, "backbone");
    t.t_mprime = g.t_prep_us + 2 * t.t_m_class;
    t.t_m = g.t_prep_us + 2 * t.t_m_class;
    t.t_b = g.t_prep_us + t.t_b_class;
    t.t_msg = t.t_m_class + t.t_b_class;
    t.t_int_class = 2 * t.t_m_class + t.t_b_class;
    t.m_star = t.t_b / std::gcd(t.t_m, t.t_b);
    return t;
}

LinkProbs link_success_probs(double p_m0, const Geometry& g) {
    if (!(p_m0 > 0.0 && p_m0 <= 1.0)) throw OutOfRange("p_m0 outside (0,1]");
    double p_mprime = p_m0 * std::pow(10.0, -2.0 * g.alpha_per_km * g.d_metro_km / 10.0);
    double p_m = p_m0 * std::pow(10.0, -g.alpha_per_km * g.d_metro_km / 10.0);
    return {p_mprime, p_m};
}

double base_efficiency(const IonExperimentParams& ion) {
    for (double eta : {ion.eta_ion, ion.eta_det_ion_freq, ion.eta_fc, ion.eta_penalty,
                       ion.eta_det_telecom}) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw OutOfRange("ion efficiency outside [0,1]");
    }
    double once = ion.eta_ion * ion.eta_fc * ion.eta_det_telecom;
    return 0.5 * ion.eta_penalty * once * once;
}

double werner_from_fidelity(double f) {
    if (!(f >= 0.25 && f <= 1.0)) throw OutOfRange("fidelity outside [1/4,1]");
    return (4.0 * f - 1.0) / 3.0;
}

double fidelity_from_werner(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw OutOfRange("Werner parameter outside [0,1]");
    return (1.0 + 3.0 * w) / 4.0;
}

double p_ni(ParamKind kind, double value) {
    switch (kind) {
        case ParamKind::BaseEfficiency:
        case ParamKind::BackboneProb:
            if (!(value > 0.0 && value <= 1.0)) throw OutOfRange("probability outside (0,1]");
            return value;
        case ParamKind::CoherenceTime:
            if (!(value > 0.0)) throw OutOfRange("t_coh must be positive");
            return std::exp(-1.0 / value);
        case ParamKind::MetroFidelity:
        case ParamKind::BackboneFidelity:
            return werner_from_fidelity(value);
    }
    return 0.0;
}

double p_ni_inverse(ParamKind kind, double z) {
    if (!(z > 0.0 && z <= 1.0)) throw OutOfRange("p_ni outside (0,1]");
    switch (kind) {
        case ParamKind::BaseEfficiency:
        case ParamKind::BackboneProb:
            return z;
        case ParamKind::CoherenceTime:
            return -1.0 / std::log(z);
        case ParamKind::MetroFidelity:
        case ParamKind::BackboneFidelity:
            return fidelity_from_werner(z);
    }
    return 0.0;
}

double improvement_factor(ParamKind kind, double value, double baseline) {
    double zv = p_ni(kind, value);
    double zb = p_ni(kind, baseline);
    if (zv >= 1.0 || zb >= 1.0)
        throw DegenerateLog("improvement factor undefined at p_ni = 1");
    return std::log(zb) / std::log(zv);
}

double get_param(const HardwareParams& hw, ParamKind kind) {
    switch (kind) {
        case ParamKind::BaseEfficiency: return hw.p_m0;
        case ParamKind::CoherenceTime: return hw.t_coh_s;
        case ParamKind::MetroFidelity: return hw.f_link_metro;
        case ParamKind::BackboneProb: return hw.p_b;
        case ParamKind::BackboneFidelity: return hw.f_b;
    }
    return 0.0;
}

void set_param(HardwareParams& hw, ParamKind kind, double value) {
    switch (kind) {
        case ParamKind::BaseEfficiency: hw.p_m0 = value; break;
        case ParamKind::CoherenceTime: hw.t_coh_s = value; break;
        case ParamKind::MetroFidelity: hw.f_link_metro = value; break;
        case ParamKind::BackboneProb: hw.p_b = value; break;
        case ParamKind::BackboneFidelity: hw.f_b = value; break;
    }
}

double hardware_cost(const HardwareParams& point, const HardwareParams& baseline,
                     const std::vector<ParamKind>& params) {
    double h = 0.0;
    for (ParamKind k : params)
        h += improvement_factor(k, get_param(point, k), get_param(baseline, k));
    return h;
}

Preset load_preset(const std::string& name) {
    Preset p;
    p.geometry = Geometry{};
    if (name == "baseline") {
        p.hw = HardwareParams{5.95e-4, 0.062, 0.88, 1.51e-6, 0.60};
        p.ion = IonExperimentParams{0.462 / 0.87, 0.87, 0.25, 0.12, 0.75, 175.0};
    } else if (name == "optimistic") {
        p.hw = HardwareParams{1.43e-2, 4.0, 0.95, 4.18e-3, 0.90};
        p.ion = IonExperimentParams{0.5 / 0.87, 0.87, 0.70, 0.20, 0.94, 175.0};
    } else {
        throw UnknownPreset("unknown preset: " + name);
    }
    return p;
}

Preset load_config_file(const std::string& path, const std::string& fallback_preset) {
    Preset p = load_preset(fallback_preset);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    auto num = [&](const char* key, double& out) {
        if (j.contains(key)) {
            if (!j[key].is_number()) throw ConfigError(std::string("config field ") + key + " must be a number");
            out = j[key].get<double>();
        }
    };
    num("p_m0", p.hw.p_m0);
    num("t_coh_s", p.hw.t_coh_s);
    num("f_m", p.hw.f_link_metro);
    num("p_b", p.hw.p_b);
    num("f_b", p.hw.f_b);
    num("d_metro_km", p.geometry.d_metro_km);
    num("d_backbone_km", p.geometry.d_backbone_km);
    num("alpha_per_km", p.geometry.alpha_per_km);
    num("c_km_s", p.geometry.c_km_s);
    if (j.contains("t_prep_us")) p.geometry.t_prep_us = j["t_prep_us"].get<long long>();
    p.hw.validate();
    p.geometry.validate();
    return p;
}

std::string config_to_json(const Preset& p) {
    nlohmann::json j;
    j["p_m0"] = p.hw.p_m0;
    j["t_coh_s"] = p.hw.t_coh_s;
    j["f_m"] = p.hw.f_link_metro;
    j["p_b"] = p.hw.p_b;
    j["f_b"] = p.hw.f_b;
    j["d_metro_km"] = p.geometry.d_metro_km;
    j["d_backbone_km"] = p.geometry.d_backbone_km;
    j["alpha_per_km"] = p.geometry.alpha_per_km;
    j["c_km_s"] = p.geometry.c_km_s;
    j["t_prep_us"] = p.geometry.t_prep_us;
    return j.dump(2);
}

} // namespace qnet
