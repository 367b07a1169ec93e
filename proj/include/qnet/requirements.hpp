#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qnet/intercity.hpp"
#include "qnet/metro.hpp"

namespace qnet {

enum class ScenarioKind { MetroER, MetroQR, IntercityER, IntercityQR };

inline bool is_metro(ScenarioKind k) {
    return k == ScenarioKind::MetroER || k == ScenarioKind::MetroQR;
}
inline Mode mode_of(ScenarioKind k) {
    return (k == ScenarioKind::MetroER || k == ScenarioKind::IntercityER) ? Mode::ER : Mode::QR;
}

// Valid cut-offs are the integers in [lower+1, upper].
struct CutoffDomain {
    long long lower = 0;
    long long upper = 0;
    long long first() const { return lower + 1; }
    long long size() const { return upper - lower; }
};

CutoffDomain cut_off_domain(const Timing& timing, double t_coh_us);

struct PerfPoint {
    double fidelity = 0.0;
    double rate = 0.0;
    double success_prob = 0.0;           // 1 for the metro single link
    std::optional<long long> t_cut;      // absent for metro scenarios
};

PerfPoint evaluate_point(const HardwareParams& hw, const Geometry& geometry, ScenarioKind kind,
                         std::optional<long long> t_cut);

struct BestFidelity {
    double fidelity = 0.0;
    std::optional<long long> t_cut;
};

// max over the cut-off domain of the expected fidelity. ER fidelity is
// nonincreasing in t_cut, so its maximum sits at the domain start; QR is
// scanned on a log grid and refined to the integer maximizer.
BestFidelity best_over_tcut(const HardwareParams& hw, const Geometry& geometry, ScenarioKind kind,
                            int qr_grid = 64);

struct RateAtTarget {
    double rate = 0.0;
    double fidelity = 0.0;
    std::optional<long long> t_cut;
};

// Rate at the largest cut-off still meeting the fidelity target (the rate is
// nondecreasing in t_cut). Throws Infeasible when no cut-off qualifies.
RateAtTarget max_rate_at_target(const HardwareParams& hw, const Geometry& geometry,
                                ScenarioKind kind, double f_target, int qr_grid = 64);

struct OptimProblem {
    ScenarioKind kind = ScenarioKind::MetroQR;
    Geometry geometry;
    HardwareParams fixed;     // values used for parameters not being optimized
    std::vector<ParamKind> free_params;
    HardwareParams baseline;  // box lower corner (and cost reference)
    HardwareParams optimistic; // box upper corner
    double f_target = 2.0 / 3.0;
    double omega1 = 1e100;
    double omega2 = 1.0;
    int restarts = 50;
    int max_sweeps = 40;
    int qr_grid = 64;
    std::uint64_t seed = 1;
};

struct OptimResult {
    HardwareParams point;
    std::optional<long long> t_cut_star;
    double fidelity = 0.0;
    double rate = 0.0;
    double cost_h = 0.0;
    std::map<ParamKind, double> per_param_if;
    bool feasible = false;
};

double scalarized_cost(const HardwareParams& point, const OptimProblem& problem, double fidelity);

// Multi-start coordinate pattern search in no-imperfection coordinates, with
// the cut-off maximized out at every evaluation. Deterministic for a fixed
// seed; if the baseline already meets the target it is returned as-is.
OptimResult optimize(const OptimProblem& problem);

enum class Question { Q1, Q2, Q3, Q4 };

OptimProblem make_problem(Question q, Mode mode, int restarts = 50, std::uint64_t seed = 1);

struct SurfaceRow {
    double p_m0 = 0.0;
    double t_coh_s = 0.0;
    bool feasible = false;
    double f_min = 0.0;
    double rate = 0.0;
};

// Minimal link fidelity meeting the target per (p_m0, t_coh) cell, plus the
// best rate at that fidelity. `fixed` supplies the backbone values for
// intercity kinds.
std::vector<SurfaceRow> min_fidelity_surface(const std::vector<double>& pm0_grid,
                                             const std::vector<double>& tcoh_grid,
                                             const HardwareParams& fixed, const Geometry& geometry,
                                             ScenarioKind kind, double f_target = 2.0 / 3.0,
                                             double f_tol = 1e-9, int qr_grid = 64);

struct RegionRow {
    double p_b = 0.0;
    double f_b = 0.0;
    bool feasible = false;
    double max_rate = 0.0;
};

// Feasibility and best rate over a (p_b, f_b) grid; `fixed` supplies the
// metro parameters.
std::vector<RegionRow> feasibility_region(const std::vector<double>& pb_grid,
                                          const std::vector<double>& fb_grid,
                                          const HardwareParams& fixed, const Geometry& geometry,
                                          ScenarioKind kind, double f_target = 2.0 / 3.0,
                                          int qr_grid = 64);

} // namespace qnet
