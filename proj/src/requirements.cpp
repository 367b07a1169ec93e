#include "qnet/requirements.hpp"

#include <algorithm>
#include <cmath>

#include "qnet/mc.hpp"
#include "qnet/parallel.hpp"

namespace qnet {

CutoffDomain cut_off_domain(const Timing& timing, double t_coh_us) {
    CutoffDomain d;
    long long hundredth = static_cast<long long>(std::ceil(0.01 * t_coh_us));
    d.lower = std::max({timing.t_m, timing.t_b, timing.t_msg, hundredth});
    d.upper = static_cast<long long>(std::floor(t_coh_us));
    if (d.upper <= d.lower)
        throw EmptyCutoffDomain("coherence time admits no valid cut-off");
    return d;
}

namespace {

double fidelity_at(const HardwareParams& hw, const Geometry& g, ScenarioKind kind,
                   long long t_cut) {
    IntercityScenario scn = make_intercity_scenario(hw, g, t_cut);
    return intercity_fidelity(scn, mode_of(kind));
}

std::vector<long long> log_grid(long long lo, long long hi, int n) {
    std::vector<long long> pts;
    pts.reserve(static_cast<std::size_t>(n));
    if (lo >= hi) return {lo};
    double ratio = static_cast<double>(hi) / static_cast<double>(lo);
    for (int i = 0; i < n; ++i) {
        double f = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
        long long t = static_cast<long long>(std::llround(static_cast<double>(lo) * std::pow(ratio, f)));
        t = std::clamp(t, lo, hi);
        if (pts.empty() || pts.back() != t) pts.push_back(t);
    }
    return pts;
}

// Ternary search for a (practically unimodal) maximum on [lo, hi]. The
// bracket is narrowed to a 1/4096th of its width (at least to integer
// resolution), far below any fidelity variation that matters.
long long refine_peak(const HardwareParams& hw, const Geometry& g, ScenarioKind kind, long long lo,
                      long long hi, double& best_val) {
    const long long tol = std::max<long long>(2, (hi - lo) / 4096);
    while (hi - lo > tol) {
        long long m1 = lo + (hi - lo) / 3;
        long long m2 = hi - (hi - lo) / 3;
        if (fidelity_at(hw, g, kind, m1) < fidelity_at(hw, g, kind, m2))
            lo = m1 + 1;
        else
            hi = m2 - 1;
    }
    long long best_t = lo;
    best_val = fidelity_at(hw, g, kind, lo);
    for (long long t : {lo + (hi - lo) / 2, hi}) {
        if (t <= lo) continue;
        double v = fidelity_at(hw, g, kind, t);
        if (v > best_val) {
            best_val = v;
            best_t = t;
        }
    }
    return best_t;
}

} // namespace

PerfPoint evaluate_point(const HardwareParams& hw, const Geometry& g, ScenarioKind kind,
                         std::optional<long long> t_cut) {
    PerfPoint out;
    if (is_metro(kind)) {
        MetroScenario scn = make_metro_scenario(hw, g);
        out.fidelity = metro_fidelity(scn, mode_of(kind));
        out.rate = metro_rate(scn);
        out.success_prob = 1.0;
        return out;
    }
    long long t = t_cut ? *t_cut : best_over_tcut(hw, g, kind).t_cut.value();
    IntercityScenario scn = make_intercity_scenario(hw, g, t);
    out.fidelity = intercity_fidelity(scn, mode_of(kind));
    out.rate = intercity_rate(scn);
    out.success_prob = success_probability(scn);
    out.t_cut = t;
    return out;
}

BestFidelity best_over_tcut(const HardwareParams& hw, const Geometry& g, ScenarioKind kind,
                            int qr_grid) {
    BestFidelity out;
    if (is_metro(kind)) {
        out.fidelity = metro_fidelity(make_metro_scenario(hw, g), mode_of(kind));
        return out;
    }
    CutoffDomain dom = cut_off_domain(derive_timing(g), hw.t_coh_s * 1e6);
    if (mode_of(kind) == Mode::ER) {
        out.t_cut = dom.first();
        out.fidelity = fidelity_at(hw, g, kind, dom.first());
        return out;
    }
    std::vector<long long> grid = log_grid(dom.first(), dom.upper, qr_grid);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = fidelity_at(hw, g, kind, grid[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    long long lo = best > 0 ? grid[best - 1] : grid[best];
    long long hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
    double refined = best_val;
    long long t = refine_peak(hw, g, kind, lo, hi, refined);
    if (refined >= best_val) {
        out.fidelity = refined;
        out.t_cut = t;
    } else {
        out.fidelity = best_val;
        out.t_cut = grid[best];
    }
    return out;
}

RateAtTarget max_rate_at_target(const HardwareParams& hw, const Geometry& g, ScenarioKind kind,
                                double f_target, int qr_grid) {
    RateAtTarget out;
    if (is_metro(kind)) {
        MetroScenario scn = make_metro_scenario(hw, g);
        out.fidelity = metro_fidelity(scn, mode_of(kind));
        if (out.fidelity < f_target) throw Infeasible("target fidelity unreachable");
        out.rate = metro_rate(scn);
        return out;
    }
    CutoffDomain dom = cut_off_domain(derive_timing(g), hw.t_coh_s * 1e6);
    long long lo;
    if (mode_of(kind) == Mode::ER) {
        lo = dom.first();
        if (fidelity_at(hw, g, kind, lo) < f_target)
            throw Infeasible("target fidelity unreachable");
    } else {
        BestFidelity best = best_over_tcut(hw, g, kind, qr_grid);
        if (best.fidelity < f_target) throw Infeasible("target fidelity unreachable");
        lo = *best.t_cut;
    }
    // Largest feasible cut-off: the fidelity is nonincreasing beyond lo.
    long long hi = dom.upper;
    if (fidelity_at(hw, g, kind, hi) >= f_target) {
        lo = hi;
    } else {
        while (hi - lo > 1) {
            long long mid = lo + (hi - lo) / 2;
            if (fidelity_at(hw, g, kind, mid) >= f_target)
                lo = mid;
            else
                hi = mid;
        }
    }
    IntercityScenario scn = make_intercity_scenario(hw, g, lo);
    out.rate = intercity_rate(scn);
    out.fidelity = intercity_fidelity(scn, mode_of(kind));
    out.t_cut = lo;
    return out;
}

double scalarized_cost(const HardwareParams& point, const OptimProblem& problem, double fidelity) {
    double h = hardware_cost(point, problem.baseline, problem.free_params);
    double cost = problem.omega2 * h;
    if (fidelity < problem.f_target) {
        double deficit = problem.f_target - fidelity;
        cost += problem.omega1 * (1.0 + deficit * deficit);
    }
    return cost;
}

namespace {

struct Candidate {
    HardwareParams point;
    double cost = 0.0;
    double fidelity = 0.0;
    bool valid = false;
};

// Deterministic preference: lower cost, then parameters closest to the
// baseline in lexicographic order.
bool better(const Candidate& a, const Candidate& b) {
    if (!b.valid) return a.valid;
    if (!a.valid) return false;
    if (a.cost != b.cost) return a.cost < b.cost;
    for (int k = 0; k < kNumParamKinds; ++k) {
        double av = get_param(a.point, static_cast<ParamKind>(k));
        double bv = get_param(b.point, static_cast<ParamKind>(k));
        if (av != bv) return av < bv;
    }
    return false;
}

} // namespace

OptimResult optimize(const OptimProblem& problem) {
    const auto& free = problem.free_params;
    const std::size_t m = free.size();

    std::vector<double> z_lo(m), z_hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        z_lo[i] = p_ni(free[i], get_param(problem.baseline, free[i]));
        z_hi[i] = p_ni(free[i], get_param(problem.optimistic, free[i]));
    }

    auto assemble = [&](const std::vector<double>& z) {
        HardwareParams hw = problem.fixed;
        for (std::size_t i = 0; i < m; ++i) set_param(hw, free[i], p_ni_inverse(free[i], z[i]));
        return hw;
    };
    auto evaluate = [&](const std::vector<double>& z) {
        Candidate c;
        c.point = assemble(z);
        c.fidelity = best_over_tcut(c.point, problem.geometry, problem.kind, problem.qr_grid).fidelity;
        c.cost = scalarized_cost(c.point, problem, c.fidelity);
        c.valid = true;
        return c;
    };

    auto finish = [&](const Candidate& c) {
        OptimResult res;
        res.point = c.point;
        res.fidelity = c.fidelity;
        res.feasible = c.fidelity >= problem.f_target;
        res.cost_h = hardware_cost(c.point, problem.baseline, free);
        for (ParamKind k : free)
            res.per_param_if[k] =
                improvement_factor(k, get_param(c.point, k), get_param(problem.baseline, k));
        if (is_metro(problem.kind)) {
            res.rate = metro_rate(make_metro_scenario(c.point, problem.geometry));
        } else if (res.feasible) {
            RateAtTarget r = max_rate_at_target(c.point, problem.geometry, problem.kind,
                                                problem.f_target, problem.qr_grid);
            res.rate = r.rate;
            res.t_cut_star = r.t_cut;
        } else {
            BestFidelity best = best_over_tcut(c.point, problem.geometry, problem.kind,
                                               problem.qr_grid);
            res.t_cut_star = best.t_cut;
            if (best.t_cut)
                res.rate = intercity_rate(
                    make_intercity_scenario(c.point, problem.geometry, *best.t_cut));
        }
        return res;
    };

    // The baseline is the box minimum of the cost; if it already meets the
    // target nothing can beat it.
    {
        std::vector<double> z = z_lo;
        Candidate base = evaluate(z);
        if (base.fidelity >= problem.f_target) return finish(base);
    }

    std::vector<Candidate> results(static_cast<std::size_t>(problem.restarts));
    parallel_for(problem.restarts, [&](long long r) {
        Rng rng(derive_seed(problem.seed, static_cast<std::uint64_t>(r)));
        std::vector<double> z(m), step(m);
        for (std::size_t i = 0; i < m; ++i) {
            z[i] = z_lo[i] + (z_hi[i] - z_lo[i]) * rng.unit_open();
            step[i] = 0.25 * (z_hi[i] - z_lo[i]);
        }
        Candidate cur = evaluate(z);
        for (int sweep = 0; sweep < problem.max_sweeps; ++sweep) {
            bool moved = false;
            for (std::size_t i = 0; i < m; ++i) {
                for (double dir : {+1.0, -1.0}) {
                    double zi = std::clamp(z[i] + dir * step[i], z_lo[i], z_hi[i]);
                    if (zi == z[i]) continue;
                    double old = z[i];
                    z[i] = zi;
                    Candidate trial = evaluate(z);
                    if (trial.cost < cur.cost) {
                        cur = trial;
                        moved = true;
                        break;
                    }
                    z[i] = old;
                }
            }
            if (!moved) {
                bool done = true;
                for (std::size_t i = 0; i < m; ++i) {
                    step[i] *= 0.5;
                    if (step[i] > 1e-5 * (z_hi[i] - z_lo[i])) done = false;
                }
                if (done) break;
            }
        }
        results[static_cast<std::size_t>(r)] = cur;
    });

    Candidate best;
    for (const Candidate& c : results)
        if (better(c, best)) best = c;
    return finish(best);
}

OptimProblem make_problem(Question q, Mode mode, int restarts, std::uint64_t seed) {
    Preset base = load_preset("baseline");
    Preset opt = load_preset("optimistic");
    OptimProblem p;
    p.geometry = base.geometry;
    p.baseline = base.hw;
    p.optimistic = opt.hw;
    p.restarts = restarts;
    p.seed = seed;
    switch (q) {
        case Question::Q1:
            p.kind = mode == Mode::ER ? ScenarioKind::MetroER : ScenarioKind::MetroQR;
            p.fixed = base.hw;
            p.free_params = {ParamKind::BaseEfficiency, ParamKind::CoherenceTime,
                             ParamKind::MetroFidelity};
            break;
        case Question::Q2:
            p.kind = mode == Mode::ER ? ScenarioKind::IntercityER : ScenarioKind::IntercityQR;
            p.fixed = base.hw;
            p.fixed.p_b = opt.hw.p_b;
            p.fixed.f_b = opt.hw.f_b;
            p.free_params = {ParamKind::BaseEfficiency, ParamKind::CoherenceTime,
                             ParamKind::MetroFidelity};
            break;
        case Question::Q3:
            p.kind = mode == Mode::ER ? ScenarioKind::IntercityER : ScenarioKind::IntercityQR;
            p.fixed = opt.hw;
            p.fixed.p_b = base.hw.p_b;
            p.fixed.f_b = base.hw.f_b;
            p.free_params = {ParamKind::BackboneProb, ParamKind::BackboneFidelity};
            break;
        case Question::Q4:
            p.kind = mode == Mode::ER ? ScenarioKind::IntercityER : ScenarioKind::IntercityQR;
            p.fixed = base.hw;
            p.free_params = {ParamKind::BaseEfficiency, ParamKind::CoherenceTime,
                             ParamKind::MetroFidelity, ParamKind::BackboneProb,
                             ParamKind::BackboneFidelity};
            break;
    }
    return p;
}

std::vector<SurfaceRow> min_fidelity_surface(const std::vector<double>& pm0_grid,
                                             const std::vector<double>& tcoh_grid,
                                             const HardwareParams& fixed, const Geometry& geometry,
                                             ScenarioKind kind, double f_target, double f_tol,
                                             int qr_grid) {
    std::vector<SurfaceRow> rows(pm0_grid.size() * tcoh_grid.size());
    parallel_for(static_cast<long long>(rows.size()), [&](long long idx) {
        SurfaceRow& row = rows[static_cast<std::size_t>(idx)];
        row.p_m0 = pm0_grid[static_cast<std::size_t>(idx) / tcoh_grid.size()];
        row.t_coh_s = tcoh_grid[static_cast<std::size_t>(idx) % tcoh_grid.size()];
        HardwareParams hw = fixed;
        hw.p_m0 = row.p_m0;
        hw.t_coh_s = row.t_coh_s;

        double f_hi = fixed.f_link_metro;
        auto feasible_at = [&](double f) {
            hw.f_link_metro = f;
            try {
                return best_over_tcut(hw, geometry, kind, qr_grid).fidelity >= f_target;
            } catch (const EmptyCutoffDomain&) {
                return false;
            }
        };
        if (!feasible_at(f_hi)) {
            row.feasible = false;
            return;
        }
        double lo = 0.25 + 1e-9, hi = f_hi;
        if (feasible_at(lo)) {
            hi = lo;
        } else {
            while (hi - lo > f_tol) {
                double mid = 0.5 * (lo + hi);
                if (feasible_at(mid))
                    hi = mid;
                else
                    lo = mid;
            }
        }
        row.feasible = true;
        row.f_min = hi;
        hw.f_link_metro = hi;
        if (is_metro(kind)) {
            row.rate = metro_rate(make_metro_scenario(hw, geometry));
        } else {
            try {
                row.rate = max_rate_at_target(hw, geometry, kind, f_target, qr_grid).rate;
            } catch (const Infeasible&) {
                // Bisection tolerance can leave the endpoint marginally short.
                row.rate = 0.0;
            }
        }
    });
    return rows;
}

std::vector<RegionRow> feasibility_region(const std::vector<double>& pb_grid,
                                          const std::vector<double>& fb_grid,
                                          const HardwareParams& fixed, const Geometry& geometry,
                                          ScenarioKind kind, double f_target, int qr_grid) {
    std::vector<RegionRow> rows(pb_grid.size() * fb_grid.size());
    parallel_for(static_cast<long long>(rows.size()), [&](long long idx) {
        RegionRow& row = rows[static_cast<std::size_t>(idx)];
        row.p_b = pb_grid[static_cast<std::size_t>(idx) / fb_grid.size()];
        row.f_b = fb_grid[static_cast<std::size_t>(idx) % fb_grid.size()];
        HardwareParams hw = fixed;
        hw.p_b = row.p_b;
        hw.f_b = row.f_b;
        try {
            RateAtTarget r = max_rate_at_target(hw, geometry, kind, f_target, qr_grid);
            row.feasible = true;
            row.max_rate = r.rate;
        } catch (const Infeasible&) {
            row.feasible = false;
        } catch (const EmptyCutoffDomain&) {
            row.feasible = false;
        }
    });
    return rows;
}

} // namespace qnet
