#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnet/mc.hpp"
#include "qnet/requirements.hpp"

using namespace qnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBand = 3;
constexpr int kExitInfeasible = 4;

struct GridSpec {
    double lo = 0, hi = 0;
    int n = 0;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char c1, c2;
    std::istringstream in(s);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 1 ||
        g.lo <= 0 || g.hi < g.lo)
        throw ConfigError("bad grid spec (want lo:hi:n): " + s);
    return g;
}

std::vector<double> log_points(const GridSpec& g) {
    std::vector<double> v;
    for (int i = 0; i < g.n; ++i) {
        double f = g.n == 1 ? 0.0 : static_cast<double>(i) / (g.n - 1);
        v.push_back(g.lo * std::pow(g.hi / g.lo, f));
    }
    return v;
}

std::vector<double> lin_points(const GridSpec& g) {
    std::vector<double> v;
    for (int i = 0; i < g.n; ++i) {
        double f = g.n == 1 ? 0.0 : static_cast<double>(i) / (g.n - 1);
        v.push_back(g.lo + (g.hi - g.lo) * f);
    }
    return v;
}

struct Output {
    std::ofstream file;
    bool to_file = false;
    std::ostream& stream() { return to_file ? static_cast<std::ostream&>(file) : std::cout; }

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw ConfigError("cannot open output file: " + path);
        to_file = true;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Mode parse_mode(const std::string& m) {
    if (m == "er") return Mode::ER;
    if (m == "qr") return Mode::QR;
    throw ConfigError("mode must be er or qr");
}

ScenarioKind kind_of(bool metro, Mode mode) {
    if (metro) return mode == Mode::ER ? ScenarioKind::MetroER : ScenarioKind::MetroQR;
    return mode == Mode::ER ? ScenarioKind::IntercityER : ScenarioKind::IntercityQR;
}

nlohmann::json point_json(const HardwareParams& hw) {
    return {{"p_m0", hw.p_m0},
            {"t_coh_s", hw.t_coh_s},
            {"f_m", hw.f_link_metro},
            {"p_b", hw.p_b},
            {"f_b", hw.f_b}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic performance model and hardware-requirement solver for a "
                 "two-metro + backbone teleportation chain"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string preset = "baseline", config_path, mode_str = "qr", out_path;
    bool dump_config = false;
    app.add_option("--preset", preset, "parameter preset: baseline or optimistic");
    app.add_option("--config", config_path, "JSON file overriding preset values");
    app.add_flag("--dump-config", dump_config, "print the resolved hardware config and exit");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--mode", mode_str, "teleportation mode: er or qr");
        cmd->add_option("--out", out_path, "output file (default stdout)");
    };

    // metro / intercity: single-point evaluation
    auto* cmd_metro = app.add_subcommand("metro", "evaluate metro teleportation at a point");
    add_common(cmd_metro);

    auto* cmd_inter = app.add_subcommand("intercity", "evaluate intercity teleportation at a point");
    add_common(cmd_inter);
    long long tcut_us = 0;
    cmd_inter->add_option("--tcut-us", tcut_us, "cut-off in us (default: fidelity-maximizing)");

    // validate: analytic vs Monte Carlo bands
    auto* cmd_val = app.add_subcommand("validate", "compare analytics against Monte Carlo bands");
    add_common(cmd_val);
    std::string network = "intercity", tcut_grid_s, pm0_grid_s;
    int batches = 100, runs = 100;
    std::uint64_t seed = 1;
    cmd_val->add_option("--network", network, "metro or intercity");
    cmd_val->add_option("--tcut-grid", tcut_grid_s, "log grid of cut-offs in us, lo:hi:n");
    cmd_val->add_option("--pm0-grid", pm0_grid_s, "log grid of base efficiencies, lo:hi:n");
    cmd_val->add_option("--batches", batches, "Monte Carlo batches");
    cmd_val->add_option("--runs", runs, "runs per batch");
    cmd_val->add_option("--seed", seed, "master seed");

    // optimize
    auto* cmd_opt = app.add_subcommand("optimize", "minimal hardware improvements for the target");
    add_common(cmd_opt);
    std::string question_s = "q1";
    int restarts = 50;
    bool allow_infeasible = false;
    double f_target = 2.0 / 3.0;
    std::uint64_t opt_seed = 1;
    cmd_opt->add_option("--question", question_s, "q1 | q2 | q3 | q4");
    cmd_opt->add_option("--restarts", restarts, "optimizer restarts");
    cmd_opt->add_option("--seed", opt_seed, "optimizer seed");
    cmd_opt->add_option("--f-target", f_target, "target fidelity (default 2/3)");
    cmd_opt->add_flag("--allow-infeasible", allow_infeasible,
                      "exit 0 even when no feasible point exists");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "requirement surfaces and feasibility regions");
    add_common(cmd_sweep);
    std::string sweep_question = "q2", pm0_s, tcoh_s, pb_s, fb_s;
    std::uint64_t sweep_seed = 1;
    (void)sweep_seed;
    cmd_sweep->add_option("--question", sweep_question, "q1 | q2 (surface), q3 (region)");
    cmd_sweep->add_option("--pm0-grid", pm0_s, "log grid lo:hi:n");
    cmd_sweep->add_option("--tcoh-grid", tcoh_s, "log grid in seconds lo:hi:n");
    cmd_sweep->add_option("--pb-grid", pb_s, "log grid lo:hi:n");
    cmd_sweep->add_option("--fb-grid", fb_s, "linear grid lo:hi:n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        Preset cfg = config_path.empty() ? load_preset(preset)
                                         : load_config_file(config_path, preset);
        if (dump_config) {
            std::cout << config_to_json(cfg) << "\n";
            return kExitOk;
        }
        Mode mode = parse_mode(mode_str);
        Output out;
        out.open(out_path);

        if (app.got_subcommand(cmd_metro) || app.got_subcommand(cmd_inter)) {
            bool metro = app.got_subcommand(cmd_metro);
            std::optional<long long> tc;
            if (!metro && cmd_inter->count("--tcut-us")) tc = tcut_us;
            PerfPoint p = evaluate_point(cfg.hw, cfg.geometry, kind_of(metro, mode), tc);
            nlohmann::json j{{"fidelity", p.fidelity},
                             {"rate_per_s", p.rate},
                             {"success_probability", p.success_prob}};
            if (p.t_cut) j["t_cut_us"] = *p.t_cut;
            out.stream() << j.dump(2) << "\n";
            return kExitOk;
        }

        if (app.got_subcommand(cmd_val)) {
            bool metro = network == "metro";
            if (!metro && network != "intercity") throw ConfigError("--network must be metro or intercity");
            std::vector<double> xs;
            if (metro) {
                if (pm0_grid_s.empty()) throw ConfigError("metro validation needs --pm0-grid");
                xs = log_points(parse_grid(pm0_grid_s));
            } else {
                if (tcut_grid_s.empty()) throw ConfigError("intercity validation needs --tcut-grid");
                xs = log_points(parse_grid(tcut_grid_s));
            }
            out.stream() << (metro ? "p_m0" : "t_cut_us")
                         << ",analytic_fidelity,analytic_rate,mc_fid_mean,mc_fid_p5,mc_fid_p95,"
                            "mc_rate_mean,mc_rate_p5,mc_rate_p95,in_band\n";
            int out_of_band = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                HardwareParams hw = cfg.hw;
                McConfig mc;
                mc.mode = mode;
                mc.batches = batches;
                mc.runs_per_batch = runs;
                mc.master_seed = derive_seed(seed, i);
                double fid, rate;
                if (metro) {
                    hw.p_m0 = xs[i];
                    MetroScenario scn = make_metro_scenario(hw, cfg.geometry);
                    fid = metro_fidelity(scn, mode);
                    rate = metro_rate(scn);
                    mc.scenario = scn;
                } else {
                    IntercityScenario scn = make_intercity_scenario(
                        hw, cfg.geometry, static_cast<long long>(std::llround(xs[i])));
                    fid = intercity_fidelity(scn, mode);
                    rate = intercity_rate(scn);
                    mc.scenario = scn;
                }
                McStats st = run_batches(mc);
                bool band = fid >= st.fid_p5 && fid <= st.fid_p95 && rate >= st.rate_p5 &&
                            rate <= st.rate_p95;
                if (!band) ++out_of_band;
                out.stream() << fmt(xs[i]) << ',' << fmt(fid) << ',' << fmt(rate) << ','
                             << fmt(st.mean_fidelity) << ',' << fmt(st.fid_p5) << ','
                             << fmt(st.fid_p95) << ',' << fmt(st.mean_rate) << ','
                             << fmt(st.rate_p5) << ',' << fmt(st.rate_p95) << ','
                             << (band ? 1 : 0) << "\n";
            }
            if (out_of_band) {
                std::cerr << out_of_band << " of " << xs.size()
                          << " grid points fall outside the Monte Carlo band\n";
                return kExitBand;
            }
            return kExitOk;
        }

        if (app.got_subcommand(cmd_opt)) {
            Question q;
            if (question_s == "q1") q = Question::Q1;
            else if (question_s == "q2") q = Question::Q2;
            else if (question_s == "q3") q = Question::Q3;
            else if (question_s == "q4") q = Question::Q4;
            else throw ConfigError("unknown question: " + question_s);
            OptimProblem prob = make_problem(q, mode, restarts, opt_seed);
            prob.f_target = f_target;
            OptimResult res = optimize(prob);
            nlohmann::json j{{"question", question_s},
                             {"mode", mode_str},
                             {"feasible", res.feasible},
                             {"point", point_json(res.point)},
                             {"fidelity", res.fidelity},
                             {"rate_per_s", res.rate},
                             {"cost_h", res.cost_h}};
            if (res.t_cut_star) j["t_cut_star_us"] = *res.t_cut_star;
            nlohmann::json ifs;
            for (const auto& [k, v] : res.per_param_if) ifs[param_kind_name(k)] = v;
            j["improvement_factors"] = ifs;
            out.stream() << j.dump(2) << "\n";
            if (!res.feasible && !allow_infeasible) return kExitInfeasible;
            return kExitOk;
        }

        if (app.got_subcommand(cmd_sweep)) {
            Preset opt = load_preset("optimistic");
            if (sweep_question == "q1" || sweep_question == "q2") {
                if (pm0_s.empty() || tcoh_s.empty())
                    throw ConfigError("surface sweep needs --pm0-grid and --tcoh-grid");
                HardwareParams fixed = cfg.hw;
                ScenarioKind kind = kind_of(sweep_question == "q1", mode);
                if (sweep_question == "q2") {
                    fixed.p_b = opt.hw.p_b;
                    fixed.f_b = opt.hw.f_b;
                }
                fixed.f_link_metro = opt.hw.f_link_metro; // bisection upper edge
                auto rows = min_fidelity_surface(log_points(parse_grid(pm0_s)),
                                                 log_points(parse_grid(tcoh_s)), fixed,
                                                 cfg.geometry, kind);
                out.stream() << "p_m0,t_coh_s,feasible,f_min,rate_per_s\n";
                for (const auto& r : rows)
                    out.stream() << fmt(r.p_m0) << ',' << fmt(r.t_coh_s) << ',' << (r.feasible ? 1 : 0)
                                 << ',' << fmt(r.feasible ? r.f_min : 0.0) << ','
                                 << fmt(r.feasible ? r.rate : 0.0) << "\n";
                return kExitOk;
            }
            if (sweep_question == "q3") {
                if (pb_s.empty() || fb_s.empty())
                    throw ConfigError("region sweep needs --pb-grid and --fb-grid");
                HardwareParams fixed = opt.hw;
                auto rows = feasibility_region(log_points(parse_grid(pb_s)),
                                               lin_points(parse_grid(fb_s)), fixed, cfg.geometry,
                                               kind_of(false, mode));
                out.stream() << "p_b,f_b,feasible,max_rate_per_s\n";
                for (const auto& r : rows)
                    out.stream() << fmt(r.p_b) << ',' << fmt(r.f_b) << ',' << (r.feasible ? 1 : 0)
                                 << ',' << fmt(r.feasible ? r.max_rate : 0.0) << "\n";
                return kExitOk;
            }
            throw ConfigError("sweep supports questions q1, q2, q3");
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownPreset& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const OutOfRange& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
