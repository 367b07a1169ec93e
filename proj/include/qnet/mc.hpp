#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <variant>
#include <vector>

#include "qnet/intercity.hpp"
#include "qnet/metro.hpp"

namespace qnet {

// Deterministic splittable stream: xoshiro256++ with per-batch state derived
// from the master seed via splitmix64; doubles from the top 53 bits.
struct Rng {
    std::uint64_t s[4];

    explicit Rng(std::uint64_t seed) {
        // splitmix64 state expansion.
        for (int i = 0; i < 4; ++i) {
            seed += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            s[i] = z ^ (z >> 31);
        }
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    double unit_open() {
        // (0,1), never exactly 0 or 1.
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Geometric on {1, 2, ...} with success probability p, via inverse CDF.
    long long geometric(double p) {
        if (p >= 1.0) return 1;
        double g = std::log(unit_open()) / std::log1p(-p);
        long long m = static_cast<long long>(std::ceil(g));
        return m < 1 ? 1 : m;
    }
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct McConfig {
    std::variant<MetroScenario, IntercityScenario> scenario;
    Mode mode = Mode::QR;
    int batches = 100;
    int runs_per_batch = 100;
    std::uint64_t master_seed = 1;
};

struct McBatch {
    double mean_fidelity = 0.0;
    double mean_e2e_us = 0.0;
    double rate = 0.0; // 1 / (classical delay + mean e2e time), in 1/s
    long long rounds = 0;
};

struct McStats {
    double mean_fidelity = 0.0;
    double mean_rate = 0.0;
    double fid_p5 = 0.0, fid_p95 = 0.0;
    double rate_p5 = 0.0, rate_p95 = 0.0;
    long long n_rounds_total = 0;
    std::vector<McBatch> batches;
};

struct RoundOutcome {
    bool y = false;
    long long z_us = 0;
    long long x1 = 0, x2 = 0, xb = 0;
    long long x_max = 0, x_min = 0;
    double w_e2e = 0.0; // meaningful when y
};

RoundOutcome sample_round(Rng& rng, const IntercityScenario& scn);

struct RunResult {
    double fidelity = 0.0;
    double e2e_us = 0.0;
    long long rounds = 0;
};

RunResult simulate_run(Rng& rng, const IntercityScenario& scn, Mode mode);
RunResult simulate_metro_run(Rng& rng, const MetroScenario& scn, Mode mode);

McStats run_batches(const McConfig& config);

// Exact three-qubit density-matrix teleportation: a data qubit
// p_d |phi><phi| + (1-p_d) I/2 sent through a Werner resource, with the
// output qubit depolarized for t_class. Returns <phi| rho_tel |phi>.
double dm_teleport_fidelity(double w, double p_d, double t_class_us, double t_coh_us,
                            std::complex<double> amp0, std::complex<double> amp1,
                            double* max_trace_err = nullptr);

// Samples n_states random input states and checks the fidelity is
// state-independent to 1e-12 before returning it.
double dm_teleport_oracle(double w, double p_d, double t_class_us, double t_coh_us,
                          int n_states = 10, std::uint64_t seed = 12345);

} // namespace qnet
