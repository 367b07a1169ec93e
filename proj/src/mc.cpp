#include "qnet/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qnet/parallel.hpp"

namespace qnet {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over master + golden-ratio stride.
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

// Geometric sampler with the log of the failure probability cached.
struct GeoSampler {
    double inv_log_q;
    bool certain;

    explicit GeoSampler(double p)
        : inv_log_q(p < 1.0 ? 1.0 / std::log1p(-p) : 0.0), certain(p >= 1.0) {}

    long long operator()(Rng& rng) const {
        if (certain) return 1;
        long long m = static_cast<long long>(std::ceil(std::log(rng.unit_open()) * inv_log_q));
        return m < 1 ? 1 : m;
    }
};

RoundOutcome sample_round_cached(Rng& rng, const IntercityScenario& scn, const GeoSampler& gm,
                                 const GeoSampler& gb) {
    RoundOutcome r;
    r.x1 = scn.t_m * gm(rng);
    r.x2 = scn.t_m * gm(rng);
    r.xb = scn.t_b * gb(rng);
    r.x_max = std::max({r.x1, r.x2, r.xb});
    r.x_min = std::min({r.x1, r.x2, r.xb});
    r.y = (r.x_max - r.x_min) <= scn.t_cut - 1;
    if (r.y) {
        r.z_us = r.x_max + scn.t_msg;
        long long x_diff = (r.x_max == r.x1 || r.x_max == r.x2)
                               ? (r.x_max - r.x_min)
                               : (2 * r.xb - r.x1 - r.x2);
        r.w_e2e = scn.w_m * scn.w_m * scn.w_b *
                  std::exp(-scn.k() * static_cast<double>(x_diff + scn.t_msg));
    } else {
        r.z_us = r.x_min + scn.t_cut;
        r.w_e2e = 0.0;
    }
    return r;
}

} // namespace

RoundOutcome sample_round(Rng& rng, const IntercityScenario& scn) {
    return sample_round_cached(rng, scn, GeoSampler(scn.p_m), GeoSampler(scn.p_b));
}

RunResult simulate_run(Rng& rng, const IntercityScenario& scn, Mode mode) {
    const GeoSampler gm(scn.p_m), gb(scn.p_b);
    RunResult res;
    double total = 0.0;
    for (;;) {
        RoundOutcome r = sample_round_cached(rng, scn, gm, gb);
        ++res.rounds;
        total += static_cast<double>(r.z_us);
        if (r.y) {
            double k = scn.k();
            double w = r.w_e2e * std::exp(-k * static_cast<double>(scn.t_int_class) / 2.0);
            if (mode == Mode::QR) w *= std::exp(-k * total / 2.0);
            res.fidelity = 0.5 * (1.0 + w);
            res.e2e_us = total;
            return res;
        }
    }
}

RunResult simulate_metro_run(Rng& rng, const MetroScenario& scn, Mode mode) {
    RunResult res;
    res.rounds = rng.geometric(scn.p_mprime);
    double x = static_cast<double>(res.rounds * scn.t_mprime);
    double w = scn.w_mprime * std::exp(-static_cast<double>(scn.t_m_class) / scn.t_coh_us);
    if (mode == Mode::QR) w *= std::exp(-x / scn.t_coh_us);
    res.fidelity = 0.5 * (1.0 + w);
    res.e2e_us = x;
    return res;
}

namespace {

double nearest_rank(const std::vector<double>& sorted, double percent) {
    long long n = static_cast<long long>(sorted.size());
    long long rank = static_cast<long long>(std::ceil(percent / 100.0 * static_cast<double>(n)));
    rank = std::clamp<long long>(rank, 1, n);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

} // namespace

McStats run_batches(const McConfig& config) {
    const bool metro = std::holds_alternative<MetroScenario>(config.scenario);
    const double delay_us =
        metro ? 2.0 * static_cast<double>(std::get<MetroScenario>(config.scenario).t_m_class)
              : static_cast<double>(std::get<IntercityScenario>(config.scenario).t_int_class);

    McStats stats;
    stats.batches.resize(static_cast<std::size_t>(config.batches));
    parallel_for(config.batches, [&](long long bi) {
        Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(bi)));
        double fid = 0.0, e2e = 0.0;
        long long rounds = 0;
        for (int run = 0; run < config.runs_per_batch; ++run) {
            RunResult r = metro
                              ? simulate_metro_run(rng, std::get<MetroScenario>(config.scenario),
                                                   config.mode)
                              : simulate_run(rng, std::get<IntercityScenario>(config.scenario),
                                             config.mode);
            fid += r.fidelity;
            e2e += r.e2e_us;
            rounds += r.rounds;
        }
        McBatch& b = stats.batches[static_cast<std::size_t>(bi)];
        b.mean_fidelity = fid / config.runs_per_batch;
        b.mean_e2e_us = e2e / config.runs_per_batch;
        b.rate = 1e6 / (delay_us + b.mean_e2e_us);
        b.rounds = rounds;
    });

    std::vector<double> fids, rates;
    fids.reserve(stats.batches.size());
    rates.reserve(stats.batches.size());
    for (const McBatch& b : stats.batches) {
        fids.push_back(b.mean_fidelity);
        rates.push_back(b.rate);
        stats.mean_fidelity += b.mean_fidelity;
        stats.mean_rate += b.rate;
        stats.n_rounds_total += b.rounds;
    }
    stats.mean_fidelity /= static_cast<double>(stats.batches.size());
    stats.mean_rate /= static_cast<double>(stats.batches.size());
    std::sort(fids.begin(), fids.end());
    std::sort(rates.begin(), rates.end());
    stats.fid_p5 = nearest_rank(fids, 5.0);
    stats.fid_p95 = nearest_rank(fids, 95.0);
    stats.rate_p5 = nearest_rank(rates, 5.0);
    stats.rate_p95 = nearest_rank(rates, 95.0);
    return stats;
}

// ---- density-matrix teleportation oracle ---------------------------------

namespace {

using Cplx = std::complex<double>;
using Mat8 = std::array<Cplx, 64>;
using Mat2 = std::array<Cplx, 4>;

Mat8 mul(const Mat8& a, const Mat8& b) {
    Mat8 c{};
    for (int i = 0; i < 8; ++i)
        for (int k = 0; k < 8; ++k) {
            Cplx aik = a[i * 8 + k];
            if (aik == Cplx{}) continue;
            for (int j = 0; j < 8; ++j) c[i * 8 + j] += aik * b[k * 8 + j];
        }
    return c;
}

Mat8 conjugate_by(const Mat8& u, const Mat8& rho) {
    Mat8 ur = mul(u, rho);
    Mat8 out{};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            Cplx acc{};
            for (int k = 0; k < 8; ++k) acc += ur[i * 8 + k] * std::conj(u[j * 8 + k]);
            out[i * 8 + j] = acc;
        }
    return out;
}

double trace_err(const Mat8& rho) {
    Cplx tr{};
    for (int i = 0; i < 8; ++i) tr += rho[i * 8 + i];
    return std::abs(tr - Cplx{1.0, 0.0});
}

} // namespace

double dm_teleport_fidelity(double w, double p_d, double t_class_us, double t_coh_us,
                            Cplx amp0, Cplx amp1, double* max_trace_err) {
    if (!(w >= 0.0 && w <= 1.0) || !(p_d >= 0.0 && p_d <= 1.0))
        throw OutOfRange("dm_teleport: w, p_d must lie in [0,1]");
    double norm = std::norm(amp0) + std::norm(amp1);
    amp0 /= std::sqrt(norm);
    amp1 /= std::sqrt(norm);

    // rho_data on qubit 1.
    Mat2 rho_data{};
    rho_data[0] = p_d * amp0 * std::conj(amp0) + (1.0 - p_d) * 0.5;
    rho_data[1] = p_d * amp0 * std::conj(amp1);
    rho_data[2] = p_d * amp1 * std::conj(amp0);
    rho_data[3] = p_d * amp1 * std::conj(amp1) + (1.0 - p_d) * 0.5;

    // Werner resource on qubits 2 (sender half) and 3 (receiver half).
    std::array<Cplx, 16> rho_w{};
    for (int i = 0; i < 4; ++i) rho_w[i * 4 + i] = (1.0 - w) / 4.0;
    rho_w[0 * 4 + 0] += w / 2.0;
    rho_w[0 * 4 + 3] += w / 2.0;
    rho_w[3 * 4 + 0] += w / 2.0;
    rho_w[3 * 4 + 3] += w / 2.0;

    Mat8 rho{};
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i23 = 0; i23 < 4; ++i23)
                for (int j23 = 0; j23 < 4; ++j23)
                    rho[(i1 * 4 + i23) * 8 + (j1 * 4 + j23)] =
                        rho_data[i1 * 2 + j1] * rho_w[i23 * 4 + j23];

    double terr = trace_err(rho);

    // CNOT with qubit 1 as control, qubit 2 as target.
    Mat8 cnot{};
    for (int b = 0; b < 8; ++b) {
        int b1 = (b >> 2) & 1, b2 = (b >> 1) & 1, b3 = b & 1;
        int out = (b1 << 2) | ((b2 ^ b1) << 1) | b3;
        cnot[out * 8 + b] = 1.0;
    }
    rho = conjugate_by(cnot, rho);
    terr = std::max(terr, trace_err(rho));

    // Hadamard on qubit 1.
    Mat8 h1{};
    const double s = 1.0 / std::sqrt(2.0);
    for (int b = 0; b < 8; ++b) {
        int b1 = (b >> 2) & 1;
        int rest = b & 3;
        h1[(0 * 4 + rest) * 8 + b] = s;
        h1[(1 * 4 + rest) * 8 + b] = (b1 == 0) ? s : -s;
    }
    rho = conjugate_by(h1, rho);
    terr = std::max(terr, trace_err(rho));

    // Measure qubits 1 and 2, apply the Pauli correction Z^{o1} X^{o2} to
    // qubit 3, and average the four branches.
    Mat2 rho_out{};
    for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) {
            Mat2 sigma{};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    sigma[i * 2 + j] = rho[((o1 << 2 | o2 << 1 | i)) * 8 + (o1 << 2 | o2 << 1 | j)];
            // X correction
            if (o2) {
                std::swap(sigma[0], sigma[3]);
                std::swap(sigma[1], sigma[2]);
            }
            // Z correction
            if (o1) {
                sigma[1] = -sigma[1];
                sigma[2] = -sigma[2];
            }
            for (int i = 0; i < 4; ++i) rho_out[i] += sigma[i];
        }
    double tr = std::abs(rho_out[0] + rho_out[3]);
    terr = std::max(terr, std::abs(tr - 1.0));

    // Depolarizing storage during the classical correction message.
    double decay = std::exp(-t_class_us / t_coh_us);
    for (int i = 0; i < 4; ++i) rho_out[i] *= decay;
    rho_out[0] += (1.0 - decay) * 0.5;
    rho_out[3] += (1.0 - decay) * 0.5;
    terr = std::max(terr, std::abs(std::abs(rho_out[0] + rho_out[3]) - 1.0));

    if (max_trace_err) *max_trace_err = terr;

    Cplx f = std::conj(amp0) * (rho_out[0] * amp0 + rho_out[1] * amp1) +
             std::conj(amp1) * (rho_out[2] * amp0 + rho_out[3] * amp1);
    return f.real();
}

double dm_teleport_oracle(double w, double p_d, double t_class_us, double t_coh_us, int n_states,
                          std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0));
    double first = 0.0;
    for (int i = 0; i < n_states; ++i) {
        double theta = rng.unit_open() * 3.14159265358979323846;
        double phi = rng.unit_open() * 2.0 * 3.14159265358979323846;
        Cplx a0{std::cos(theta / 2.0), 0.0};
        Cplx a1{std::sin(theta / 2.0) * std::cos(phi), std::sin(theta / 2.0) * std::sin(phi)};
        double f = dm_teleport_fidelity(w, p_d, t_class_us, t_coh_us, a0, a1);
        if (i == 0)
            first = f;
        else if (std::abs(f - first) > 1e-12)
            throw Error("dm_teleport_oracle: fidelity depends on the input state");
    }
    return first;
}

} // namespace qnet
