#include "qnet/intercity.hpp"

#include <cmath>

#include "qnet/series.hpp"

namespace qnet {

namespace {

using series::Upper;
constexpr Upper kInf{};

double ipow(double base, long long e) {
    if (e == 0) return 1.0;
    return std::pow(base, static_cast<double>(e));
}

long long ceil_div_ll(long long n, long long d) {
    long long q = n / d;
    return (n % d != 0 && (n < 0) == (d < 0)) ? q + 1 : q;
}

// sum_{i=1}^{n} x^i
double geom1(double x, long long n) {
    if (n <= 0) return 0.0;
    return x * (1.0 - ipow(x, n)) / (1.0 - x);
}

// sum_{i=1}^{n} i x^i
double geom_i(double x, long long n) {
    if (n <= 0) return 0.0;
    double om = 1.0 - x;
    return x * (1.0 - static_cast<double>(n + 1) * ipow(x, n) + static_cast<double>(n) * ipow(x, n + 1)) /
           (om * om);
}

// sum_{i=lo}^{hi} x^i
double geom_range(double x, long long lo, long long hi) {
    if (hi < lo) return 0.0;
    return (ipow(x, lo) - ipow(x, hi + 1)) / (1.0 - x);
}

// Running power y^{e} along a monotone exponent sequence whose increments are
// floor(step) or floor(step)+1.
struct PowTracker {
    double y = 1.0;
    double mul_lo = 1.0, mul_hi = 1.0;
    long long d0 = 0;
    long long e = 0;
    double val = 1.0;

    void init(double y_, long long step_d0, long long e0) {
        y = y_;
        d0 = step_d0;
        mul_lo = ipow(y, d0);
        mul_hi = mul_lo * y;
        e = e0;
        val = ipow(y, e0);
    }
    double at(long long e_new) {
        long long d = e_new - e;
        if (d == d0)
            val *= mul_lo;
        else if (d == d0 + 1)
            val *= mul_hi;
        else if (d != 0)
            val *= ipow(y, d);
        e = e_new;
        return val;
    }
};

struct Ctx {
    double p_m, q_m, p_b, q_b;
    double delta;
    long long a, b, c, cp, M;
    long long mstar, nstar;
    long long L1, F, B1, L0, Bb, L0b, C, Lb, xi;
    double beta, gamma;
    Rational q_ab, q_ba, r_inv;

    explicit Ctx(const IntercityScenario& scn) {
        // The event algebra assumes strictly positive failure probabilities;
        // near-deterministic links are clamped (exact p = 1 on both segments
        // is handled separately upstream).
        p_m = std::min(scn.p_m, 1.0 - 1e-12);
        p_b = std::min(scn.p_b, 1.0 - 1e-12);
        q_m = 1.0 - p_m;
        q_b = 1.0 - p_b;
        delta = p_m * p_m * p_b / (q_m * q_m * q_b);
        a = scn.t_m;
        b = scn.t_b;
        c = scn.t_cut;
        cp = scn.t_cut - 1;
        M = scn.t_msg;
        long long g = std::gcd(a, b);
        mstar = b / g;
        nstar = a / g;
        L1 = ceil_div_ll(b, a);
        F = cp / a;
        B1 = (b + cp) / a;
        L0 = B1 + 1;
        Bb = (a + cp) / b;
        L0b = Bb + 1;
        C = ceil_div_ll(c, a);
        Lb = ceil_div_ll(a + c, b);
        xi = (a + cp) / (mstar * a);
        beta = ipow(q_m, 2 * mstar) * ipow(q_b, nstar);
        gamma = ipow(q_m, mstar) * ipow(q_b, nstar);
        q_ab = Rational{a, b};
        q_ba = Rational{b, a};
        r_inv = Rational{1, mstar};
    }
};

bool deterministic_links(const IntercityScenario& scn) {
    return scn.p_m >= 1.0 && scn.p_b >= 1.0;
}

// Single-outcome round when every attempt succeeds: X1 = X2 = t_m, Xb = t_b.
struct DetRound {
    bool success;
    long long x_max, x_min, x_diff;
};

DetRound det_round(const IntercityScenario& scn) {
    DetRound r;
    r.x_max = std::max(scn.t_m, scn.t_b);
    r.x_min = std::min(scn.t_m, scn.t_b);
    r.success = (r.x_max - r.x_min) <= scn.t_cut - 1;
    r.x_diff = (scn.t_b > scn.t_m) ? 2 * (scn.t_b - scn.t_m) : (scn.t_m - scn.t_b);
    return r;
}

// ---- E(Z 1_event) on successful rounds, Z = X_max + t_msg ----------------

double z_a1(const Ctx& x) {
    namespace s = series;
    // Prefix over the region where either inner lower bound still saturates
    // at 1; the closed-form tail requires both bounds past saturation.
    long long Lstar = std::max(x.F + 2, x.L0);
    double T = 0.0;
    {
        double qm_m1 = ipow(x.q_m, x.L1);
        double qm_negF = ipow(x.q_m, -x.F);
        PowTracker qb_fl, qb_ce;
        qb_fl.init(x.q_b, x.a / x.b, x.L1 * x.a / x.b + 1);
        qb_ce.init(x.q_b, x.a / x.b,
                   std::max<long long>(1, ceil_div_ll(x.L1 * x.a - x.cp, x.b)));
        for (long long m1 = x.L1; m1 < Lstar; ++m1) {
            double sm_hi = (m1 - x.F <= 1) ? x.q_m : qm_m1 * qm_negF; // q_m^{max(1, m1 - F)}
            double sm = sm_hi - qm_m1 * x.q_m;
            long long blo = std::max<long long>(1, ceil_div_ll(m1 * x.a - x.cp, x.b));
            double sb = qb_ce.at(blo) - qb_fl.at(m1 * x.a / x.b + 1);
            T += static_cast<double>(m1 * x.a + x.M) * qm_m1 * sm * sb;
            qm_m1 *= x.q_m;
        }
    }
    double qm2 = x.q_m * x.q_m;
    Rational al{x.cp, x.b};
    double tail = static_cast<double>(x.a) * s::theta_c(qm2, x.q_b, x.q_ab, al, Lstar, kInf) -
                  static_cast<double>(x.a) * x.q_b * s::theta_f(qm2, x.q_b, x.q_ab, {0, 1}, Lstar, kInf) +
                  static_cast<double>(x.M) * s::pi_c(qm2, x.q_b, x.q_ab, al, Lstar, kInf) -
                  static_cast<double>(x.M) * x.q_b * s::pi_f(qm2, x.q_b, x.q_ab, {0, 1}, Lstar, kInf);
    return x.delta / (x.p_m * x.p_b) *
           (T + (ipow(x.q_m, -x.F) - x.q_m) * tail);
}

double z_ab(const Ctx& x) {
    namespace s = series;
    double Tb = 0.0;
    {
        double qb_mb = x.q_b;
        PowTracker qm_fl;
        qm_fl.init(x.q_m, x.b / x.a, x.b / x.a + 1);
        for (long long mb = 1; mb <= x.Bb; ++mb) {
            double inner = x.q_m - qm_fl.at(mb * x.b / x.a + 1);
            Tb += static_cast<double>(mb * x.b + x.M) * qb_mb * inner * inner;
            qb_mb *= x.q_b;
        }
    }
    double qm2 = x.q_m * x.q_m;
    Rational al{x.cp, x.a};
    double th = s::theta_c(x.q_b, qm2, x.q_ba, al, x.L0b, kInf) +
                qm2 * s::theta_f(x.q_b, qm2, x.q_ba, {0, 1}, x.L0b, kInf) -
                2.0 * x.q_m * s::theta_cf(x.q_b, x.q_m, x.q_ba, al, {0, 1}, x.L0b, kInf);
    double pi = s::pi_c(x.q_b, qm2, x.q_ba, al, x.L0b, kInf) +
                qm2 * s::pi_f(x.q_b, qm2, x.q_ba, {0, 1}, x.L0b, kInf) -
                2.0 * x.q_m * s::pi_cf(x.q_b, x.q_m, x.q_ba, al, {0, 1}, x.L0b, kInf);
    return x.delta / (x.p_m * x.p_m) *
           (Tb + static_cast<double>(x.b) * th + static_cast<double>(x.M) * pi);
}

double z_a1a2(const Ctx& x) {
    namespace s = series;
    double T12 = 0.0;
    {
        double qm2_m1 = ipow(x.q_m * x.q_m, x.L1);
        PowTracker qb_fl;
        qb_fl.init(x.q_b, x.a / x.b, x.L1 * x.a / x.b + 1);
        for (long long m1 = x.L1; m1 <= x.B1; ++m1) {
            double inner_b = x.q_b - qb_fl.at(m1 * x.a / x.b + 1);
            T12 += static_cast<double>(m1 * x.a + x.M) * qm2_m1 * inner_b;
            qm2_m1 *= x.q_m * x.q_m;
        }
    }
    double qm2 = x.q_m * x.q_m;
    Rational al{x.cp, x.b};
    double tail = static_cast<double>(x.a) *
                      (s::theta_c(qm2, x.q_b, x.q_ab, al, x.L0, kInf) -
                       x.q_b * s::theta_f(qm2, x.q_b, x.q_ab, {0, 1}, x.L0, kInf)) +
                  static_cast<double>(x.M) * (s::pi_c(qm2, x.q_b, x.q_ab, al, x.L0, kInf) -
                                              x.q_b * s::pi_f(qm2, x.q_b, x.q_ab, {0, 1}, x.L0, kInf));
    return x.delta / x.p_b * (T12 + tail);
}

double z_a1ab(const Ctx& x) {
    double head = x.delta * x.q_m / x.p_m *
                  (static_cast<double>(x.mstar * x.a) * (geom_i(x.gamma, x.xi) - geom_i(x.beta, x.xi)) +
                   static_cast<double>(x.M) * (geom1(x.gamma, x.xi) - geom1(x.beta, x.xi)));
    double om = 1.0 - x.beta;
    double tail = x.delta * (ipow(x.q_m, -x.F) - x.q_m) / x.p_m * ipow(x.beta, x.xi + 1) / om *
                  (static_cast<double>(x.mstar * x.a) * (static_cast<double>(x.xi + 1) - static_cast<double>(x.xi) * x.beta) / om +
                   static_cast<double>(x.M));
    return head + tail;
}

double z_a1a2ab(const Ctx& x) {
    double om = 1.0 - x.beta;
    return x.delta * x.beta / om * (static_cast<double>(x.mstar * x.a) / om + static_cast<double>(x.M));
}

// ---- E(Z 1_event) on failed rounds, Z = X_min + t_cut --------------------

double z_a12m(const Ctx& x) {
    namespace s = series;
    double qm2 = x.q_m * x.q_m;
    double head = x.delta * ipow(x.q_m, x.C) / (x.p_m * x.p_b) *
                  (static_cast<double>(x.a) * s::theta_c(qm2, x.q_b, x.q_ab, {0, 1}, 1, kInf) +
                   static_cast<double>(x.c) * s::pi_c(qm2, x.q_b, x.q_ab, {0, 1}, 1, kInf));
    double am = static_cast<double>(x.a) / x.p_m;
    double tail = (am + static_cast<double>(x.c)) * s::pi_f(x.q_m, x.q_b, x.q_ab, {0, 1}, 1 + x.C, kInf) -
                  ipow(x.q_m, -x.C) * (am - static_cast<double>(x.a * x.C) + static_cast<double>(x.c)) *
                      s::pi_f(qm2, x.q_b, x.q_ab, {0, 1}, 1 + x.C, kInf) -
                  ipow(x.q_m, -x.C) * static_cast<double>(x.a) *
                      s::theta_f(qm2, x.q_b, x.q_ab, {0, 1}, 1 + x.C, kInf);
    return head - x.delta * x.q_m * x.q_b / (x.p_m * x.p_b) * tail;
}

double z_a1bm(const Ctx& x) {
    namespace s = series;
    Rational al{-x.c, x.a};
    double qm2 = x.q_m * x.q_m;
    double first = x.delta / (x.p_m * x.p_m) *
                   (static_cast<double>(x.b) * s::theta_cc(x.q_b, x.q_m, x.q_ba, al, {0, 1}, 1, kInf) +
                    static_cast<double>(x.c) * s::pi_cc(x.q_b, x.q_m, x.q_ba, al, {0, 1}, 1, kInf));
    double second = x.delta * x.q_m / (x.p_m * (1.0 - qm2)) *
                    (static_cast<double>(x.b) * s::theta_c(x.q_b, qm2, x.q_ba, al, 1, kInf) +
                     static_cast<double>(x.c) * s::pi_c(x.q_b, qm2, x.q_ba, al, 1, kInf));
    return first - second;
}

double z_ab1m(const Ctx& x) {
    namespace s = series;
    double qm2 = x.q_m * x.q_m;
    Rational al{-x.c, x.b};
    double head = x.delta / (x.p_m * x.p_b) *
                  (static_cast<double>(x.a) * s::theta_c(qm2, x.q_b, x.q_ab, al, 1, kInf) +
                   static_cast<double>(x.c) * s::pi_c(qm2, x.q_b, x.q_ab, al, 1, kInf));
    Rational ca{x.c, x.a};
    double am = static_cast<double>(x.a) / x.p_m;
    double tail = (am + static_cast<double>(x.c)) *
                      (s::pi_f(x.q_b, x.q_m, x.q_ba, {0, 1}, x.Lb, kInf) -
                       s::pi_ff(x.q_b, x.q_m, x.q_ba, ca, {0, 1}, x.Lb, kInf)) -
                  static_cast<double>(x.a) * s::theta_ff(x.q_b, x.q_m, x.q_ba, ca, {0, 1}, x.Lb, kInf);
    return head - x.delta * qm2 / (x.p_m * x.p_m) * tail;
}

double z_a12m_a1bm(const Ctx& x) {
    double om = 1.0 - x.beta;
    return x.delta * ipow(x.q_m, x.C) * x.beta / (x.p_m * om) *
           (static_cast<double>(x.mstar * x.a) / om + static_cast<double>(x.c));
}

double z_ab1m_ab2m(const Ctx& x) {
    namespace s = series;
    double qm2 = x.q_m * x.q_m;
    Rational al{-x.c, x.b};
    return x.delta / x.p_b *
           (static_cast<double>(x.a) * s::theta_c(qm2, x.q_b, x.q_ab, al, 1, kInf) +
            static_cast<double>(x.c) * s::pi_c(qm2, x.q_b, x.q_ab, al, 1, kInf));
}

double z_a1ma2m(const Ctx& x) {
    namespace s = series;
    double qm2 = x.q_m * x.q_m;
    Rational al{-x.c, x.a};
    return x.delta / (1.0 - qm2) *
           (static_cast<double>(x.b) * s::theta_c(x.q_b, qm2, x.q_ba, al, 1, kInf) +
            static_cast<double>(x.c) * s::pi_c(x.q_b, qm2, x.q_ba, al, 1, kInf));
}

double z_a1mabm(const Ctx& x) {
    namespace s = series;
    Rational al{-x.c, x.mstar * x.a};
    return x.delta / (1.0 - x.gamma) *
           (static_cast<double>(x.a) * s::theta_c(x.q_m, x.gamma, x.r_inv, al, 1, kInf) +
            static_cast<double>(x.c) * s::pi_c(x.q_m, x.gamma, x.r_inv, al, 1, kInf));
}

// ---- E(e^{-v(X_diff + (alpha-2) X_max)} 1_event) on successful rounds ----

struct UPlusCtx {
    double ds, dm, db, dab, dam, dms, damb;
};

UPlusCtx make_uplus(const Ctx& x, double v, double alpha) {
    UPlusCtx u;
    double qb_ab = std::pow(x.q_b, static_cast<double>(x.a) / static_cast<double>(x.b));
    u.ds = std::exp(-v * (alpha - 1.0) * static_cast<double>(x.a)) * x.q_m;
    u.dm = std::exp(v * static_cast<double>(x.a)) * x.q_m;
    u.db = std::exp(v * static_cast<double>(x.b)) * x.q_b;
    u.dab = std::exp(-v * alpha * static_cast<double>(x.b)) * x.q_b;
    u.dam = std::exp(-v * (alpha - 1.0) * static_cast<double>(x.a)) * x.q_m * x.q_m;
    u.dms = std::exp(v * static_cast<double>(x.a)) * x.q_m * qb_ab;
    u.damb = std::exp(-v * (alpha - 1.0) * static_cast<double>(x.a)) * x.q_m * qb_ab;
    return u;
}

double up_a12(const Ctx& x, const UPlusCtx& u) {
    namespace s = series;
    double S1 = 0.0, S2 = 0.0;
    {
        double cum = 0.0;
        double dm_pow = u.dm;
        PowTracker qb_ceil;
        qb_ceil.init(x.q_b, x.a / x.b, ceil_div_ll(x.a, x.b));
        double ds_pow = ipow(u.ds, 1);
        PowTracker qb_fl;
        qb_fl.init(x.q_b, x.a / x.b, x.a / x.b);
        for (long long m1 = 1; m1 <= 1 + x.F; ++m1) {
            cum += dm_pow * qb_ceil.at(ceil_div_ll(m1 * x.a, x.b));
            if (m1 >= x.L1) {
                S1 += ds_pow * cum;
                S2 += ds_pow * qb_fl.at(m1 * x.a / x.b);
            }
            dm_pow *= u.dm;
            ds_pow *= u.ds;
        }
    }
    double dd = u.ds * u.dm;
    double frac = x.q_b / (1.0 - u.dm);
    return x.delta / x.p_b *
           (S1 - frac * u.dm * S2 +
            s::delta_sum(u.ds, u.dm, x.q_b, {1, 1}, {x.cp, x.a}, x.q_ab, 2 + x.F, kInf) -
            frac * ipow(u.dm, -x.F) * s::pi_f(dd, x.q_b, x.q_ab, {0, 1}, 2 + x.F, kInf) +
            frac * u.dm * s::pi_f(dd, x.q_b, x.q_ab, {0, 1}, x.L1, kInf));
}

double up_a1b(const Ctx& x, const UPlusCtx& u) {
    namespace s = series;
    double S1b = 0.0;
    {
        double cumB = 0.0;
        long long mb_next = 1;
        double db_pow = u.db;
        PowTracker qm_ceil;
        qm_ceil.init(x.q_m, x.b / x.a, ceil_div_ll(x.b, x.a));
        double ds_pow = ipow(u.ds, x.L1);
        for (long long m1 = x.L1; m1 <= x.B1; ++m1) {
            long long hi = m1 * x.a / x.b;
            while (mb_next <= hi) {
                cumB += db_pow * qm_ceil.at(ceil_div_ll(mb_next * x.b, x.a));
                ++mb_next;
                db_pow *= u.db;
            }
            S1b += ds_pow * cumB;
            ds_pow *= u.ds;
        }
    }
    double dsqm = u.ds * x.q_m;
    double first = x.delta / x.p_m *
                   (S1b + s::delta_sum(u.ds, u.db, x.q_m, x.q_ab, {x.cp, x.b}, x.q_ba, x.L0, kInf));
    double second = x.delta * x.q_m / (x.p_m * (1.0 - u.db)) *
                    (u.db * geom_range(dsqm, x.L1, x.B1) +
                     s::pi_c(dsqm, u.db, x.q_ab, {x.cp, x.b}, x.L0, kInf) -
                     u.db * s::pi_f(dsqm, u.db, x.q_ab, {0, 1}, x.L1, kInf));
    return first - second;
}

double up_a12_a1b(const Ctx& x, const UPlusCtx& u) {
    double R = ipow(u.dms * u.ds, x.mstar);
    return x.delta * (1.0 - ipow(u.ds, x.F + 1)) / (1.0 - u.ds) * R / (1.0 - R);
}

double up_ab(const Ctx& x, const UPlusCtx& u) {
    namespace s = series;
    double Sb = 0.0;
    {
        double dab_pow = u.dab;
        PowTracker dm_fl;
        dm_fl.init(u.dm, x.b / x.a, x.b / x.a + 2);
        double dm2 = u.dm * u.dm;
        for (long long mb = 1; mb <= x.Bb; ++mb) {
            Sb += dab_pow * (dm2 - 2.0 * dm_fl.at(mb * x.b / x.a + 2));
            dab_pow *= u.dab;
        }
    }
    double dm2 = u.dm * u.dm;
    Rational al{x.cp, x.a};
    double om = 1.0 - u.dm;
    return x.delta / (om * om) *
           (Sb + s::pi_c(u.dab, dm2, x.q_ba, al, x.L0b, kInf) -
            2.0 * u.dm * s::pi_cf(u.dab, u.dm, x.q_ba, al, {0, 1}, x.L0b, kInf) +
            dm2 * s::pi_f(u.dab, dm2, x.q_ba, {0, 1}, 1, kInf));
}

double up_a1a2(const Ctx& x, const UPlusCtx& u) {
    namespace s = series;
    double S = u.db * geom_range(u.dam, x.L1, x.B1);
    return x.delta / (1.0 - u.db) *
           (S + s::pi_c(u.dam, u.db, x.q_ab, {x.cp, x.b}, x.L0, kInf) -
            u.db * s::pi_f(u.dam, u.db, x.q_ab, {0, 1}, x.L1, kInf));
}

double up_a1ab(const Ctx& x, const UPlusCtx& u) {
    double R1 = ipow(u.damb, x.mstar);
    double R2 = ipow(u.damb * u.dm, x.mstar);
    double head = u.dm * (R1 - ipow(R1, x.xi + 1)) / (1.0 - R1);
    double tail = (ipow(u.dm, -x.F) * ipow(R2, x.xi + 1) - u.dm * R2) / (1.0 - R2);
    return x.delta / (1.0 - u.dm) * (head + tail);
}

double up_a1a2ab(const Ctx& x, double v, double alpha) {
    double bv = x.beta * std::exp(-v * (alpha - 2.0) * static_cast<double>(x.mstar * x.a));
    return x.delta * bv / (1.0 - bv);
}

// ---- E(e^{-v X_min / 2} 1_event) on failed rounds ------------------------

double um_a12(const Ctx& x, double km) {
    namespace s = series;
    double head = x.delta * ipow(x.q_m, x.C) / (x.p_m * x.p_b) *
                  s::pi_c(km * x.q_m, x.q_b, x.q_ab, {0, 1}, 1, kInf);
    double tail = s::pi_f(x.q_m, x.q_b, x.q_ab, {0, 1}, 1 + x.C, kInf) -
                  ipow(km, -x.C) * s::pi_f(km * x.q_m, x.q_b, x.q_ab, {0, 1}, 1 + x.C, kInf);
    return head - x.delta * x.q_b * km / (x.p_b * (1.0 - km)) * tail;
}

double um_a1b(const Ctx& x, double kb) {
    namespace s = series;
    Rational al{-x.c, x.a};
    double qm2 = x.q_m * x.q_m;
    return x.delta / (x.p_m * x.p_m) * s::pi_cc(kb, x.q_m, x.q_ba, al, {0, 1}, 1, kInf) -
           x.delta * x.q_m / (x.p_m * (1.0 - qm2)) * s::pi_c(kb, qm2, x.q_ba, al, 1, kInf);
}

double um_ab1(const Ctx& x, double km) {
    namespace s = series;
    double head = x.delta / (x.p_m * x.p_b) *
                  s::pi_c(km * x.q_m, x.q_b, x.q_ab, {-x.c, x.b}, 1, kInf);
    double tail = s::pi_f(x.q_b, x.q_m, x.q_ba, {0, 1}, x.Lb, kInf) -
                  s::gamma_sum(x.q_b, x.q_m, km, x.q_ba, {x.c, x.a}, x.Lb, kInf);
    return head - x.delta * x.q_m * km / (x.p_m * (1.0 - km)) * tail;
}

double um_a12_a1b(const Ctx& x, double v) {
    double bt = x.beta * std::exp(-v * static_cast<double>(x.mstar * x.a) / 2.0);
    return x.delta * ipow(x.q_m, x.C) * bt / (x.p_m * (1.0 - bt));
}

double um_ab1_ab2(const Ctx& x, double km) {
    namespace s = series;
    return x.delta / x.p_b * s::pi_c(km * x.q_m, x.q_b, x.q_ab, {-x.c, x.b}, 1, kInf);
}

double um_a1a2(const Ctx& x, double kb) {
    namespace s = series;
    double qm2 = x.q_m * x.q_m;
    return x.delta / (1.0 - qm2) * s::pi_c(kb, qm2, x.q_ba, {-x.c, x.a}, 1, kInf);
}

double um_a1ab(const Ctx& x, double km) {
    namespace s = series;
    return x.delta / (1.0 - x.gamma) *
           s::pi_c(km, x.gamma, x.r_inv, {-x.c, x.mstar * x.a}, 1, kInf);
}

} // namespace

void IntercityScenario::validate() const {
    if (!(p_m > 0.0 && p_m <= 1.0)) throw OutOfRange("p_m outside (0,1]");
    if (!(p_b > 0.0 && p_b <= 1.0)) throw OutOfRange("p_b outside (0,1]");
    if (t_m < 1 || t_b < 1) throw OutOfRange("attempt cycles must be at least one slot");
    if (t_msg < 0 || t_int_class < 0) throw OutOfRange("negative communication delay");
    if (!(t_coh_us > 0.0)) throw OutOfRange("t_coh must be positive");
    if (!(w_m >= 0.0 && w_m <= 1.0 && w_b >= 0.0 && w_b <= 1.0))
        throw OutOfRange("Werner parameters outside [0,1]");
    if (t_cut < std::max({t_m, t_b, t_msg}) + 1)
        throw OutOfRange("t_cut below max(t_m, t_b, t_msg) + 1");
}

IntercityScenario make_intercity_scenario(const HardwareParams& hw, const Geometry& geometry,
                                          long long t_cut) {
    hw.validate();
    Timing t = derive_timing(geometry);
    IntercityScenario scn;
    scn.p_m = link_success_probs(hw.p_m0, geometry).p_m;
    scn.p_b = hw.p_b;
    scn.t_m = t.t_m;
    scn.t_b = t.t_b;
    scn.t_msg = t.t_msg;
    scn.t_int_class = t.t_int_class;
    scn.t_coh_us = hw.t_coh_s * 1e6;
    scn.w_m = werner_from_fidelity(hw.f_link_metro);
    scn.w_b = werner_from_fidelity(hw.f_b);
    scn.t_cut = t_cut;
    scn.validate();
    return scn;
}

UPlusTerms u_alpha_terms(double v, double alpha, const IntercityScenario& scn) {
    scn.validate();
    if (v < 0.0) throw OutOfRange("u_alpha: v must be nonnegative");
    UPlusTerms out;
    if (deterministic_links(scn)) {
        DetRound r = det_round(scn);
        if (!r.success) return out;
        double payoff = std::exp(-v * (static_cast<double>(r.x_diff) +
                                       (alpha - 2.0) * static_cast<double>(r.x_max)));
        if (scn.t_b > scn.t_m) {
            out.ab = payoff;
        } else if (scn.t_m > scn.t_b) {
            // Both metro links finish last simultaneously; the backbone is first.
            out.a1b = payoff;
            out.a1a2 = payoff;
        } else {
            out.a1a2ab = out.a1a2 = out.a1ab = out.a12 = out.a1b = out.a12_a1b = out.ab = payoff;
        }
        return out;
    }
    Ctx x(scn);
    // The inner geometric factors e^{v t} q pass through 1 at isolated v;
    // nudge v off the pole.
    UPlusCtx u = make_uplus(x, v, alpha);
    for (int guard = 0; guard < 8 && (std::abs(1.0 - u.dm) < 1e-9 || std::abs(1.0 - u.db) < 1e-9);
         ++guard) {
        v = v * (1.0 + 4e-9) + 1e-18;
        u = make_uplus(x, v, alpha);
    }
    out.a12 = up_a12(x, u);
    out.a1b = up_a1b(x, u);
    out.a12_a1b = up_a12_a1b(x, u);
    out.ab = up_ab(x, u);
    out.a1a2 = up_a1a2(x, u);
    out.a1ab = up_a1ab(x, u);
    out.a1a2ab = up_a1a2ab(x, v, alpha);
    return out;
}

double u_alpha(double v, double alpha, const IntercityScenario& scn) {
    return u_alpha_terms(v, alpha, scn).total();
}

FailureTerms u3_terms(double v, const IntercityScenario& scn) {
    scn.validate();
    if (v < 0.0) throw OutOfRange("u3: v must be nonnegative");
    FailureTerms out;
    if (deterministic_links(scn)) {
        DetRound r = det_round(scn);
        if (r.success) return out;
        double payoff = std::exp(-v * static_cast<double>(r.x_min) / 2.0);
        if (scn.t_b > scn.t_m)
            out.ab1 = out.ab1_ab2 = payoff;
        else
            out.a1b = out.a1a2 = payoff;
        return out;
    }
    Ctx x(scn);
    double km = x.q_m * std::exp(-v * static_cast<double>(x.a) / 2.0);
    double kb = x.q_b * std::exp(-v * static_cast<double>(x.b) / 2.0);
    out.a12 = um_a12(x, km);
    out.a1b = um_a1b(x, kb);
    out.ab1 = um_ab1(x, km);
    out.a12_a1b = um_a12_a1b(x, v);
    out.ab1_ab2 = um_ab1_ab2(x, km);
    out.a1a2 = um_a1a2(x, kb);
    out.a1ab = um_a1ab(x, km);
    return out;
}

double u3(double v, const IntercityScenario& scn) { return u3_terms(v, scn).total(); }

SuccessTerms z_success_terms(const IntercityScenario& scn) {
    scn.validate();
    SuccessTerms out;
    if (deterministic_links(scn)) {
        DetRound r = det_round(scn);
        if (!r.success) return out;
        double z = static_cast<double>(r.x_max + scn.t_msg);
        if (scn.t_b > scn.t_m)
            out.ab = z;
        else if (scn.t_m > scn.t_b)
            out.a1 = out.a1a2 = z;
        else
            out.a1 = out.ab = out.a1a2 = out.a1ab = out.a1a2ab = z;
        return out;
    }
    Ctx x(scn);
    out.a1 = z_a1(x);
    out.ab = z_ab(x);
    out.a1a2 = z_a1a2(x);
    out.a1ab = z_a1ab(x);
    out.a1a2ab = z_a1a2ab(x);
    return out;
}

FailureTerms z_failure_terms(const IntercityScenario& scn) {
    scn.validate();
    FailureTerms out;
    if (deterministic_links(scn)) {
        DetRound r = det_round(scn);
        if (r.success) return out;
        double z = static_cast<double>(r.x_min + scn.t_cut);
        if (scn.t_b > scn.t_m)
            out.ab1 = out.ab1_ab2 = z;
        else
            out.a1b = out.a1a2 = z;
        return out;
    }
    Ctx x(scn);
    out.a12 = z_a12m(x);
    out.a1b = z_a1bm(x);
    out.ab1 = z_ab1m(x);
    out.a12_a1b = z_a12m_a1bm(x);
    out.ab1_ab2 = z_ab1m_ab2m(x);
    out.a1a2 = z_a1ma2m(x);
    out.a1ab = z_a1mabm(x);
    return out;
}

double success_probability(const IntercityScenario& scn) { return u_alpha(0.0, 2.0, scn); }

double expected_z_success(const IntercityScenario& scn) {
    SuccessTerms t = z_success_terms(scn);
    return 2.0 * t.a1 + t.ab - t.a1a2 - 2.0 * t.a1ab + t.a1a2ab;
}

double expected_z_fail(const IntercityScenario& scn) { return z_failure_terms(scn).total(); }

double expected_e2e_time(const IntercityScenario& scn) {
    double p = success_probability(scn);
    return (expected_z_fail(scn) + expected_z_success(scn)) / p;
}

double intercity_rate(const IntercityScenario& scn) {
    return 1e6 / (static_cast<double>(scn.t_int_class) + expected_e2e_time(scn));
}

WernerExpectation e2e_werner_expectation(const IntercityScenario& scn) {
    double k = scn.k();
    double p = success_probability(scn);
    double w = scn.w_m * scn.w_m * scn.w_b * std::exp(-k * static_cast<double>(scn.t_msg)) *
               u_alpha(k, 2.0, scn) / p;
    return {w, (1.0 + 3.0 * w) / 4.0};
}

double intercity_fidelity_er(const IntercityScenario& scn) {
    double k = scn.k();
    double p = success_probability(scn);
    double decay = std::exp(-k * (static_cast<double>(scn.t_msg) +
                                  static_cast<double>(scn.t_int_class) / 2.0));
    return 0.5 + 0.5 * scn.w_m * scn.w_m * scn.w_b * decay * u_alpha(k, 2.0, scn) / p;
}

double intercity_fidelity_qr(const IntercityScenario& scn) {
    double k = scn.k();
    double u2 = u_alpha(k, 2.5, scn);
    double u3v = u3(k, scn);
    double denom = 1.0 - std::exp(-k * static_cast<double>(scn.t_cut) / 2.0) * u3v;
    double decay = std::exp(-k * (static_cast<double>(scn.t_msg) +
                                  static_cast<double>(scn.t_int_class) / 2.0 +
                                  static_cast<double>(scn.t_msg) / 2.0));
    return 0.5 + 0.5 * scn.w_m * scn.w_m * scn.w_b * decay * u2 / denom;
}

double intercity_fidelity(const IntercityScenario& scn, Mode mode) {
    return mode == Mode::ER ? intercity_fidelity_er(scn) : intercity_fidelity_qr(scn);
}

} // namespace qnet
