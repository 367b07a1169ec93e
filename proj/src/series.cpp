#include "qnet/series.hpp"

#include <cmath>

namespace qnet::series {

namespace {

double ipow(double base, long long e) {
    if (e == 0) return 1.0;
    return std::pow(base, static_cast<double>(e));
}

bool two_exponents(Variant v) { return v == Variant::cc || v == Variant::cf || v == Variant::ff; }

long long exponent(Variant v, long long i, const Rational& q, const Rational& a,
                   const Rational& s) {
    switch (v) {
        case Variant::c: return ceil_iq_minus(i, q, a);
        case Variant::f: return floor_iq_minus(i, q, a);
        case Variant::cc: return ceil_iq_minus(i, q, a) + ceil_iq_minus(i, q, s);
        case Variant::cf: return ceil_iq_minus(i, q, a) + floor_iq_minus(i, q, s);
        case Variant::ff: return floor_iq_minus(i, q, a) + floor_iq_minus(i, q, s);
    }
    return 0;
}

double finite_pi(Variant v, const SeriesArgs& args, long long lo, long long hi) {
    double acc = 0.0;
    double xi = ipow(args.x, lo);
    for (long long i = lo; i <= hi; ++i) {
        acc += xi * ipow(args.y, exponent(v, i, args.q, args.alpha, args.sigma));
        xi *= args.x;
    }
    return acc;
}

double finite_theta(Variant v, const SeriesArgs& args, long long lo, long long hi) {
    double acc = 0.0;
    double xi = ipow(args.x, lo);
    for (long long i = lo; i <= hi; ++i) {
        double w = (v == Variant::ff)
                       ? static_cast<double>(floor_iq_minus(i, args.q, args.alpha))
                       : static_cast<double>(i);
        acc += w * xi * ipow(args.y, exponent(v, i, args.q, args.alpha, args.sigma));
        xi *= args.x;
    }
    return acc;
}

// Per-period geometric ratio (x y^q)^z or (x y^2q)^z with z = z_star(q).
double period_ratio(Variant v, const SeriesArgs& args, long long z) {
    long long yexp = two_exponents(v) ? 2 * args.q.num : args.q.num;
    return ipow(args.x, z) * ipow(args.y, yexp);
}

void require_convergent(double ratio) {
    if (!(ratio < 1.0))
        throw DivergentSeries("infinite sum with geometric period ratio >= 1");
}

double finite_gamma(const SeriesArgs& args, long long lo, long long hi) {
    static const Rational zero{0, 1};
    double acc = 0.0;
    double xi = ipow(args.x, lo);
    for (long long i = lo; i <= hi; ++i) {
        acc += xi * ipow(args.y, floor_iq_minus(i, args.q, zero)) *
               ipow(args.s, floor_iq_minus(i, args.q, args.alpha));
        xi *= args.x;
    }
    return acc;
}

// Running cumulative of t_j = y^j s^ceil(jq) for j from j0 upward; used to
// turn delta's inner window sums into differences of two prefixes.
struct InnerCum {
    double y = 1.0, s = 1.0;
    Rational q;
    long long j_next = 0;
    double ypow = 1.0;
    long long e = 0;
    double spow = 1.0;
    double acc = 0.0;

    void init(double y_, double s_, const Rational& q_, long long j0) {
        static const Rational zero{0, 1};
        y = y_;
        s = s_;
        q = q_;
        j_next = j0;
        ypow = ipow(y, j0);
        e = ceil_iq_minus(j0, q, zero);
        spow = ipow(s, e);
    }

    // Sum of t_j for j in [j0, j_incl]; monotone in j_incl.
    double up_to(long long j_incl) {
        static const Rational zero{0, 1};
        while (j_next <= j_incl) {
            acc += ypow * spow;
            ++j_next;
            ypow *= y;
            long long e2 = ceil_iq_minus(j_next, q, zero);
            spow *= ipow(s, e2 - e);
            e = e2;
        }
        return acc;
    }
};

double finite_delta(const SeriesArgs& args, long long lo, long long hi) {
    if (hi < lo) return 0.0;
    long long j0 = ceil_iq_minus(lo, args.r, args.kappa);
    InnerCum hi_cum, lo_cum;
    hi_cum.init(args.y, args.s, args.q, j0);
    lo_cum.init(args.y, args.s, args.q, j0);
    static const Rational zero{0, 1};

    double acc = 0.0;
    double xi = ipow(args.x, lo);
    for (long long i = lo; i <= hi; ++i) {
        long long jlo = ceil_iq_minus(i, args.r, args.kappa);
        long long jhi = floor_iq_minus(i, args.r, zero);
        if (jlo <= jhi) {
            double window = hi_cum.up_to(jhi) - lo_cum.up_to(jlo - 1);
            acc += xi * window;
        }
        xi *= args.x;
    }
    return acc;
}

} // namespace

double pi_sum(Variant v, const SeriesArgs& args) {
    if (args.u) {
        if (*args.u < args.l) return 0.0;
        return finite_pi(v, args, args.l, *args.u);
    }
    long long z = z_star(args.q);
    double ratio = period_ratio(v, args, z);
    require_convergent(ratio);
    return finite_pi(v, args, args.l, args.l + z - 1) / (1.0 - ratio);
}

double theta_sum(Variant v, const SeriesArgs& args) {
    if (args.u) {
        if (*args.u < args.l) return 0.0;
        return finite_theta(v, args, args.l, *args.u);
    }
    long long z = z_star(args.q);
    double ratio = period_ratio(v, args, z);
    require_convergent(ratio);
    double th = finite_theta(v, args, args.l, args.l + z - 1);
    double pi = finite_pi(v, args, args.l, args.l + z - 1);
    // Per period the i-weight grows by z; theta_ff's floor(iq-a) weight grows
    // by z*q instead.
    double wstep = (v == Variant::ff) ? static_cast<double>(args.q.num) : static_cast<double>(z);
    double om = 1.0 - ratio;
    return th / om + wstep * ratio * pi / (om * om);
}

double gamma_sum(const SeriesArgs& args) {
    if (args.u) {
        if (*args.u < args.l) return 0.0;
        return finite_gamma(args, args.l, *args.u);
    }
    long long z = z_star(args.q);
    double ratio = ipow(args.x, z) * ipow(args.y * args.s, args.q.num);
    require_convergent(ratio);
    return finite_gamma(args, args.l, args.l + z - 1) / (1.0 - ratio);
}

double delta_sum(const SeriesArgs& args) {
    if (args.u) {
        if (*args.u < args.l) return 0.0;
        return finite_delta(args, args.l, *args.u);
    }
    long long z = z_bar(args.r, args.q);
    long long zr = z / args.r.den * args.r.num;
    long long zrq = zr / args.q.den * args.q.num;
    double ratio = ipow(args.x, z) * ipow(args.y, zr) * ipow(args.s, zrq);
    require_convergent(ratio);
    return finite_delta(args, args.l, args.l + z - 1) / (1.0 - ratio);
}

namespace {

SeriesArgs make_args(double x, double y, Rational q, Rational alpha, long long l, Upper u) {
    SeriesArgs a;
    a.x = x;
    a.y = y;
    a.q = q;
    a.alpha = alpha;
    a.l = l;
    a.u = u;
    return a;
}

} // namespace

double pi_c(double x, double y, Rational q, Rational alpha, long long l, Upper u) {
    return pi_sum(Variant::c, make_args(x, y, q, alpha, l, u));
}
double pi_f(double x, double y, Rational q, Rational alpha, long long l, Upper u) {
    return pi_sum(Variant::f, make_args(x, y, q, alpha, l, u));
}
double pi_cc(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return pi_sum(Variant::cc, a);
}
double pi_cf(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return pi_sum(Variant::cf, a);
}
double pi_ff(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return pi_sum(Variant::ff, a);
}
double theta_c(double x, double y, Rational q, Rational alpha, long long l, Upper u) {
    return theta_sum(Variant::c, make_args(x, y, q, alpha, l, u));
}
double theta_f(double x, double y, Rational q, Rational alpha, long long l, Upper u) {
    return theta_sum(Variant::f, make_args(x, y, q, alpha, l, u));
}
double theta_cc(double x, double y, Rational q, Rational alpha, Rational sigma, long long l,
                Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return theta_sum(Variant::cc, a);
}
double theta_cf(double x, double y, Rational q, Rational alpha, Rational sigma, long long l,
                Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return theta_sum(Variant::cf, a);
}
double theta_ff(double x, double y, Rational q, Rational alpha, Rational sigma, long long l,
                Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.sigma = sigma;
    return theta_sum(Variant::ff, a);
}
double gamma_sum(double x, double y, double s, Rational q, Rational alpha, long long l, Upper u) {
    auto a = make_args(x, y, q, alpha, l, u);
    a.s = s;
    return gamma_sum(a);
}
double delta_sum(double x, double y, double s, Rational r, Rational kappa, Rational q, long long l,
                 Upper u) {
    SeriesArgs a;
    a.x = x;
    a.y = y;
    a.s = s;
    a.r = r;
    a.kappa = kappa;
    a.q = q;
    a.l = l;
    a.u = u;
    return delta_sum(a);
}

} // namespace qnet::series
