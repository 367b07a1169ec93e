#pragma once

#include <optional>

#include "qnet/rational.hpp"

namespace qnet::series {

// Sum primitives over geometric terms with floor/ceil exponents:
//
//   pi_c   (x,y,q,a,l,u)    = sum_{i=l}^{u} x^i y^ceil(iq-a)
//   pi_f   (x,y,q,a,l,u)    = sum_{i=l}^{u} x^i y^floor(iq-a)
//   pi_cc  (x,y,q,a,s,l,u)  = sum x^i y^(ceil(iq-a)+ceil(iq-s))
//   pi_cf  (x,y,q,a,s,l,u)  = sum x^i y^(ceil(iq-a)+floor(iq-s))
//   pi_ff  (x,y,q,a,s,l,u)  = sum x^i y^(floor(iq-a)+floor(iq-s))
//   theta_*                 = the same sums weighted by i, except theta_ff
//                             which is weighted by floor(iq-a)
//   gamma_sum(x,y,s,q,a,l,u)     = sum x^i y^floor(iq) s^floor(iq-a)
//   delta_sum(x,y,s,r,k,q,l,u)   = sum x^i sum_{j=ceil(ir-k)}^{floor(ir)} y^j s^ceil(jq)
//
// u = nullopt means an infinite upper bound; the sum is then evaluated in
// closed form from one period of length z_star(q) (z_bar(r,q) for delta).
// The exponent bases may exceed 1; convergence is governed solely by the
// per-period geometric ratio, which must stay below 1.

using Upper = std::optional<long long>;

enum class Variant { c, f, cc, cf, ff };

struct SeriesArgs {
    double x = 0.0;
    double y = 1.0;
    double s = 1.0;
    Rational q{0, 1};
    Rational alpha{0, 1};
    Rational sigma{0, 1};
    Rational r{0, 1};
    Rational kappa{0, 1};
    long long l = 1;
    Upper u{};
};

double pi_sum(Variant v, const SeriesArgs& args);
double theta_sum(Variant v, const SeriesArgs& args);
double gamma_sum(const SeriesArgs& args);
double delta_sum(const SeriesArgs& args);

// Convenience entry points mirroring the argument order used throughout the
// analytic expressions.
double pi_c(double x, double y, Rational q, Rational alpha, long long l, Upper u);
double pi_f(double x, double y, Rational q, Rational alpha, long long l, Upper u);
double pi_cc(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double pi_cf(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double pi_ff(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double theta_c(double x, double y, Rational q, Rational alpha, long long l, Upper u);
double theta_f(double x, double y, Rational q, Rational alpha, long long l, Upper u);
double theta_cc(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double theta_cf(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double theta_ff(double x, double y, Rational q, Rational alpha, Rational sigma, long long l, Upper u);
double gamma_sum(double x, double y, double s, Rational q, Rational alpha, long long l, Upper u);
double delta_sum(double x, double y, double s, Rational r, Rational kappa, Rational q, long long l,
                 Upper u);

} // namespace qnet::series
