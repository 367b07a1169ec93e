#pragma once

#include <cstdint>
#include <numeric>

#include "qnet/errors.hpp"

namespace qnet {

// Exact ratio of two 64-bit integers. Slot-time ratios (t_m/t_b, t_cut/t_m, ...)
// are carried through the series evaluation in this form so that floor/ceil
// exponents never suffer floating-point drift.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw OutOfRange("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool positive() const { return num > 0; }
    bool is_zero() const { return num == 0; }
};

namespace detail {

inline long long floor_div(__int128 n, __int128 d) {
    __int128 q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
    return static_cast<long long>(q);
}

inline long long ceil_div(__int128 n, __int128 d) {
    __int128 q = n / d;
    if ((n % d != 0) && ((n < 0) == (d < 0))) ++q;
    return static_cast<long long>(q);
}

} // namespace detail

// floor(i*q - a), computed exactly.
inline long long floor_iq_minus(long long i, const Rational& q, const Rational& a) {
    __int128 n = static_cast<__int128>(i) * q.num * a.den - static_cast<__int128>(a.num) * q.den;
    __int128 d = static_cast<__int128>(q.den) * a.den;
    return detail::floor_div(n, d);
}

// ceil(i*q - a), computed exactly.
inline long long ceil_iq_minus(long long i, const Rational& q, const Rational& a) {
    __int128 n = static_cast<__int128>(i) * q.num * a.den - static_cast<__int128>(a.num) * q.den;
    __int128 d = static_cast<__int128>(q.den) * a.den;
    return detail::ceil_div(n, d);
}

// Smallest z in N with z*q integral; equals the reduced denominator of q.
inline long long z_star(const Rational& q) {
    if (!q.positive()) throw OutOfRange("z_star: q must be positive");
    return q.den;
}

// Smallest z in N with both z*r and z*r*q integral.
inline long long z_bar(const Rational& r, const Rational& q) {
    if (!r.positive() || !q.positive()) throw OutOfRange("z_bar: r, q must be positive");
    // z must be a multiple of den(r); with z = den(r)*m the second condition
    // becomes q.den | r.num*q.num*m.
    long long t = static_cast<long long>((static_cast<__int128>(r.num) * q.num) % q.den);
    long long m = q.den / std::gcd(q.den, t == 0 ? q.den : t);
    return r.den * m;
}

} // namespace qnet
