#pragma once

#include <map>
#include <mutex>

#include "juliacert/box.hpp"

namespace juliacert {

/// Enclosure of sqrt(n) for a nonnegative integer n, width <= 2^-prec.
inline Interval sqrt_int_enclosure(const BigInt& n, std::int64_t prec) {
    Dyadic x(n, 0);
    return Interval(sqrt_lower(x, prec + 1), sqrt_upper(x, prec + 1));
}

namespace detail {

// atan(1/q) by the alternating Leibniz series with a certified tail bound.
inline Interval atan_inv(long q, std::int64_t prec) {
    std::int64_t p = prec + 8;
    Interval acc{Dyadic(), Dyadic()};
    BigInt qpow = q; // q^(2k+1)
    for (std::int64_t k = 0;; ++k) {
        BigInt den = qpow * (2 * k + 1);
        Interval term = div_int(Interval{Dyadic(1), Dyadic(1)}, den, p);
        acc = (k % 2 == 0) ? acc + term : acc - term;
        qpow *= q * q;
        // next-term magnitude bounds the truncation error
        BigInt next_den = qpow * (2 * k + 3);
        Dyadic tail = div_upper(Dyadic(1), Dyadic(next_den, 0), p);
        if (tail < Dyadic::pow2(-(prec + 4))) {
            acc = acc + Interval(-tail, tail);
            break;
        }
    }
    return acc;
}

} // namespace detail

/// Enclosure of pi, width <= 2^-prec (Machin's formula).
inline Interval pi_enclosure(std::int64_t prec) {
    static std::mutex mu;
    static std::map<std::int64_t, Interval> cache;
    {
        std::lock_guard lk(mu);
        auto it = cache.lower_bound(prec);
        if (it != cache.end()) {
            Interval v = it->second;
            return v;
        }
    }
    Interval v = detail::atan_inv(5, prec + 6).scaled(Dyadic(16)) -
                 detail::atan_inv(239, prec + 6).scaled(Dyadic(4));
    std::lock_guard lk(mu);
    cache.emplace(prec, v);
    return v;
}

/// Enclosures of cos(x) and sin(x) over the interval x, for |x| <= 8.
/// Taylor series at the midpoint plus a Lipschitz widening by the halfwidth.
struct CosSin {
    Interval cos, sin;
};

inline CosSin cos_sin_enclosure(const Interval& x, std::int64_t prec) {
    if (x.abs_upper() > Dyadic(8))
        throw usage_error("cos_sin_enclosure: |argument| must be <= 8");
    std::int64_t p = prec + 16;
    Dyadic a = x.midpoint().round_to(p);
    Dyadic hw = max(x.hi - a, a - x.lo);

    Interval c{Dyadic(), Dyadic()}, s{Dyadic(), Dyadic()};
    Interval pw{Dyadic(1), Dyadic(1)}; // a^k enclosure
    Interval pa = Interval::point(a);
    BigInt fact = 1;
    Dyadic tail_bound;
    std::int64_t k = 0;
    for (;; ++k) {
        Interval term = div_int(pw, fact, p);
        switch (k % 4) {
            case 0: c = c + term; break;
            case 1: s = s + term; break;
            case 2: c = c - term; break;
            case 3: s = s - term; break;
        }
        pw = (pw * pa).rounded_out(p);
        fact *= (k + 1);
        Dyadic next = div_upper(pw.abs_upper(), Dyadic(fact, 0), p);
        if (k >= 16 && next < Dyadic::pow2(-(prec + 6))) {
            // ratio |a|/(k+2) <= 1/2 here, so the tail is under twice the next term
            tail_bound = next + next;
            break;
        }
        if (k > 4096) throw resource_error("cos_sin_enclosure: series did not converge");
    }
    Interval slack(-(tail_bound + hw), tail_bound + hw);
    return {c + slack, s + slack};
}

/// Enclosure of e^{2 pi i t} for t given as an enclosure, as a ComplexBox.
inline ComplexBox unit_rotation_enclosure(const Interval& t, std::int64_t prec) {
    Interval two_pi = pi_enclosure(prec + 8).scaled(Dyadic(2));
    Interval alpha = two_pi * t;
    CosSin cs = cos_sin_enclosure(alpha, prec + 2);
    return ComplexBox(cs.cos, cs.sin);
}

/// Enclosure of the golden-mean rotation number theta* = (sqrt(5)-1)/2.
inline Interval golden_theta_enclosure(std::int64_t prec) {
    Interval s5 = sqrt_int_enclosure(5, prec + 2);
    return (s5 - Interval(Dyadic(1), Dyadic(1))).scaled(Dyadic(BigInt(1), -1));
}

/// Enclosure of lambda* = e^{2 pi i theta*}, width <= 2^-prec. Cached.
inline ComplexBox golden_lambda_enclosure(std::int64_t prec) {
    static std::mutex mu;
    static std::map<std::int64_t, ComplexBox> cache;
    {
        std::lock_guard lk(mu);
        auto it = cache.find(prec);
        if (it != cache.end()) return it->second;
    }
    ComplexBox v = unit_rotation_enclosure(golden_theta_enclosure(prec + 8), prec + 2);
    for (std::int64_t boost_p = prec + 8; v.max_side() > Dyadic::pow2(-prec); boost_p *= 2) {
        if (boost_p > (std::int64_t(1) << 22))
            throw resource_error("golden_lambda_enclosure: precision escalation cap");
        v = unit_rotation_enclosure(golden_theta_enclosure(boost_p + 8), boost_p);
    }
    std::lock_guard lk(mu);
    cache.emplace(prec, v);
    return v;
}

} // namespace juliacert
