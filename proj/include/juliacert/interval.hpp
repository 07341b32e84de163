#pragma once

#include "juliacert/dyadic.hpp"

namespace juliacert {

/// Closed real interval [lo, hi] with exact dyadic endpoints.
/// Arithmetic is exact; rounding happens only through rounded_out().
struct Interval {
    Dyadic lo, hi;

    Interval() = default;
    Interval(Dyadic l, Dyadic h) : lo(std::move(l)), hi(std::move(h)) {
        if (hi < lo) throw usage_error("interval: hi < lo");
    }
    static Interval point(const Dyadic& x) { return Interval(x, x); }

    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    bool contains(const Dyadic& x) const { return lo <= x && x <= hi; }
    Dyadic width() const { return hi - lo; }
    Dyadic midpoint() const { return Dyadic((lo + hi).mantissa(), (lo + hi).exponent() - 1); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(a.lo + b.lo, a.hi + b.hi);
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(a.lo - b.hi, a.hi - b.lo);
    }
    friend Interval operator-(const Interval& a) { return Interval(-a.hi, -a.lo); }
    friend Interval operator*(const Interval& a, const Interval& b) {
        Dyadic p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        return Interval(min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4)));
    }

    /// Tight square: never dips below zero when the interval straddles it.
    Interval square() const {
        Dyadic a = lo * lo, b = hi * hi;
        if (contains_zero()) return Interval(Dyadic(), max(a, b));
        return Interval(min(a, b), max(a, b));
    }

    Interval scaled(const Dyadic& c) const {
        Dyadic a = lo * c, b = hi * c;
        return c.sign() >= 0 ? Interval(a, b) : Interval(b, a);
    }

    /// Division by an interval with 0 < d.lo (directed endpoints at prec).
    friend Interval div_pos(const Interval& a, const Interval& d, std::int64_t prec) {
        if (d.lo.sign() <= 0) throw usage_error("div_pos: divisor not strictly positive");
        Dyadic cands_lo = min(min(div_lower(a.lo, d.lo, prec), div_lower(a.lo, d.hi, prec)),
                              min(div_lower(a.hi, d.lo, prec), div_lower(a.hi, d.hi, prec)));
        Dyadic cands_hi = max(max(div_upper(a.lo, d.lo, prec), div_upper(a.lo, d.hi, prec)),
                              max(div_upper(a.hi, d.lo, prec), div_upper(a.hi, d.hi, prec)));
        return Interval(cands_lo, cands_hi);
    }

    /// Enclosure of a / n for a big integer n > 0, endpoints on the 2^-prec grid.
    friend Interval div_int(const Interval& a, const BigInt& n, std::int64_t prec) {
        Dyadic d(n, 0);
        return Interval(div_lower(a.lo, d, prec), div_upper(a.hi, d, prec));
    }

    Interval rounded_out(std::int64_t prec) const {
        return Interval(lo.round_down_mixed(prec), hi.round_up_mixed(prec));
    }

    friend Interval hull(const Interval& a, const Interval& b) {
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi));
    }
    friend bool subset(const Interval& a, const Interval& b) {
        return b.lo <= a.lo && a.hi <= b.hi;
    }

    /// min/max of |x| over the interval.
    Dyadic abs_lower() const {
        if (contains_zero()) return Dyadic();
        return min(abs(lo), abs(hi));
    }
    Dyadic abs_upper() const { return max(abs(lo), abs(hi)); }
};

} // namespace juliacert
