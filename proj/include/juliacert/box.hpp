#pragma once

#include "juliacert/interval.hpp"

namespace juliacert {

/// Axis-aligned rectangle enclosure in the complex plane. Degenerate boxes
/// (exact points) are allowed. Every operation returns a box containing the
/// exact image set of its argument boxes.
class ComplexBox {
public:
    ComplexBox() : re_(Interval::point(Dyadic())), im_(Interval::point(Dyadic())) {}
    ComplexBox(Interval re, Interval im) : re_(std::move(re)), im_(std::move(im)) {}
    ComplexBox(Dyadic re_lo, Dyadic re_hi, Dyadic im_lo, Dyadic im_hi)
        : re_(std::move(re_lo), std::move(re_hi)), im_(std::move(im_lo), std::move(im_hi)) {}

    static ComplexBox point(const DyadicComplex& z) {
        return ComplexBox(Interval::point(z.re), Interval::point(z.im));
    }
    static ComplexBox square(const DyadicComplex& center, const Dyadic& half_side) {
        return ComplexBox(center.re - half_side, center.re + half_side,
                          center.im - half_side, center.im + half_side);
    }

    const Interval& re() const { return re_; }
    const Interval& im() const { return im_; }
    const Dyadic& re_lo() const { return re_.lo; }
    const Dyadic& re_hi() const { return re_.hi; }
    const Dyadic& im_lo() const { return im_.lo; }
    const Dyadic& im_hi() const { return im_.hi; }

    bool is_point() const { return re_.lo == re_.hi && im_.lo == im_.hi; }
    Dyadic width_re() const { return re_.width(); }
    Dyadic width_im() const { return im_.width(); }
    Dyadic max_side() const { return max(re_.width(), im_.width()); }
    DyadicComplex midpoint() const { return {re_.midpoint(), im_.midpoint()}; }

    bool contains(const DyadicComplex& z) const {
        return re_.contains(z.re) && im_.contains(z.im);
    }
    friend bool subset(const ComplexBox& a, const ComplexBox& b) {
        return subset(a.re_, b.re_) && subset(a.im_, b.im_);
    }
    friend bool intersects(const ComplexBox& a, const ComplexBox& b) {
        return !(a.re_.hi < b.re_.lo || b.re_.hi < a.re_.lo ||
                 a.im_.hi < b.im_.lo || b.im_.hi < a.im_.lo);
    }
    friend ComplexBox hull(const ComplexBox& a, const ComplexBox& b) {
        return ComplexBox(hull(a.re_, b.re_), hull(a.im_, b.im_));
    }
    /// Intersection; requires intersects(a, b).
    friend ComplexBox intersect(const ComplexBox& a, const ComplexBox& b) {
        return ComplexBox(max(a.re_.lo, b.re_.lo), min(a.re_.hi, b.re_.hi),
                          max(a.im_.lo, b.im_.lo), min(a.im_.hi, b.im_.hi));
    }

    friend ComplexBox operator+(const ComplexBox& a, const ComplexBox& b) {
        return ComplexBox(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend ComplexBox operator-(const ComplexBox& a, const ComplexBox& b) {
        return ComplexBox(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend ComplexBox operator-(const ComplexBox& a) { return ComplexBox(-a.re_, -a.im_); }

    ComplexBox conjugate() const { return ComplexBox(re_, -im_); }

    ComplexBox scaled(const Dyadic& c) const {
        return ComplexBox(re_.scaled(c), im_.scaled(c));
    }

    ComplexBox rounded_out(std::int64_t prec) const {
        return ComplexBox(re_.rounded_out(prec), im_.rounded_out(prec));
    }

    /// Exact min and max of |z|^2 over the box.
    Dyadic mag2_lower() const {
        Dyadic a = re_.abs_lower(), b = im_.abs_lower();
        return a * a + b * b;
    }
    Dyadic mag2_upper() const {
        Dyadic a = re_.abs_upper(), b = im_.abs_upper();
        return a * a + b * b;
    }

    friend Interval mag2_interval(const ComplexBox& a) {
        return Interval(a.mag2_lower(), a.mag2_upper());
    }

private:
    Interval re_, im_;
};

/// Exact complex interval product; the tightest rectangle given
/// component-wise interval products of (x1 x2 - y1 y2, x1 y2 + x2 y1).
inline ComplexBox box_mul(const ComplexBox& a, const ComplexBox& b) {
    return ComplexBox(a.re() * b.re() - a.im() * b.im(),
                      a.re() * b.im() + a.im() * b.re());
}

/// Tight complex square: uses dependent squaring of the components.
inline ComplexBox box_sqr(const ComplexBox& a) {
    Interval re = a.re().square() - a.im().square();
    Interval im = (a.re() * a.im()).scaled(Dyadic(2));
    return ComplexBox(re, im);
}

/// Enclosure of a / b; requires 0 not in b (mag2_lower(b) > 0).
inline ComplexBox box_div(const ComplexBox& a, const ComplexBox& b, std::int64_t prec) {
    Interval den = mag2_interval(b);
    if (den.lo.sign() <= 0) throw usage_error("box_div: divisor box contains zero");
    ComplexBox num = box_mul(a, b.conjugate());
    return ComplexBox(div_pos(num.re(), den, prec), div_pos(num.im(), den, prec));
}

/// Upper bound on the Euclidean distance from z to the box, exact up to one
/// final square-root rounding at 2^-prec. Returns exact zero iff z lies in
/// the box.
inline Dyadic box_point_distance(const ComplexBox& a, const DyadicComplex& z,
                                 std::int64_t prec = 64) {
    Dyadic dx, dy;
    if (z.re < a.re_lo()) dx = a.re_lo() - z.re;
    else if (z.re > a.re_hi()) dx = z.re - a.re_hi();
    if (z.im < a.im_lo()) dy = a.im_lo() - z.im;
    else if (z.im > a.im_hi()) dy = z.im - a.im_hi();
    if (dx.is_zero() && dy.is_zero()) return Dyadic();
    return sqrt_upper(dx * dx + dy * dy, prec);
}

} // namespace juliacert
