#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "juliacert/errors.hpp"

namespace juliacert {

using BigInt = boost::multiprecision::cpp_int;

/// Number of bits of |v|; 0 for v == 0.
inline std::int64_t bit_length(const BigInt& v) {
    if (v.is_zero()) return 0;
    return static_cast<std::int64_t>(boost::multiprecision::msb(v < 0 ? BigInt(-v) : v)) + 1;
}

namespace detail {

// Shifts never exceed this many bits; beyond it the exact result would be
// astronomically long and we refuse instead of thrashing memory.
inline constexpr std::int64_t kMaxShiftBits = std::int64_t(1) << 26;
inline constexpr std::int64_t kMaxExponent = std::int64_t(1) << 48;

inline BigInt shl(const BigInt& m, std::int64_t s) {
    if (s > kMaxShiftBits) throw overflow_error("dyadic: alignment shift exceeds limit");
    return m << static_cast<unsigned>(s);
}

// floor(m / 2^s) and ceil(m / 2^s), correct for negative m.
inline BigInt floor_shr(const BigInt& m, std::int64_t s) {
    if (s <= 0) return shl(m, -s);
    if (s > kMaxShiftBits + 64) return m < 0 ? BigInt(-1) : BigInt(0);
    if (m >= 0) return m >> static_cast<unsigned>(s);
    BigInt a = -m;
    BigInt mask = (BigInt(1) << static_cast<unsigned>(s)) - 1;
    return -((a + mask) >> static_cast<unsigned>(s));
}

inline BigInt ceil_shr(const BigInt& m, std::int64_t s) {
    return -floor_shr(-m, s);
}

} // namespace detail

/// Exact dyadic rational m * 2^e with unbounded mantissa and bounded exponent.
///
/// Canonical form: the mantissa is odd, or the value is zero with exponent
/// zero. All of +, -, * are exact; nothing rounds unless a rounding
/// operation is called by name.
class Dyadic {
public:
    Dyadic() : m_(0), e_(0) {}
    Dyadic(long long n) : m_(n), e_(0) { normalize(); } // NOLINT(google-explicit-constructor)
    Dyadic(BigInt mantissa, std::int64_t exponent) : m_(std::move(mantissa)), e_(exponent) {
        normalize();
    }

    static Dyadic pow2(std::int64_t e) { return Dyadic(BigInt(1), e); }

    const BigInt& mantissa() const { return m_; }
    std::int64_t exponent() const { return e_; }

    bool is_zero() const { return m_.is_zero(); }
    int sign() const { return m_.is_zero() ? 0 : (m_ < 0 ? -1 : 1); }

    /// Position of the most significant bit: 2^(msb-1) <= |x| < 2^msb.
    /// Only meaningful for nonzero values.
    std::int64_t msb_position() const { return e_ + bit_length(m_); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::int64_t e = std::min(a.e_, b.e_);
        return Dyadic(detail::shl(a.m_, a.e_ - e) + detail::shl(b.m_, b.e_ - e), e);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.m_, a.e_); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero() || b.is_zero()) return Dyadic();
        return Dyadic(a.m_ * b.m_, checked_exp_add(a.e_, b.e_));
    }
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    /// Three-way compare without materializing huge alignments when the
    /// magnitudes are far apart.
    friend int cmp(const Dyadic& a, const Dyadic& b) {
        int sa = a.sign(), sb = b.sign();
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        std::int64_t pa = a.msb_position(), pb = b.msb_position();
        if (pa != pb) {
            int mag = pa < pb ? -1 : 1;
            return sa > 0 ? mag : -mag;
        }
        Dyadic d = a - b;
        return d.sign();
    }
    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.e_ == b.e_ && a.m_ == b.m_;
    }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

    friend Dyadic abs(const Dyadic& a) { return a.m_ < 0 ? -a : a; }
    friend const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
    friend const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

    /// Round to the grid 2^-prec, ties away from zero. |result - x| <= 2^-(prec+1).
    Dyadic round_to(std::int64_t prec) const {
        std::int64_t s = -prec - e_;
        if (is_zero() || s <= 0) return *this;
        if (s > detail::kMaxShiftBits + 64) return Dyadic();
        BigInt a = m_ < 0 ? BigInt(-m_) : m_;
        BigInt half = BigInt(1) << static_cast<unsigned>(s - 1);
        BigInt q = (a + half) >> static_cast<unsigned>(s);
        return Dyadic(m_ < 0 ? BigInt(-q) : q, -prec);
    }
    /// Largest multiple of 2^-prec that is <= x.
    Dyadic floor_to(std::int64_t prec) const {
        std::int64_t s = -prec - e_;
        if (is_zero() || s <= 0) return *this;
        return Dyadic(detail::floor_shr(m_, s), -prec);
    }
    /// Smallest multiple of 2^-prec that is >= x.
    Dyadic ceil_to(std::int64_t prec) const {
        std::int64_t s = -prec - e_;
        if (is_zero() || s <= 0) return *this;
        return Dyadic(detail::ceil_shr(m_, s), -prec);
    }

    /// Directed rounding that keeps at most ~(prec + 32) significant bits:
    /// the grid is 2^-prec for small values, relative for huge ones, so that
    /// enclosure endpoints never accumulate unbounded mantissas.
    Dyadic round_down_mixed(std::int64_t prec) const {
        return floor_to(mixed_grid(prec));
    }
    Dyadic round_up_mixed(std::int64_t prec) const {
        return ceil_to(mixed_grid(prec));
    }

    double to_double() const {
        if (is_zero()) return 0.0;
        std::int64_t bl = bit_length(m_);
        if (bl <= 62) {
            return static_cast<double>(m_.convert_to<long long>()) * std::ldexp(1.0, static_cast<int>(e_));
        }
        BigInt top = detail::floor_shr(m_ < 0 ? BigInt(-m_) : m_, bl - 62);
        double d = static_cast<double>(top.convert_to<long long>()) * std::ldexp(1.0, static_cast<int>(e_ + bl - 62));
        return m_ < 0 ? -d : d;
    }

    /// Canonical exact text form: "m" when the exponent is zero, else "m*2^e".
    std::string str() const {
        std::string s = m_.str();
        if (e_ != 0) {
            s += "*2^";
            s += std::to_string(e_);
        }
        return s;
    }

    /// Parses "m*2^e", plain integers, and decimal fractions whose value is
    /// exactly dyadic ("1.25"). Returns nullopt on malformed input or on a
    /// decimal that is not a dyadic rational (such as "0.1").
    static std::optional<Dyadic> parse(std::string_view text);

private:
    static std::int64_t checked_exp_add(std::int64_t a, std::int64_t b) {
        std::int64_t r = a + b;
        if (r > detail::kMaxExponent || r < -detail::kMaxExponent)
            throw overflow_error("dyadic: exponent out of range");
        return r;
    }

    std::int64_t mixed_grid(std::int64_t prec) const {
        if (is_zero()) return prec;
        std::int64_t rel = -(msb_position() - (prec + 32));
        return std::min(prec, rel > -detail::kMaxExponent ? rel : -detail::kMaxExponent);
    }

    void normalize() {
        if (m_.is_zero()) {
            e_ = 0;
            return;
        }
        unsigned tz = boost::multiprecision::lsb(m_ < 0 ? BigInt(-m_) : m_);
        if (tz > 0) {
            m_ >>= tz;
            e_ += tz;
        }
        if (e_ > detail::kMaxExponent || e_ < -detail::kMaxExponent)
            throw overflow_error("dyadic: exponent out of range");
    }

    BigInt m_;
    std::int64_t e_;
};

inline std::optional<Dyadic> Dyadic::parse(std::string_view text) {
    // Tolerate the typographic minus sign.
    std::string buf;
    buf.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x88 &&
            static_cast<unsigned char>(text[i + 2]) == 0x92) {
            buf += '-';
            i += 3;
        } else if (text[i] == ' ' || text[i] == '\t') {
            ++i;
        } else {
            buf += text[i];
            ++i;
        }
    }
    if (buf.empty()) return std::nullopt;

    auto parse_int = [](std::string_view s) -> std::optional<BigInt> {
        if (s.empty()) return std::nullopt;
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i >= s.size()) return std::nullopt;
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') return std::nullopt;
        try {
            BigInt v(std::string(s.substr(i)));
            return neg ? BigInt(-v) : v;
        } catch (...) {
            return std::nullopt;
        }
    };

    std::size_t star = buf.find("*2^");
    if (star != std::string::npos) {
        auto m = parse_int(std::string_view(buf).substr(0, star));
        auto e = parse_int(std::string_view(buf).substr(star + 3));
        if (!m || !e) return std::nullopt;
        if (*e > detail::kMaxExponent || *e < -detail::kMaxExponent) return std::nullopt;
        return Dyadic(*m, e->convert_to<std::int64_t>());
    }

    std::size_t dot = buf.find('.');
    if (dot == std::string::npos) {
        auto m = parse_int(buf);
        if (!m) return std::nullopt;
        return Dyadic(*m, 0);
    }

    std::string digits = buf.substr(0, dot) + buf.substr(dot + 1);
    std::size_t frac_len = buf.size() - dot - 1;
    if (frac_len == 0) return std::nullopt;
    auto m = parse_int(digits);
    if (!m) return std::nullopt;
    // value = m / 10^frac_len = m / (2^f * 5^f); dyadic iff 5^f divides m.
    BigInt five = boost::multiprecision::pow(BigInt(5), static_cast<unsigned>(frac_len));
    BigInt q, r;
    boost::multiprecision::divide_qr(*m, five, q, r);
    if (!r.is_zero()) return std::nullopt;
    return Dyadic(q, -static_cast<std::int64_t>(frac_len));
}

/// Round to the nearest multiple of 2^-prec; |result - x| <= 2^-prec and the
/// result is representable with exponent >= -prec.
inline Dyadic dyadic_round(const Dyadic& x, std::int64_t prec) {
    if (prec < 1) throw usage_error("dyadic_round: prec must be >= 1");
    return x.round_to(prec);
}

/// Certified bounds on sqrt(x) for x >= 0: lower <= sqrt(x) <= upper with
/// upper - lower <= 2^-prec.
inline Dyadic sqrt_upper(const Dyadic& x, std::int64_t prec) {
    if (x.sign() < 0) throw usage_error("sqrt_upper: negative argument");
    if (x.is_zero()) return Dyadic();
    std::int64_t s = prec + 2;
    std::int64_t shift = 2 * s + x.exponent();
    BigInt n = shift >= 0 ? detail::shl(x.mantissa(), shift)
                          : detail::floor_shr(x.mantissa(), -shift);
    BigInt r = boost::multiprecision::sqrt(n);
    if (shift >= 0 && r * r == n) return Dyadic(r, -s); // exact square
    return Dyadic(r + 1, -s);
}

inline Dyadic sqrt_lower(const Dyadic& x, std::int64_t prec) {
    if (x.sign() < 0) throw usage_error("sqrt_lower: negative argument");
    if (x.is_zero()) return Dyadic();
    std::int64_t s = prec + 2;
    std::int64_t shift = 2 * s + x.exponent();
    BigInt n = shift >= 0 ? detail::shl(x.mantissa(), shift)
                          : detail::floor_shr(x.mantissa(), -shift);
    BigInt r = boost::multiprecision::sqrt(n);
    return Dyadic(r, -s);
}

/// Directed quotients on the grid 2^-prec: div_lower <= a/b <= div_upper.
/// Requires b != 0.
inline Dyadic div_lower(const Dyadic& a, const Dyadic& b, std::int64_t prec) {
    if (b.is_zero()) throw usage_error("dyadic division by zero");
    // a/b = (ma/mb) * 2^(ea-eb); floor((ma << s) / mb) * 2^(ea-eb-s).
    std::int64_t s = prec + 2 + (a.exponent() - b.exponent());
    BigInt num = s >= 0 ? detail::shl(a.mantissa(), s) : a.mantissa();
    BigInt den = s >= 0 ? b.mantissa() : detail::shl(b.mantissa(), -s);
    if (den < 0) {
        num = -num;
        den = -den;
    }
    BigInt q, r;
    boost::multiprecision::divide_qr(num, den, q, r);
    if (!r.is_zero() && num < 0) q -= 1; // floor
    return Dyadic(q, -(prec + 2));
}

inline Dyadic div_upper(const Dyadic& a, const Dyadic& b, std::int64_t prec) {
    return -div_lower(-a, b, prec);
}

/// Exact complex number with dyadic components.
struct DyadicComplex {
    Dyadic re, im;

    DyadicComplex() = default;
    DyadicComplex(Dyadic r, Dyadic i) : re(std::move(r)), im(std::move(i)) {}

    friend DyadicComplex operator+(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend DyadicComplex operator-(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend DyadicComplex operator-(const DyadicComplex& a) { return {-a.re, -a.im}; }
    friend DyadicComplex operator*(const DyadicComplex& a, const DyadicComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const DyadicComplex& a, const DyadicComplex& b) {
        return a.re == b.re && a.im == b.im;
    }

    Dyadic norm2() const { return re * re + im * im; }

    /// (re, im) lexicographic order; the canonical certificate sort key.
    friend bool lex_less(const DyadicComplex& a, const DyadicComplex& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }

    std::string str() const {
        if (im.is_zero()) return re.str();
        std::string s = re.str();
        s += im.sign() < 0 ? "-" : "+";
        s += abs(im).str();
        s += "i";
        return s;
    }
};

} // namespace juliacert
