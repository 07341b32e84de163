#pragma once

#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include "juliacert/box.hpp"
#include "juliacert/transcendental.hpp"

namespace juliacert {

/// One oracle-queryable polynomial coefficient. Supported value classes:
/// exact dyadic complex numbers, exact rational complex numbers, and integer
/// multiples of the built-in golden-mean rotation lambda* = e^{2 pi i theta*}.
class Coefficient {
public:
    static Coefficient exact(DyadicComplex v) {
        Coefficient c;
        c.value_ = std::move(v);
        return c;
    }
    static Coefficient rational(BigInt re_num, BigInt re_den, BigInt im_num, BigInt im_den) {
        if (re_den.is_zero() || im_den.is_zero())
            throw usage_error("rational coefficient: zero denominator");
        if (re_den < 0) { re_num = -re_num; re_den = -re_den; }
        if (im_den < 0) { im_num = -im_num; im_den = -im_den; }
        Coefficient c;
        c.value_ = Rational{std::move(re_num), std::move(re_den),
                            std::move(im_num), std::move(im_den)};
        return c;
    }
    static Coefficient golden(BigInt scale = 1) {
        Coefficient c;
        c.value_ = Golden{std::move(scale)};
        return c;
    }

    bool is_golden() const { return std::holds_alternative<Golden>(value_); }
    bool is_exact_zero() const {
        if (auto* e = std::get_if<DyadicComplex>(&value_))
            return e->re.is_zero() && e->im.is_zero();
        if (auto* r = std::get_if<Rational>(&value_))
            return r->re_num.is_zero() && r->im_num.is_zero();
        return std::get<Golden>(value_).scale.is_zero();
    }

    std::optional<DyadicComplex> exact_value() const {
        if (auto* e = std::get_if<DyadicComplex>(&value_)) return *e;
        return std::nullopt;
    }

    /// Box of width <= 2^-prec per side containing the true value.
    ComplexBox enclosure(std::int64_t prec) const {
        if (auto* e = std::get_if<DyadicComplex>(&value_)) return ComplexBox::point(*e);
        if (auto* r = std::get_if<Rational>(&value_)) {
            Dyadic rn(r->re_num, 0), rd(r->re_den, 0), in(r->im_num, 0), id(r->im_den, 0);
            return ComplexBox(Interval(div_lower(rn, rd, prec + 1), div_upper(rn, rd, prec + 1)),
                              Interval(div_lower(in, id, prec + 1), div_upper(in, id, prec + 1)));
        }
        const auto& g = std::get<Golden>(value_);
        std::int64_t extra = bit_length(g.scale) + 2;
        ComplexBox lam = golden_lambda_enclosure(prec + extra);
        return ComplexBox(lam.re().scaled(Dyadic(g.scale, 0)), lam.im().scaled(Dyadic(g.scale, 0)));
    }

    Coefficient scaled_by_int(std::int64_t k) const {
        Coefficient c;
        if (auto* e = std::get_if<DyadicComplex>(&value_)) {
            c.value_ = DyadicComplex{e->re * Dyadic(k), e->im * Dyadic(k)};
        } else if (auto* r = std::get_if<Rational>(&value_)) {
            c.value_ = Rational{r->re_num * k, r->re_den, r->im_num * k, r->im_den};
        } else {
            c.value_ = Golden{std::get<Golden>(value_).scale * k};
        }
        return c;
    }

    std::string str() const {
        if (auto* e = std::get_if<DyadicComplex>(&value_)) return e->str();
        if (auto* r = std::get_if<Rational>(&value_)) {
            std::string s = r->re_num.str() + "/" + r->re_den.str();
            if (!r->im_num.is_zero()) {
                s += (r->im_num < 0 ? "-" : "+");
                BigInt a = r->im_num < 0 ? BigInt(-r->im_num) : r->im_num;
                s += a.str() + "/" + r->im_den.str() + "i";
            }
            return s;
        }
        const auto& g = std::get<Golden>(value_);
        if (g.scale == 1) return "golden";
        return g.scale.str() + "*golden";
    }

private:
    struct Rational {
        BigInt re_num, re_den, im_num, im_den;
    };
    struct Golden {
        BigInt scale;
    };
    Coefficient() = default;
    std::variant<DyadicComplex, Rational, Golden> value_;
};

struct Jet2 {
    ComplexBox f, f1, f2;
};

/// Polynomial with oracle-queried coefficients: any coefficient can be
/// enclosed to any requested precision, and evaluation over boxes returns
/// rigorous enclosures. Immutable and cheap to share.
///
/// Composed powers p^n carry an evaluation strategy that iterates the base
/// map; their dense coefficient form is expanded lazily and only when
/// coefficients are actually queried.
class PolynomialOracle {
public:
    explicit PolynomialOracle(std::vector<Coefficient> coeffs, std::string descriptor = "")
        : descriptor_(std::move(descriptor)) {
        if (coeffs.empty()) throw usage_error("polynomial: no coefficients");
        if (coeffs.size() > 1 && coeffs.back().is_exact_zero())
            throw usage_error("polynomial: leading coefficient is zero");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Dense;
        n->coeffs = std::move(coeffs);
        if (descriptor_.empty()) descriptor_ = rebuild_descriptor(n->coeffs);
        node_ = std::move(n);
    }

    std::int64_t degree() const {
        switch (node_->kind) {
            case Node::Kind::Dense:
                return static_cast<std::int64_t>(node_->coeffs.size()) - 1;
            case Node::Kind::Iterate:
                return pow_degree(base_degree(), node_->iters);
            case Node::Kind::ChainDeriv:
                return pow_degree(base_degree(), node_->iters) - 1;
        }
        return 0;
    }

    const std::string& descriptor() const { return descriptor_; }

    /// Enclosure of coefficient a_i with each side <= 2^-prec.
    ComplexBox coefficient(std::size_t i, std::int64_t prec) const {
        if (node_->kind == Node::Kind::Dense) {
            if (i >= node_->coeffs.size()) return ComplexBox();
            return node_->coeffs[i].enclosure(prec);
        }
        std::vector<ComplexBox> dense = expanded_dense(prec);
        if (i >= dense.size()) return ComplexBox();
        return dense[i];
    }

    /// Enclosure of p(x): contains p(z) for every z in x and every admissible
    /// coefficient value; rounding adds at most 2^-prec per side beyond the
    /// interval-arithmetic image.
    ComplexBox eval(const ComplexBox& x, std::int64_t prec) const {
        switch (node_->kind) {
            case Node::Kind::Dense:
                return eval_dense(node_->coeffs, x, prec);
            case Node::Kind::Iterate: {
                PolynomialOracle base = base_oracle();
                std::int64_t p = prec + 8;
                ComplexBox f = x;
                for (std::int64_t i = 0; i < node_->iters; ++i) f = base.eval(f, p);
                return f.rounded_out(prec);
            }
            case Node::Kind::ChainDeriv: {
                PolynomialOracle base = base_oracle();
                PolynomialOracle dbase = base.derivative();
                std::int64_t p = prec + 8;
                ComplexBox f = x;
                ComplexBox d = ComplexBox::point({Dyadic(1), Dyadic()});
                for (std::int64_t i = 0; i < node_->iters; ++i) {
                    d = box_mul(d, dbase.eval(f, p)).rounded_out(p);
                    f = base.eval(f, p);
                }
                return d.rounded_out(prec);
            }
        }
        return ComplexBox();
    }

    /// Derivative oracle. Coefficient queries are derived exactly from the
    /// base's ((i+1) * a_{i+1}); composed powers differentiate by the chain
    /// rule without expansion.
    PolynomialOracle derivative() const {
        switch (node_->kind) {
            case Node::Kind::Dense: {
                std::vector<Coefficient> d;
                for (std::size_t i = 1; i < node_->coeffs.size(); ++i)
                    d.push_back(node_->coeffs[i].scaled_by_int(static_cast<std::int64_t>(i)));
                return PolynomialOracle(trim_for_ctor(std::move(d)),
                                        "d/dz(" + descriptor_ + ")");
            }
            case Node::Kind::Iterate: {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::ChainDeriv;
                n->base = node_->base;
                n->iters = node_->iters;
                PolynomialOracle r;
                r.node_ = std::move(n);
                r.descriptor_ = "d/dz(" + descriptor_ + ")";
                return r;
            }
            case Node::Kind::ChainDeriv: {
                // differentiate the lazily expanded dense form
                std::vector<DyadicComplex> exact = expanded_exact();
                std::vector<Coefficient> d;
                for (std::size_t i = 1; i < exact.size(); ++i) {
                    DyadicComplex v{exact[i].re * Dyadic(static_cast<long long>(i)),
                                    exact[i].im * Dyadic(static_cast<long long>(i))};
                    d.push_back(Coefficient::exact(v));
                }
                return PolynomialOracle(trim_for_ctor(std::move(d)),
                                        "d/dz(" + descriptor_ + ")");
            }
        }
        throw usage_error("derivative: bad node");
    }

    /// True when every coefficient is an exact dyadic complex number.
    bool all_exact() const {
        const Node* n = node_.get();
        while (n->kind != Node::Kind::Dense) n = n->base.get();
        for (const auto& c : n->coeffs)
            if (!c.exact_value()) return false;
        return true;
    }

    /// Certified upper bound A >= max_i |a_i| of the dense form.
    Dyadic magnitude_bound() const {
        Dyadic a;
        std::int64_t d = degree();
        for (std::int64_t i = 0; i <= d; ++i)
            a = max(a, sqrt_upper(coefficient(static_cast<std::size_t>(i), 16).mag2_upper(), 16));
        return a;
    }

    /// Certified lower bound on |a_d| > 0; escalates precision as needed.
    Dyadic leading_lower_bound() const {
        std::size_t d = static_cast<std::size_t>(degree());
        for (std::int64_t prec = 16; prec <= 4096; prec *= 2) {
            ComplexBox c = coefficient(d, prec);
            Dyadic m2 = c.mag2_lower();
            if (m2.sign() > 0) return sqrt_lower(m2, prec);
        }
        throw usage_error("polynomial: leading coefficient not separated from zero");
    }

    friend PolynomialOracle iterate_map_poly(const PolynomialOracle& p, std::int64_t n,
                                             std::int64_t degree_cap);
    friend Jet2 eval_jet2(const PolynomialOracle& p, const ComplexBox& x, std::int64_t n,
                          std::int64_t prec);

private:
    struct Node {
        enum class Kind { Dense, Iterate, ChainDeriv };
        Kind kind = Kind::Dense;
        std::vector<Coefficient> coeffs;
        std::shared_ptr<const Node> base;
        std::int64_t iters = 0;

        mutable std::mutex mu;
        mutable bool exact_ready = false;
        mutable std::vector<DyadicComplex> exact_dense;
        mutable std::int64_t encl_prec = -1;
        mutable std::vector<ComplexBox> encl_dense;
    };

    PolynomialOracle() = default;

    static std::vector<Coefficient> trim_for_ctor(std::vector<Coefficient> v) {
        while (v.size() > 1 && v.back().is_exact_zero()) v.pop_back();
        if (v.empty()) v.push_back(Coefficient::exact({Dyadic(), Dyadic()}));
        return v;
    }

    std::int64_t base_degree() const {
        return static_cast<std::int64_t>(node_->base->coeffs.size()) - 1;
    }

    PolynomialOracle base_oracle() const {
        PolynomialOracle b;
        b.node_ = node_->base;
        b.descriptor_ = "base";
        return b;
    }

    static std::int64_t pow_degree(std::int64_t d, std::int64_t n) {
        std::int64_t r = 1;
        for (std::int64_t i = 0; i < n; ++i) {
            if (r > (std::int64_t(1) << 40) / std::max<std::int64_t>(d, 1))
                throw resource_error("iterate_map_poly: degree cap exceeded");
            r *= d;
        }
        return r;
    }

    static std::string rebuild_descriptor(const std::vector<Coefficient>& cs) {
        std::string s;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (i) s += ",";
            s += cs[i].str();
        }
        return s;
    }

    static ComplexBox eval_dense(const std::vector<Coefficient>& cs, const ComplexBox& x,
                                 std::int64_t prec) {
        std::size_t d = cs.size() - 1;
        std::int64_t p = prec + 10 + bit_length(BigInt(d + 1));
        // power table with dependent squaring where possible
        std::vector<ComplexBox> pw(d + 1);
        pw[0] = ComplexBox::point({Dyadic(1), Dyadic()});
        if (d >= 1) pw[1] = x.rounded_out(p);
        for (std::size_t i = 2; i <= d; ++i) {
            pw[i] = (i % 2 == 0) ? box_sqr(pw[i / 2]).rounded_out(p)
                                 : box_mul(pw[i - 1], pw[1]).rounded_out(p);
        }
        ComplexBox acc;
        bool first = true;
        for (std::size_t i = 0; i <= d; ++i) {
            if (cs[i].is_exact_zero()) continue;
            ComplexBox term = box_mul(cs[i].enclosure(p), pw[i]).rounded_out(p);
            acc = first ? term : (acc + term);
            first = false;
        }
        if (first) acc = ComplexBox(); // zero polynomial
        return acc.rounded_out(prec);
    }

    // ---- lazy dense expansion of composed nodes ----

    static std::vector<DyadicComplex> compose_exact(const std::vector<DyadicComplex>& outer,
                                                    const std::vector<DyadicComplex>& inner) {
        // Horner in the polynomial ring: R = ((a_d * Q + a_{d-1}) * Q + ...)
        std::vector<DyadicComplex> r{outer.back()};
        for (std::size_t i = outer.size() - 1; i-- > 0;) {
            std::vector<DyadicComplex> nr(r.size() + inner.size() - 1,
                                          DyadicComplex{Dyadic(), Dyadic()});
            for (std::size_t a = 0; a < r.size(); ++a)
                for (std::size_t b = 0; b < inner.size(); ++b)
                    nr[a + b] = nr[a + b] + r[a] * inner[b];
            nr[0] = nr[0] + outer[i];
            r = std::move(nr);
        }
        return r;
    }

    static std::vector<ComplexBox> compose_encl(const std::vector<ComplexBox>& outer,
                                                const std::vector<ComplexBox>& inner,
                                                std::int64_t p) {
        std::vector<ComplexBox> r{outer.back()};
        for (std::size_t i = outer.size() - 1; i-- > 0;) {
            std::vector<ComplexBox> nr(r.size() + inner.size() - 1);
            for (std::size_t a = 0; a < r.size(); ++a)
                for (std::size_t b = 0; b < inner.size(); ++b)
                    nr[a + b] = (nr[a + b] + box_mul(r[a], inner[b])).rounded_out(p);
            nr[0] = (nr[0] + outer[i]).rounded_out(p);
            r = std::move(nr);
        }
        return r;
    }

    std::vector<DyadicComplex> expanded_exact() const {
        const Node* n = node_.get();
        const Node* dense = n->base ? n->base.get() : n;
        std::vector<DyadicComplex> base;
        for (const auto& c : dense->coeffs) {
            auto v = c.exact_value();
            if (!v)
                throw usage_error(
                    "dense expansion of a composed map requires exact dyadic coefficients");
            base.push_back(*v);
        }
        std::lock_guard lk(n->mu);
        if (!n->exact_ready) {
            std::vector<DyadicComplex> r{
                DyadicComplex{Dyadic(), Dyadic()}, DyadicComplex{Dyadic(1), Dyadic()}}; // z
            for (std::int64_t i = 0; i < n->iters; ++i) r = compose_exact(base, r);
            if (n->kind == Node::Kind::ChainDeriv) {
                std::vector<DyadicComplex> d;
                for (std::size_t i = 1; i < r.size(); ++i)
                    d.push_back(DyadicComplex{r[i].re * Dyadic(static_cast<long long>(i)),
                                              r[i].im * Dyadic(static_cast<long long>(i))});
                r = std::move(d);
            }
            n->exact_dense = std::move(r);
            n->exact_ready = true;
        }
        return n->exact_dense;
    }

    std::vector<ComplexBox> expanded_dense(std::int64_t prec) const {
        const Node* n = node_.get();
        {
            std::lock_guard lk(n->mu);
            if (n->encl_prec >= prec) return n->encl_dense;
        }
        std::vector<ComplexBox> result;
        bool exact_ok = true;
        for (const auto& c : n->base->coeffs)
            if (!c.exact_value()) exact_ok = false;
        if (exact_ok) {
            for (const auto& v : expanded_exact()) result.push_back(ComplexBox::point(v));
        } else {
            // interval composition with escalating working precision
            for (std::int64_t p = prec + 32;; p *= 2) {
                if (p > (std::int64_t(1) << 18))
                    throw resource_error("iterate_map_poly: coefficient precision escalation cap");
                std::vector<ComplexBox> base;
                for (const auto& c : n->base->coeffs) base.push_back(c.enclosure(p));
                std::vector<ComplexBox> r{
                    ComplexBox::point({Dyadic(), Dyadic()}),
                    ComplexBox::point({Dyadic(1), Dyadic()})};
                for (std::int64_t i = 0; i < n->iters; ++i) r = compose_encl(base, r, p);
                if (n->kind == Node::Kind::ChainDeriv) {
                    std::vector<ComplexBox> d;
                    for (std::size_t i = 1; i < r.size(); ++i)
                        d.push_back(r[i].scaled(Dyadic(static_cast<long long>(i))));
                    r = std::move(d);
                }
                Dyadic w;
                for (const auto& b : r) w = max(w, b.max_side());
                if (w <= Dyadic::pow2(-prec)) {
                    result = std::move(r);
                    break;
                }
            }
        }
        std::lock_guard lk(n->mu);
        if (n->encl_prec < prec) {
            n->encl_dense = result;
            n->encl_prec = prec;
        }
        return result;
    }

    std::shared_ptr<const Node> node_;
    std::string descriptor_;
};

/// p(x) enclosure; thin named wrapper for the module surface.
inline ComplexBox eval_enclosure(const PolynomialOracle& p, const ComplexBox& x,
                                 std::int64_t prec) {
    if (prec < 1) throw usage_error("eval_enclosure: prec must be >= 1");
    return p.eval(x, prec);
}

/// Oracle for the n-fold composition p^n (degree d^n). Formed lazily: the
/// evaluation strategy iterates p; dense coefficients are expanded only when
/// queried.
inline PolynomialOracle iterate_map_poly(const PolynomialOracle& p, std::int64_t n,
                                         std::int64_t degree_cap = std::int64_t(1) << 16) {
    if (n < 1) throw usage_error("iterate_map_poly: n must be >= 1");
    if (p.node_->kind != PolynomialOracle::Node::Kind::Dense)
        throw usage_error("iterate_map_poly: base must be a plain polynomial");
    if (n == 1) return p;
    std::int64_t dn = 1, d = p.degree();
    for (std::int64_t i = 0; i < n; ++i) {
        if (d != 0 && dn > degree_cap / std::max<std::int64_t>(d, 1))
            throw resource_error("iterate_map_poly: degree cap exceeded");
        dn *= d;
    }
    auto node = std::make_shared<PolynomialOracle::Node>();
    node->kind = PolynomialOracle::Node::Kind::Iterate;
    node->base = p.node_;
    node->iters = n;
    PolynomialOracle r;
    r.node_ = std::move(node);
    r.descriptor_ = "(" + p.descriptor() + ")^" + std::to_string(n);
    return r;
}

/// Escape verdict: the whole box enclosure left the closed disk of radius b
/// at iterate j (the smallest such index, counting the input box as j = 0).
struct Escaped {
    std::int64_t step;
};

using IterateResult = std::variant<ComplexBox, Escaped>;

/// Enclosure of p^k over x, or a certified escape verdict for radius b.
inline IterateResult iterate_enclosure(const PolynomialOracle& p, const ComplexBox& x,
                                       std::int64_t k, std::int64_t prec, const Dyadic& b) {
    if (k < 1) throw usage_error("iterate_enclosure: k must be >= 1");
    Dyadic b2 = b * b;
    std::int64_t pr = prec + 8;
    ComplexBox f = x;
    for (std::int64_t j = 0;; ++j) {
        if (f.mag2_lower() > b2) return Escaped{j};
        if (j == k) break;
        f = p.eval(f, pr);
    }
    return f.rounded_out(prec);
}

/// Jets (p^n, (p^n)', (p^n)'') over x by the iterated chain/product rule.
inline Jet2 eval_jet2(const PolynomialOracle& p, const ComplexBox& x, std::int64_t n,
                      std::int64_t prec) {
    PolynomialOracle dp = p.derivative();
    PolynomialOracle ddp = dp.derivative();
    std::int64_t pr = prec + 8;
    ComplexBox f = x;
    ComplexBox f1 = ComplexBox::point({Dyadic(1), Dyadic()});
    ComplexBox f2 = ComplexBox::point({Dyadic(), Dyadic()});
    for (std::int64_t i = 0; i < n; ++i) {
        ComplexBox d1 = dp.eval(f, pr);
        ComplexBox d2 = ddp.eval(f, pr);
        f2 = (box_mul(d2, box_sqr(f1)) + box_mul(d1, f2)).rounded_out(pr);
        f1 = box_mul(d1, f1).rounded_out(pr);
        f = p.eval(f, pr);
    }
    return {f.rounded_out(prec), f1.rounded_out(prec), f2.rounded_out(prec)};
}

/// The coefficient-derived escape bound b = max(1, (2 + sum_{i<d} |a_i|) / |a_d|),
/// rounded up to the 2^-4 grid. For |z| >= b the growth |p(z)| >= 2|z| holds.
inline Dyadic coefficient_escape_bound(const PolynomialOracle& p) {
    std::int64_t d = p.degree();
    if (d < 2) throw usage_error("escape bound: degree must be >= 2");
    Dyadic lead_lo = p.leading_lower_bound();
    Dyadic sum(2);
    for (std::int64_t i = 0; i < d; ++i)
        sum += sqrt_upper(p.coefficient(static_cast<std::size_t>(i), 16).mag2_upper(), 16);
    Dyadic b = max(Dyadic(1), div_upper(sum, lead_lo, 8).ceil_to(4));
    // re-verify the triangle-estimate growth inequality: b*|a_d| >= 2 + sum|a_i|
    if (b * lead_lo < sum)
        throw resource_error("escape bound: growth inequality failed to certify");
    return b;
}

// ---- polynomial input grammar ----
// Comma-separated a_0,...,a_d; each coefficient "re", "re+imi" or "re-imi",
// parts dyadic ("-2", "0.5") or rational ("p/q"), or the keyword "golden"
// (usable only as a_1 of a degree-2 map).

namespace detail {

struct RealPart {
    bool is_rational = false;
    Dyadic dy;
    BigInt num, den;
};

inline std::optional<RealPart> parse_real_part(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::size_t slash = s.find('/');
    if (slash != std::string_view::npos) {
        auto num = Dyadic::parse(s.substr(0, slash));
        auto den = Dyadic::parse(s.substr(slash + 1));
        if (!num || !den || num->exponent() < 0 || den->exponent() < 0) return std::nullopt;
        if (den->is_zero()) return std::nullopt;
        RealPart r;
        BigInt n = num->mantissa() << static_cast<unsigned>(num->exponent());
        BigInt dd = den->mantissa() << static_cast<unsigned>(den->exponent());
        if (dd < 0) { n = -n; dd = -dd; }
        // power-of-two denominators are exactly dyadic
        if (dd == (BigInt(1) << boost::multiprecision::lsb(dd))) {
            r.is_rational = false;
            r.dy = Dyadic(n, -static_cast<std::int64_t>(boost::multiprecision::lsb(dd)));
        } else {
            r.is_rational = true;
            r.num = n;
            r.den = dd;
        }
        return r;
    }
    if (auto dy = Dyadic::parse(s)) {
        RealPart r;
        r.dy = *dy;
        return r;
    }
    // non-dyadic decimal like "0.1": retry as an exact rational p/10^k
    std::string buf(s);
    std::size_t dot = buf.find('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string digits = buf.substr(0, dot) + buf.substr(dot + 1);
    auto m = Dyadic::parse(digits);
    if (!m || m->exponent() < 0) return std::nullopt;
    RealPart r;
    r.is_rational = true;
    r.num = m->mantissa() << static_cast<unsigned>(m->exponent());
    r.den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(buf.size() - dot - 1));
    return r;
}

inline std::optional<Coefficient> parse_coefficient_token(std::string_view raw) {
    std::string s;
    for (std::size_t i = 0; i < raw.size();) {
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x88 &&
            static_cast<unsigned char>(raw[i + 2]) == 0x92) {
            s += '-';
            i += 3;
        } else if (raw[i] != ' ' && raw[i] != '\t') {
            s += raw[i];
            ++i;
        } else {
            ++i;
        }
    }
    if (s.empty()) return std::nullopt;
    if (s == "golden") return Coefficient::golden();

    // split into real and imaginary tokens
    std::string re_tok, im_tok;
    bool has_im = !s.empty() && s.back() == 'i';
    if (has_im) {
        std::string body = s.substr(0, s.size() - 1);
        std::size_t split = std::string::npos;
        for (std::size_t i = body.size(); i-- > 1;) {
            if ((body[i] == '+' || body[i] == '-') && body[i - 1] != '/' && body[i - 1] != '+' &&
                body[i - 1] != '-') {
                split = i;
                break;
            }
        }
        if (split == std::string::npos) {
            re_tok = "0";
            im_tok = body;
        } else {
            re_tok = body.substr(0, split);
            im_tok = body.substr(split);
        }
        if (im_tok.empty() || im_tok == "+") im_tok = "1";
        if (im_tok == "-") im_tok = "-1";
    } else {
        re_tok = s;
        im_tok = "0";
    }

    auto re = parse_real_part(re_tok);
    auto im = parse_real_part(im_tok);
    if (!re || !im) return std::nullopt;
    if (!re->is_rational && !im->is_rational)
        return Coefficient::exact({re->dy, im->dy});
    auto to_rat = [](const RealPart& r, BigInt& num, BigInt& den) {
        if (r.is_rational) {
            num = r.num;
            den = r.den;
        } else if (r.dy.exponent() >= 0) {
            num = r.dy.mantissa() << static_cast<unsigned>(r.dy.exponent());
            den = 1;
        } else {
            num = r.dy.mantissa();
            den = BigInt(1) << static_cast<unsigned>(-r.dy.exponent());
        }
    };
    BigInt rn, rd, in, id;
    to_rat(*re, rn, rd);
    to_rat(*im, in, id);
    return Coefficient::rational(rn, rd, in, id);
}

} // namespace detail

/// Parses the CLI polynomial grammar. Throws usage_error listing every
/// violation found.
inline PolynomialOracle parse_polynomial(std::string_view text) {
    std::vector<std::string> problems;
    std::vector<Coefficient> coeffs;
    std::size_t start = 0;
    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            tokens.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto c = detail::parse_coefficient_token(tokens[i]);
        if (!c) {
            problems.push_back("malformed coefficient a_" + std::to_string(i) + ": '" +
                               std::string(tokens[i]) + "'");
            continue;
        }
        coeffs.push_back(*c);
    }
    if (problems.empty()) {
        if (coeffs.size() < 3)
            problems.push_back("polynomial must have degree >= 2 (need at least 3 coefficients)");
        else if (coeffs.back().is_exact_zero())
            problems.push_back("leading coefficient must be nonzero");
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i].is_golden() && !(i == 1 && coeffs.size() == 3))
                problems.push_back(
                    "'golden' is usable only as a_1 of a degree-2 map (z^2 + golden*z)");
        }
    }
    if (!problems.empty()) throw usage_error(problems);
    std::string desc;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i) desc += ",";
        desc += coeffs[i].str();
    }
    return PolynomialOracle(std::move(coeffs), desc);
}

} // namespace juliacert
