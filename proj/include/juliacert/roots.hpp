#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "juliacert/polynomial.hpp"

namespace juliacert {

/// Isolating box with the number of roots (with multiplicity) it contains.
struct RootBox {
    ComplexBox box;
    std::int64_t count = 0;
};

enum class OrbitKind { Repelling, Attracting };

/// Machine-checkable periodic-orbit certificate. With Q = p^period,
/// r = approx, rho = iso_radius and M = second_deriv_bound, the recorded
/// inequality |Q'(r)| > 1 + rho*M (Repelling) or |Q'(r)| < 1 - rho*M
/// (Attracting) pins |Q'(alpha)| on the true root alpha with |r - alpha|
/// <= rho; deriv_bound is the resulting certified bound on |Q'(alpha)|.
struct OrbitCertificate {
    OrbitKind kind = OrbitKind::Repelling;
    std::int64_t period = 1;
    DyadicComplex approx;
    Dyadic iso_radius;
    Dyadic deriv_bound;
    Dyadic second_deriv_bound;
};

struct Unresolved {
    enum class Reason { Multiple, Budget };
    Reason reason = Reason::Budget;
    std::int64_t last_prec = 0;
};

using Classification = std::variant<OrbitCertificate, Unresolved>;

/// Disk around an attracting periodic point with certified p^period(U) inside U.
struct TrapDisk {
    DyadicComplex center;
    Dyadic radius;
    std::int64_t period = 1;
};

// ---- analytic targets for the root engine ----

/// Plain polynomial target.
struct PolyTarget {
    PolynomialOracle q, dq;
    explicit PolyTarget(const PolynomialOracle& poly) : q(poly), dq(poly.derivative()) {}
    ComplexBox eval(const ComplexBox& x, std::int64_t prec) const { return q.eval(x, prec); }
    ComplexBox eval_deriv(const ComplexBox& x, std::int64_t prec) const {
        return dq.eval(x, prec);
    }
};

/// Target q(z) = p^n(z) - z, evaluated by iterating p (no expansion).
struct PeriodicTarget {
    PolynomialOracle p, dp;
    std::int64_t n;
    PeriodicTarget(const PolynomialOracle& poly, std::int64_t period)
        : p(poly), dp(poly.derivative()), n(period) {}
    ComplexBox eval(const ComplexBox& x, std::int64_t prec) const {
        std::int64_t pr = prec + 8;
        ComplexBox f = x;
        for (std::int64_t i = 0; i < n; ++i) f = p.eval(f, pr);
        return (f - x).rounded_out(prec);
    }
    ComplexBox eval_deriv(const ComplexBox& x, std::int64_t prec) const {
        std::int64_t pr = prec + 8;
        ComplexBox f = x;
        ComplexBox d = ComplexBox::point({Dyadic(1), Dyadic()});
        for (std::int64_t i = 0; i < n; ++i) {
            d = box_mul(d, dp.eval(f, pr)).rounded_out(pr);
            f = p.eval(f, pr);
        }
        return (d - ComplexBox::point({Dyadic(1), Dyadic()})).rounded_out(prec);
    }
};

// ---- certified winding number along a box boundary ----
//
// The boundary is split into arcs until the image enclosure of every arc
// excludes zero. A rectangle avoiding zero lies strictly in one of the four
// half-planes, so the argument cannot wrap within an arc; the winding number
// is then the signed count of crossings of the ray (-inf, 0), read off the
// half-plane pattern of consecutive arcs. Everything is exact comparisons,
// no transcendental functions.

struct WindingOptions {
    std::int64_t prec = 64;
    std::size_t max_arcs = 8192;
    std::int64_t min_rel_depth = 26; // arcs no shorter than side * 2^-depth
};

namespace detail {

struct BoundaryArc {
    bool left;  // image enclosure strictly in re < 0
    bool impos; // strictly in im > 0
    bool imneg; // strictly in im < 0
    bool repos; // strictly in re > 0
};

template <typename Target>
bool collect_edge_arcs(const Target& q, const DyadicComplex& a, const DyadicComplex& b,
                       const WindingOptions& opt, const Dyadic& min_len,
                       std::vector<BoundaryArc>& out) {
    // explicit stack, preserving traversal order a -> b
    std::vector<std::pair<DyadicComplex, DyadicComplex>> stack{{a, b}};
    std::vector<std::pair<DyadicComplex, DyadicComplex>> tmp;
    while (!stack.empty()) {
        auto [u, v] = stack.back();
        stack.pop_back();
        ComplexBox seg(min(u.re, v.re), max(u.re, v.re), min(u.im, v.im), max(u.im, v.im));
        ComplexBox img = q.eval(seg, opt.prec);
        BoundaryArc arc;
        arc.left = img.re_hi().sign() < 0;
        arc.repos = img.re_lo().sign() > 0;
        arc.impos = img.im_lo().sign() > 0;
        arc.imneg = img.im_hi().sign() < 0;
        if (arc.left || arc.repos || arc.impos || arc.imneg) {
            out.push_back(arc);
            if (out.size() > opt.max_arcs) return false;
            continue;
        }
        Dyadic len = max(seg.width_re(), seg.width_im());
        if (len <= min_len) return false;
        DyadicComplex mid{Dyadic((u.re + v.re).mantissa(), (u.re + v.re).exponent() - 1),
                          Dyadic((u.im + v.im).mantissa(), (u.im + v.im).exponent() - 1)};
        // push second half first so the first half is processed next
        stack.push_back({mid, v});
        stack.push_back({u, mid});
    }
    return true;
}

} // namespace detail

/// Number of zeros of q (with multiplicity) inside the box, or nullopt when
/// the boundary refinement budget is exhausted (zero on or near the
/// boundary, or precision too low).
template <typename Target>
std::optional<std::int64_t> winding_number(const Target& q, const ComplexBox& box,
                                           const WindingOptions& opt = {}) {
    DyadicComplex bl{box.re_lo(), box.im_lo()}, br{box.re_hi(), box.im_lo()};
    DyadicComplex tr{box.re_hi(), box.im_hi()}, tl{box.re_lo(), box.im_hi()};
    Dyadic min_len = box.max_side() * Dyadic::pow2(-opt.min_rel_depth);
    std::vector<detail::BoundaryArc> arcs;
    if (!detail::collect_edge_arcs(q, bl, br, opt, min_len, arcs)) return std::nullopt;
    if (!detail::collect_edge_arcs(q, br, tr, opt, min_len, arcs)) return std::nullopt;
    if (!detail::collect_edge_arcs(q, tr, tl, opt, min_len, arcs)) return std::nullopt;
    if (!detail::collect_edge_arcs(q, tl, bl, opt, min_len, arcs)) return std::nullopt;

    std::size_t n = arcs.size();
    bool any_left = false, all_left = true;
    for (const auto& a : arcs) {
        any_left |= a.left;
        all_left &= a.left;
    }
    if (!any_left || all_left) return 0; // image confined to a half-plane

    std::int64_t winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!arcs[i].left) continue;
        std::size_t prev = (i + n - 1) % n;
        if (arcs[prev].left) continue; // not the start of a run
        // walk to the end of the run
        std::size_t j = i;
        while (arcs[(j + 1) % n].left) j = (j + 1) % n;
        std::size_t next = (j + 1) % n;
        // the shared endpoints' imaginary signs come from the neighbor arcs;
        // a neighbor confined to re > 0 cannot adjoin a left arc
        const auto& pin = arcs[prev];
        const auto& pout = arcs[next];
        if ((!pin.impos && !pin.imneg) || (!pout.impos && !pout.imneg)) return std::nullopt;
        winding += (pout.imneg ? 1 : 0) - (pin.imneg ? 1 : 0);
    }
    if (winding < 0) return std::nullopt; // analytic maps cannot wind backwards
    return winding;
}

// ---- quadtree isolation with interval-Newton refinement ----

namespace detail {

inline bool diam_at_most(const ComplexBox& b, const Dyadic& eps) {
    Dyadic wr = b.width_re(), wi = b.width_im();
    return wr * wr + wi * wi <= eps * eps;
}

template <typename Target>
std::optional<std::int64_t> winding_ladder(const Target& q, const ComplexBox& box) {
    for (std::int64_t prec : {48, 96, 192, 384, 768}) {
        WindingOptions opt;
        opt.prec = prec;
        if (auto w = winding_number(q, box, opt)) return w;
    }
    return std::nullopt;
}

// One interval-Newton contraction pass; returns the refined box or nullopt
// when the derivative enclosure meets zero / no progress is possible.
template <typename Target>
std::optional<ComplexBox> newton_refine(const Target& q, ComplexBox x, const Dyadic& eps) {
    std::int64_t prec = 96;
    for (int iter = 0; iter < 80; ++iter) {
        if (diam_at_most(x, Dyadic(eps.mantissa(), eps.exponent() - 2))) return x;
        ComplexBox d = q.eval_deriv(x, prec);
        if (d.mag2_lower().sign() <= 0) {
            if (prec >= 1024) return std::nullopt;
            prec *= 2;
            continue;
        }
        DyadicComplex m = x.midpoint();
        ComplexBox fm = q.eval(ComplexBox::point(m), prec);
        ComplexBox nbox = ComplexBox::point(m) - box_div(fm, d, prec);
        if (!intersects(nbox, x)) return std::nullopt;
        ComplexBox nx = intersect(nbox, x);
        Dyadic before = x.max_side(), after = nx.max_side();
        x = nx;
        if (after + after > before) { // slow progress; escalate precision
            if (prec >= 4096) {
                if (diam_at_most(x, eps)) return x;
                return std::nullopt;
            }
            prec *= 2;
        }
    }
    return diam_at_most(x, eps) ? std::optional<ComplexBox>(x) : std::nullopt;
}

// Subdivision continues below eps where it still helps: a count-1 box keeps
// splitting until interval Newton can exclude zero from the derivative
// enclosure (simple roots always separate), and clustered count >= 2 boxes
// get a bounded number of extra splits to tell close pairs from true
// multiple roots.
template <typename Target>
void isolate_rec(const Target& q, const ComplexBox& box, const Dyadic& eps,
                 std::vector<RootBox>& out, int depth_guard, int below_eps_extra) {
    auto w = winding_ladder(q, box);
    if (!w)
        throw boundary_ambiguity_error(
            "root isolation: a root sits on or near a subdivision boundary");
    if (*w == 0) return;
    bool small = diam_at_most(box, eps);
    if (*w == 1) {
        if (auto refined = newton_refine(q, box, eps)) {
            out.push_back({*refined, 1});
            return;
        }
        if (depth_guard <= 0) {
            if (small) {
                out.push_back({box, 1});
                return;
            }
            throw resource_error("root isolation: subdivision depth exhausted");
        }
    } else if (small && below_eps_extra <= 0) {
        out.push_back({box, *w}); // cluster or genuine multiple root
        return;
    } else if (depth_guard <= 0) {
        throw resource_error("root isolation: subdivision depth exhausted");
    }
    DyadicComplex m = box.midpoint();
    ComplexBox q1(box.re_lo(), m.re, box.im_lo(), m.im);
    ComplexBox q2(m.re, box.re_hi(), box.im_lo(), m.im);
    ComplexBox q3(box.re_lo(), m.re, m.im, box.im_hi());
    ComplexBox q4(m.re, box.re_hi(), m.im, box.im_hi());
    int extra = small ? below_eps_extra - 1 : below_eps_extra;
    isolate_rec(q, q1, eps, out, depth_guard - 1, extra);
    isolate_rec(q, q2, eps, out, depth_guard - 1, extra);
    isolate_rec(q, q3, eps, out, depth_guard - 1, extra);
    isolate_rec(q, q4, eps, out, depth_guard - 1, extra);
}

} // namespace detail

/// Isolates all roots of the target inside the region: disjoint boxes of
/// diameter <= eps, each counting >= 1 root with multiplicity, counts summing
/// to the region's root count. Throws boundary_ambiguity_error when a root
/// lies (numerically) on the region or subdivision boundary.
template <typename Target>
std::vector<RootBox> isolate_roots_target(const Target& q, const ComplexBox& region,
                                          const Dyadic& eps) {
    if (eps.sign() <= 0) throw usage_error("isolate_roots: eps must be positive");
    std::vector<RootBox> out;
    detail::isolate_rec(q, region, eps, out, 80, 30);
    std::sort(out.begin(), out.end(), [](const RootBox& a, const RootBox& b) {
        return lex_less(a.box.midpoint(), b.box.midpoint());
    });
    return out;
}

/// Certified isolation of the roots of a polynomial oracle.
inline std::vector<RootBox> isolate_roots(const PolynomialOracle& q, const ComplexBox& region,
                                          const Dyadic& eps) {
    return isolate_roots_target(PolyTarget(q), region, eps);
}

// ---- classification ----

/// Repelling/attracting certificate for the single simple root of
/// p^n(z) = z isolated by the root box, or Unresolved. Neutral multipliers
/// (|Q'| = 1) cannot certify and exhaust the budget by design; boxes with
/// multiplicity > 1 are reported Unresolved(Multiple) without retrying.
inline Classification classify_periodic(const PolynomialOracle& p, std::int64_t n,
                                        const RootBox& root, int budget = 8) {
    if (root.count != 1) return Unresolved{Unresolved::Reason::Multiple, 0};
    PeriodicTarget target(p, n);
    ComplexBox x = root.box;
    std::int64_t prec = 64;
    for (int attempt = 0; attempt <= budget; ++attempt) {
        Jet2 over_box = eval_jet2(p, x, n, prec);
        Dyadic big_m = sqrt_upper(over_box.f2.mag2_upper(), 32);
        DyadicComplex r = x.midpoint();
        Jet2 at_r = eval_jet2(p, ComplexBox::point(r), n, prec);
        Dyadic hw_re(x.width_re().mantissa(), x.width_re().exponent() - 1);
        Dyadic hw_im(x.width_im().mantissa(), x.width_im().exponent() - 1);
        Dyadic rho = sqrt_upper(hw_re * hw_re + hw_im * hw_im, 48);
        Dyadic l_lo = sqrt_lower(at_r.f1.mag2_lower(), 48);
        Dyadic u_hi = sqrt_upper(at_r.f1.mag2_upper(), 48);
        Dyadic slack = rho * big_m;
        if (l_lo > Dyadic(1) + slack)
            return OrbitCertificate{OrbitKind::Repelling, n, r, rho, l_lo - slack, big_m};
        if (u_hi + slack < Dyadic(1))
            return OrbitCertificate{OrbitKind::Attracting, n, r, rho, u_hi + slack, big_m};
        // shrink the box with one Newton step and retry sharper
        ComplexBox d = (over_box.f1 - ComplexBox::point({Dyadic(1), Dyadic()}));
        if (d.mag2_lower().sign() > 0) {
            ComplexBox fr = (at_r.f - ComplexBox::point(r)).rounded_out(prec);
            ComplexBox nbox = ComplexBox::point(r) - box_div(fr, d, prec);
            if (intersects(nbox, x)) x = intersect(nbox, x);
        }
        prec *= 2;
    }
    return Unresolved{Unresolved::Reason::Budget, prec};
}

/// Re-runs the certificate inequality from the stored fields with fresh
/// certified enclosures.
inline bool verify_certificate(const PolynomialOracle& p, const OrbitCertificate& cert,
                               std::int64_t prec = 128) {
    ComplexBox x = ComplexBox::square(cert.approx, cert.iso_radius);
    Jet2 over_box = eval_jet2(p, x, cert.period, prec);
    Dyadic big_m = sqrt_upper(over_box.f2.mag2_upper(), 32);
    Jet2 at_r = eval_jet2(p, ComplexBox::point(cert.approx), cert.period, prec);
    Dyadic slack = cert.iso_radius * big_m;
    if (cert.kind == OrbitKind::Repelling) {
        Dyadic l_lo = sqrt_lower(at_r.f1.mag2_lower(), 48);
        return l_lo > Dyadic(1) + slack;
    }
    Dyadic u_hi = sqrt_upper(at_r.f1.mag2_upper(), 48);
    return u_hi + slack < Dyadic(1);
}

// ---- period census and deduplicated enumeration ----

/// Incremental registry of isolated periodic points, deduplicated across
/// divisor periods by isolation-box intersection (smallest period wins).
/// Drives both enumerate_repelling and the render loop's period schedule.
class CertificateStore {
public:
    CertificateStore(PolynomialOracle p, Dyadic eps, ComplexBox region)
        : p_(std::move(p)), eps_(std::move(eps)), region_(std::move(region)) {}

    struct Entry {
        RootBox root;
        std::int64_t period;
        Classification cls;
    };
    struct PeriodCensus {
        std::int64_t period = 0;
        std::int64_t total_multiplicity = 0; // over the whole region, before dedup
        std::size_t boxes = 0;
    };

    /// Isolates and classifies the solutions of p^n(z) = z; idempotent.
    void add_period(std::int64_t n) {
        if (done_.count(n)) return;
        PeriodicTarget target(p_, n);
        std::vector<RootBox> roots = isolate_with_retry(target);
        PeriodCensus census;
        census.period = n;
        census.boxes = roots.size();
        for (const auto& rb : roots) census.total_multiplicity += rb.count;
        for (const auto& rb : roots) {
            bool duplicate = false;
            for (const auto& e : entries_) {
                if (n % e.period == 0 && intersects(e.root.box, rb.box)) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            entries_.push_back({rb, n, classify_periodic(p_, n, rb)});
        }
        census_.push_back(census);
        done_.insert(n);
    }

    const std::vector<Entry>& entries() const { return entries_; }
    const std::vector<PeriodCensus>& census() const { return census_; }
    const PolynomialOracle& map() const { return p_; }
    const Dyadic& eps() const { return eps_; }

    std::size_t unresolved_count() const {
        std::size_t k = 0;
        for (const auto& e : entries_) k += std::holds_alternative<Unresolved>(e.cls);
        return k;
    }

    /// Certified repelling certificates, sorted by (period, lex center).
    std::vector<OrbitCertificate> repelling() const {
        std::vector<OrbitCertificate> out;
        for (const auto& e : entries_) {
            if (auto* c = std::get_if<OrbitCertificate>(&e.cls))
                if (c->kind == OrbitKind::Repelling) out.push_back(*c);
        }
        std::sort(out.begin(), out.end(), [](const OrbitCertificate& a, const OrbitCertificate& b) {
            if (a.period != b.period) return a.period < b.period;
            return lex_less(a.approx, b.approx);
        });
        return out;
    }

    std::vector<OrbitCertificate> attracting() const {
        std::vector<OrbitCertificate> out;
        for (const auto& e : entries_) {
            if (auto* c = std::get_if<OrbitCertificate>(&e.cls))
                if (c->kind == OrbitKind::Attracting) out.push_back(*c);
        }
        std::sort(out.begin(), out.end(), [](const OrbitCertificate& a, const OrbitCertificate& b) {
            if (a.period != b.period) return a.period < b.period;
            return lex_less(a.approx, b.approx);
        });
        return out;
    }

private:
    std::vector<RootBox> isolate_with_retry(const PeriodicTarget& target) {
        // roots sitting exactly on a subdivision line defeat the winding
        // test; retry with a deterministically shifted, slightly inflated
        // region (all fixed points of p^n stay strictly inside |z| < b,
        // so the root set is unchanged)
        for (int t = 0;; ++t) {
            ComplexBox region = region_;
            if (t > 0) {
                Dyadic delta = region_.max_side() * Dyadic(BigInt(2 * t - 1), -13);
                region = ComplexBox(region_.re_lo() - delta, region_.re_hi() + delta + delta,
                                    region_.im_lo() - delta, region_.im_hi() + delta + delta);
            }
            try {
                return isolate_roots_target(target, region, eps_);
            } catch (const boundary_ambiguity_error&) {
                if (t >= 4) throw;
            }
        }
    }

    PolynomialOracle p_;
    Dyadic eps_;
    ComplexBox region_;
    std::vector<Entry> entries_;
    std::vector<PeriodCensus> census_;
    std::set<std::int64_t> done_;
};

/// All certifiably repelling periodic points of period <= max_period inside
/// the region (which must contain the closed escape disk), isolated to eps,
/// deduplicated, canonically sorted.
inline std::vector<OrbitCertificate> enumerate_repelling(const PolynomialOracle& p,
                                                         std::int64_t max_period,
                                                         const Dyadic& eps,
                                                         const ComplexBox& region) {
    if (max_period < 1) throw usage_error("enumerate_repelling: max_period must be >= 1");
    Dyadic b = coefficient_escape_bound(p);
    if (region.re_lo() > -b || region.re_hi() < b || region.im_lo() > -b || region.im_hi() < b)
        throw usage_error("enumerate_repelling: region must contain the escape disk");
    CertificateStore store(p, eps, region);
    for (std::int64_t n = 1; n <= max_period; ++n) store.add_period(n);
    return store.repelling();
}

// ---- trap disks around attracting points ----

namespace detail {

inline bool certify_trap(const PolynomialOracle& p, std::int64_t period,
                         const DyadicComplex& c, const Dyadic& rho, int split_depth,
                         std::int64_t prec) {
    Dyadic r2 = rho * rho;
    std::int64_t cells = std::int64_t(1) << split_depth;
    // exact tiling: sub-cell side = 2*rho / 2^split_depth
    Dyadic sub(rho.mantissa(), rho.exponent() + 1 - split_depth);
    for (std::int64_t i = 0; i < cells; ++i) {
        for (std::int64_t j = 0; j < cells; ++j) {
            Dyadic x0 = c.re - rho + sub * Dyadic(i);
            Dyadic y0 = c.im - rho + sub * Dyadic(j);
            ComplexBox cell(x0, x0 + sub, y0, y0 + sub);
            ComplexBox offset = cell - ComplexBox::point(c);
            if (offset.mag2_lower() > r2) continue; // cell misses the disk
            ComplexBox f = cell;
            for (std::int64_t it = 0; it < period; ++it) f = p.eval(f, prec);
            ComplexBox img_offset = f - ComplexBox::point(c);
            if (!(img_offset.mag2_upper() < r2)) return false;
        }
    }
    return true;
}

} // namespace detail

/// Dyadic disk around an attracting periodic point whose p^period image is
/// certified strictly inside itself (checked on a subdivided cover of the
/// disk). Deterministic first-success scan over dyadic radii.
inline TrapDisk find_trap_disk(const PolynomialOracle& p, const OrbitCertificate& cert) {
    if (cert.kind != OrbitKind::Attracting)
        throw usage_error("find_trap_disk: certificate must be attracting");
    for (int j = 1; j <= 40; ++j) {
        Dyadic rho = Dyadic::pow2(-j);
        if (rho <= cert.iso_radius * Dyadic(4)) break;
        for (int depth = 0; depth <= 3; ++depth) {
            if (detail::certify_trap(p, cert.period, cert.approx, rho, depth, 96))
                return TrapDisk{cert.approx, rho, cert.period};
        }
    }
    throw resource_error("find_trap_disk: no certifiable radius found");
}

// ---- certificate file format ----
// Header line "poly=... eps=... max_period=...", then one record per line:
// period, center re, center im, isolation radius, kind, derivative bound, M
// (all exact dyadic strings).

inline std::string certificates_text(const std::vector<OrbitCertificate>& certs,
                                     std::string_view poly, const Dyadic& eps,
                                     std::int64_t max_period) {
    std::ostringstream out;
    out << "poly=" << poly << " eps=" << eps.str() << " max_period=" << max_period << "\n";
    for (const auto& c : certs) {
        out << c.period << " " << c.approx.re.str() << " " << c.approx.im.str() << " "
            << c.iso_radius.str() << " "
            << (c.kind == OrbitKind::Repelling ? "repelling" : "attracting") << " "
            << c.deriv_bound.str() << " " << c.second_deriv_bound.str() << "\n";
    }
    return out.str();
}

inline std::vector<OrbitCertificate> parse_certificates(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    std::vector<OrbitCertificate> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string re, im, rho, kind, bound, m2;
        OrbitCertificate c;
        ls >> c.period >> re >> im >> rho >> kind >> bound >> m2;
        auto d = [](const std::string& s) {
            auto v = Dyadic::parse(s);
            if (!v) throw usage_error("certificate file: bad dyadic '" + s + "'");
            return *v;
        };
        c.approx = {d(re), d(im)};
        c.iso_radius = d(rho);
        c.kind = kind == "repelling" ? OrbitKind::Repelling : OrbitKind::Attracting;
        c.deriv_bound = d(bound);
        c.second_deriv_bound = d(m2);
        out.push_back(c);
    }
    return out;
}

} // namespace juliacert
