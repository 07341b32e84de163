#include <catch2/catch_amalgamated.hpp>

#include "juliacert/roots.hpp"

using namespace juliacert;

namespace {

PolynomialOracle make_exact(std::initializer_list<long long> cs) {
    std::vector<Coefficient> v;
    for (long long c : cs) v.push_back(Coefficient::exact({Dyadic(c), Dyadic()}));
    return PolynomialOracle(std::move(v));
}

const PolynomialOracle z2 = make_exact({0, 0, 1});
const PolynomialOracle z2m2 = make_exact({-2, 0, 1});

ComplexBox square_region(long long half) {
    return ComplexBox(Dyadic(-half), Dyadic(half), Dyadic(-half), Dyadic(half));
}

bool has_root_near(const std::vector<RootBox>& roots, double re, double im, double tol = 1e-4) {
    for (const auto& r : roots) {
        DyadicComplex m = r.box.midpoint();
        if (std::abs(m.re.to_double() - re) < tol && std::abs(m.im.to_double() - im) < tol)
            return true;
    }
    return false;
}

} // namespace

TEST_CASE("winding number counts zeros with multiplicity") {
    // q(z) = z over a box around the origin: one zero
    PolyTarget identity(make_exact({0, 1}));
    ComplexBox around0(Dyadic(-1), Dyadic(1), Dyadic(-1), Dyadic(1));
    // shift a bit so the zero is not dead center but still inside
    ComplexBox shifted(Dyadic(BigInt(-3), -2), Dyadic(1), Dyadic(BigInt(-5), -3), Dyadic(1));
    CHECK(winding_number(identity, shifted).value() == 1);

    // no zeros away from the origin
    ComplexBox away(Dyadic(2), Dyadic(3), Dyadic(2), Dyadic(3));
    CHECK(winding_number(identity, away).value() == 0);

    // z^2: double zero at the origin
    PolyTarget sq(make_exact({0, 0, 1}));
    CHECK(winding_number(sq, shifted).value() == 2);

    // z^2 - 2: both roots inside a big box; counted together
    PolyTarget q(z2m2);
    ComplexBox big(Dyadic(BigInt(-33), -3), Dyadic(4), Dyadic(BigInt(-17), -2), Dyadic(4));
    CHECK(winding_number(q, big).value() == 2);

    // root exactly on the boundary defeats refinement
    ComplexBox on_boundary(Dyadic(0), Dyadic(1), Dyadic(BigInt(-1), -1), Dyadic(BigInt(1), -1));
    WindingOptions fastfail;
    fastfail.max_arcs = 512;
    CHECK(!winding_number(identity, on_boundary, fastfail).has_value());
}

TEST_CASE("isolate_roots: quadratic with roots 2 and -1") {
    // q = z^2 - z - 2 = (z - 2)(z + 1); the region is kept off the dyadic
    // grid so no root sits on a subdivision line
    PolynomialOracle q = make_exact({-2, -1, 1});
    ComplexBox region(Dyadic(BigInt(-1037), -8), Dyadic(BigInt(1051), -8),
                      Dyadic(BigInt(-1031), -8), Dyadic(BigInt(1027), -8));
    std::vector<RootBox> roots = isolate_roots(q, region, Dyadic::pow2(-8));
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].count == 1);
    CHECK(roots[1].count == 1);
    CHECK(has_root_near(roots, -1, 0));
    CHECK(has_root_near(roots, 2, 0));
    // disjoint
    CHECK(!intersects(roots[0].box, roots[1].box));
    // diameter bound
    for (const auto& r : roots) {
        Dyadic wr = r.box.width_re(), wi = r.box.width_im();
        CHECK(wr * wr + wi * wi <= Dyadic::pow2(-16));
    }
}

TEST_CASE("isolate_roots: z^2 - z has roots 0 and 1 (dyadic roots need the retry path)") {
    PeriodicTarget t(z2, 1); // p(z) - z = z^2 - z
    // the centered region puts both roots on subdivision lines; the store's
    // retry handles that, so here use a generic region directly
    ComplexBox region(Dyadic(BigInt(-1037), -8), Dyadic(BigInt(1051), -8),
                      Dyadic(BigInt(-1031), -8), Dyadic(BigInt(1027), -8));
    std::vector<RootBox> roots = isolate_roots_target(t, region, Dyadic::pow2(-8));
    REQUIRE(roots.size() == 2);
    CHECK(has_root_near(roots, 0, 0));
    CHECK(has_root_near(roots, 1, 0));
}

TEST_CASE("isolate_roots: z^4 - z roots at 0, 1, and the nontrivial cube roots") {
    PolynomialOracle q = make_exact({0, -1, 0, 0, 1});
    ComplexBox region(Dyadic(BigInt(-517), -8), Dyadic(BigInt(523), -8),
                      Dyadic(BigInt(-515), -8), Dyadic(BigInt(521), -8));
    std::vector<RootBox> roots = isolate_roots_target(PolyTarget(q), region, Dyadic::pow2(-10));
    REQUIRE(roots.size() == 4);
    std::int64_t total = 0;
    for (const auto& r : roots) total += r.count;
    CHECK(total == 4);
    CHECK(has_root_near(roots, 0, 0));
    CHECK(has_root_near(roots, 1, 0));
    CHECK(has_root_near(roots, -0.5, 0.8660254));
    CHECK(has_root_near(roots, -0.5, -0.8660254));
}

TEST_CASE("classify_periodic examples for z^2") {
    CertificateStore store(z2, Dyadic::pow2(-8), square_region(2));
    store.add_period(1);
    REQUIRE(store.entries().size() == 2);
    int rep = 0, att = 0;
    for (const auto& e : store.entries()) {
        auto* c = std::get_if<OrbitCertificate>(&e.cls);
        REQUIRE(c != nullptr);
        if (c->kind == OrbitKind::Repelling) {
            ++rep;
            // fixed point 1: |p'(1)| = 2, certified bound close to 2
            CHECK(std::abs(c->approx.re.to_double() - 1.0) < 1e-4);
            CHECK(c->deriv_bound > Dyadic(1));
            CHECK(c->deriv_bound.to_double() > 1.9);
        } else {
            ++att;
            // superattracting 0: certified bound close to 0
            CHECK(std::abs(c->approx.re.to_double()) < 1e-4);
            CHECK(c->deriv_bound < Dyadic(1));
            CHECK(c->deriv_bound.to_double() < 0.1);
        }
    }
    CHECK(rep == 1);
    CHECK(att == 1);
}

TEST_CASE("classify_periodic: repelling fixed points of z^2 - 2") {
    CertificateStore store(z2m2, Dyadic::pow2(-8), square_region(4));
    store.add_period(1);
    // fixed points: 2 and -1, multipliers 4 and -2, both repelling
    auto reps = store.repelling();
    REQUIRE(reps.size() == 2);
    CHECK(std::abs(reps[0].approx.re.to_double() - (-1.0)) < 1e-4);
    CHECK(std::abs(reps[1].approx.re.to_double() - 2.0) < 1e-4);
    CHECK(reps[1].deriv_bound.to_double() > 3.9);
    for (const auto& c : reps) CHECK(verify_certificate(z2m2, c));
}

TEST_CASE("enumerate_repelling: census for z^2 up to period 2") {
    std::vector<OrbitCertificate> certs =
        enumerate_repelling(z2, 2, Dyadic::pow2(-8), square_region(2));
    // 1 (period 1) plus the primitive cube roots of unity (period 2)
    REQUIRE(certs.size() == 3);
    CHECK(certs[0].period == 1);
    CHECK(certs[1].period == 2);
    CHECK(certs[2].period == 2);
    CHECK(std::abs(certs[0].approx.re.to_double() - 1.0) < 1e-4);
    CHECK(std::abs(certs[1].approx.re.to_double() + 0.5) < 1e-4);
    // |(p^2)'| = |4 z^3| = 4 on the unit circle
    for (const auto& c : certs) {
        if (c.period == 2) {
            CHECK(c.deriv_bound.to_double() > 3.9);
            CHECK(c.deriv_bound.to_double() < 4.1);
        }
        CHECK(verify_certificate(z2, c));
    }
    // determinism: a second run yields the identical list
    std::vector<OrbitCertificate> again =
        enumerate_repelling(z2, 2, Dyadic::pow2(-8), square_region(2));
    REQUIRE(again.size() == certs.size());
    for (std::size_t i = 0; i < certs.size(); ++i) {
        CHECK(again[i].approx == certs[i].approx);
        CHECK(again[i].deriv_bound == certs[i].deriv_bound);
    }
}

TEST_CASE("enumerate_repelling: z^2 - 2, period 1") {
    auto certs = enumerate_repelling(z2m2, 1, Dyadic::pow2(-8), square_region(4));
    REQUIRE(certs.size() == 2);
    CHECK(has_root_near({{ComplexBox::square(certs[0].approx, certs[0].iso_radius), 1}}, -1, 0));
    CHECK(has_root_near({{ComplexBox::square(certs[1].approx, certs[1].iso_radius), 1}}, 2, 0));
    CHECK_THROWS_AS(enumerate_repelling(z2m2, 1, Dyadic::pow2(-8), square_region(2)),
                    usage_error); // region smaller than the escape disk
}

TEST_CASE("find_trap_disk for the superattracting origin of z^2") {
    CertificateStore store(z2, Dyadic::pow2(-10), square_region(2));
    store.add_period(1);
    auto att = store.attracting();
    REQUIRE(att.size() == 1);
    TrapDisk trap = find_trap_disk(z2, att[0]);
    CHECK(trap.period == 1);
    CHECK(trap.radius >= Dyadic(BigInt(1), -3));
    CHECK(trap.radius <= Dyadic(BigInt(1), -1));
    // and the defining property holds on a fresh check: the disk's cells map in
    CHECK(detail::certify_trap(z2, 1, trap.center, trap.radius, 3, 96));
    // repelling certificates are rejected
    CertificateStore s2(z2m2, Dyadic::pow2(-8), square_region(4));
    s2.add_period(1);
    CHECK_THROWS_AS(find_trap_disk(z2m2, s2.repelling()[0]), usage_error);
}

TEST_CASE("certificate file format round-trips") {
    auto certs = enumerate_repelling(z2m2, 1, Dyadic::pow2(-8), square_region(4));
    std::string text = certificates_text(certs, "-2,0,1", Dyadic::pow2(-8), 1);
    CHECK(text.find("poly=-2,0,1") == 0);
    auto parsed = parse_certificates(text);
    REQUIRE(parsed.size() == certs.size());
    for (std::size_t i = 0; i < certs.size(); ++i) {
        CHECK(parsed[i].approx == certs[i].approx);
        CHECK(parsed[i].iso_radius == certs[i].iso_radius);
        CHECK(parsed[i].kind == certs[i].kind);
        CHECK(parsed[i].deriv_bound == certs[i].deriv_bound);
        CHECK(parsed[i].second_deriv_bound == certs[i].second_deriv_bound);
    }
}

TEST_CASE("multiple roots report Unresolved(multiple)") {
    RootBox fake{ComplexBox::square({Dyadic(), Dyadic()}, Dyadic::pow2(-6)), 2};
    Classification c = classify_periodic(z2, 1, fake);
    auto* u = std::get_if<Unresolved>(&c);
    REQUIRE(u != nullptr);
    CHECK(u->reason == Unresolved::Reason::Multiple);
}

TEST_CASE("neutral fixed point stays unresolved") {
    // p(z) = z^2 + z has the parabolic fixed point 0 with multiplier exactly 1
    PolynomialOracle parab = make_exact({0, 1, 1});
    RootBox rb{ComplexBox::square({Dyadic(), Dyadic()}, Dyadic::pow2(-20)), 1};
    Classification c = classify_periodic(parab, 1, rb, 4);
    CHECK(std::holds_alternative<Unresolved>(c));
}
