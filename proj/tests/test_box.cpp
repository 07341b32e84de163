#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "juliacert/box.hpp"

using namespace juliacert;

namespace {

Dyadic rand_dy(std::mt19937_64& rng, int emin = -12, int emax = 4) {
    std::uniform_int_distribution<long long> mant(-(1LL << 20), 1LL << 20);
    std::uniform_int_distribution<int> expo(emin, emax);
    return Dyadic(BigInt(mant(rng)), expo(rng));
}

ComplexBox rand_box(std::mt19937_64& rng) {
    Dyadic a = rand_dy(rng), b = rand_dy(rng), c = rand_dy(rng), d = rand_dy(rng);
    return ComplexBox(min(a, b), max(a, b), min(c, d), max(c, d));
}

DyadicComplex rand_point_in(const ComplexBox& x, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> t(0, 256);
    auto pick = [&](const Interval& iv) {
        return iv.lo + (iv.hi - iv.lo) * Dyadic(BigInt(t(rng)), -8);
    };
    return {pick(x.re()), pick(x.im())};
}

} // namespace

TEST_CASE("box_mul examples") {
    // {i} * {i} = {-1}
    ComplexBox i_pt = ComplexBox::point({Dyadic(0), Dyadic(1)});
    ComplexBox prod = box_mul(i_pt, i_pt);
    CHECK(prod.is_point());
    CHECK(prod.re_lo() == Dyadic(-1));
    CHECK(prod.im_lo() == Dyadic(0));

    // ([0,1]+[0,1]i)^2: re in [-1,1], im in [0,2]
    ComplexBox u(Dyadic(0), Dyadic(1), Dyadic(0), Dyadic(1));
    ComplexBox sq = box_mul(u, u);
    CHECK(sq.re_lo() == Dyadic(-1));
    CHECK(sq.re_hi() == Dyadic(1));
    CHECK(sq.im_lo() == Dyadic(0));
    CHECK(sq.im_hi() == Dyadic(2));

    // a * {1} = a
    std::mt19937_64 rng(5);
    ComplexBox one = ComplexBox::point({Dyadic(1), Dyadic(0)});
    for (int k = 0; k < 100; ++k) {
        ComplexBox a = rand_box(rng);
        ComplexBox p = box_mul(a, one);
        CHECK(p.re_lo() == a.re_lo());
        CHECK(p.re_hi() == a.re_hi());
        CHECK(p.im_lo() == a.im_lo());
        CHECK(p.im_hi() == a.im_hi());
    }
}

TEST_CASE("inclusion soundness of box products") {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 5000; ++k) {
        ComplexBox a = rand_box(rng), b = rand_box(rng);
        DyadicComplex za = rand_point_in(a, rng), zb = rand_point_in(b, rng);
        REQUIRE(a.contains(za));
        REQUIRE(b.contains(zb));
        CHECK(box_mul(a, b).contains(za * zb));
        CHECK(box_sqr(a).contains(za * za));
        CHECK((a + b).contains(za + zb));
        CHECK((a - b).contains(za - zb));
    }
}

TEST_CASE("monotonicity: products of subboxes stay inside") {
    std::mt19937_64 rng(43);
    for (int k = 0; k < 1000; ++k) {
        ComplexBox a = rand_box(rng), b = rand_box(rng);
        // shrink each toward its midpoint
        auto shrink = [](const ComplexBox& x) {
            DyadicComplex m = x.midpoint();
            Dyadic qr = (x.re_hi() - x.re_lo()) * Dyadic(BigInt(1), -2);
            Dyadic qi = (x.im_hi() - x.im_lo()) * Dyadic(BigInt(1), -2);
            return ComplexBox(m.re - qr, m.re + qr, m.im - qi, m.im + qi);
        };
        ComplexBox a1 = shrink(a), b1 = shrink(b);
        CHECK(subset(box_mul(a1, b1), box_mul(a, b)));
    }
}

TEST_CASE("box_point_distance examples") {
    ComplexBox unit(Dyadic(0), Dyadic(1), Dyadic(0), Dyadic(1));
    // axis-aligned: distance 1 from (2, 0)
    Dyadic d1 = box_point_distance(unit, {Dyadic(2), Dyadic(0)});
    CHECK(d1 >= Dyadic(1));
    CHECK(d1 - Dyadic(1) <= Dyadic::pow2(-32));
    // interior point: exact zero
    CHECK(box_point_distance(unit, {Dyadic(BigInt(1), -1), Dyadic(BigInt(1), -1)}).is_zero());
    // corner: sqrt(2) from (2, 2)
    Dyadic d2 = box_point_distance(unit, {Dyadic(2), Dyadic(2)});
    CHECK(d2 * d2 >= Dyadic(2));
    CHECK(d2 <= sqrt_upper(Dyadic(2), 20) + Dyadic::pow2(-18));
}

TEST_CASE("squared magnitude bounds") {
    ComplexBox b(Dyadic(1), Dyadic(2), Dyadic(-1), Dyadic(3));
    CHECK(b.mag2_lower() == Dyadic(1));       // nearest point (1, 0)
    CHECK(b.mag2_upper() == Dyadic(4 + 9));   // farthest corner (2, 3)
    ComplexBox c(Dyadic(-1), Dyadic(1), Dyadic(-1), Dyadic(1));
    CHECK(c.mag2_lower().is_zero());
}

TEST_CASE("division encloses the quotient") {
    std::mt19937_64 rng(47);
    int done = 0;
    while (done < 500) {
        ComplexBox a = rand_box(rng), b = rand_box(rng);
        if (b.mag2_lower().sign() <= 0) continue;
        ++done;
        DyadicComplex za = rand_point_in(a, rng), zb = rand_point_in(b, rng);
        ComplexBox q = box_div(a, b, 40);
        // check za/zb in q via za in q * zb
        CHECK(box_mul(q, ComplexBox::point(zb)).contains(za));
    }
}

TEST_CASE("outward rounding contains and stays close") {
    std::mt19937_64 rng(53);
    for (int k = 0; k < 500; ++k) {
        ComplexBox a = rand_box(rng);
        ComplexBox r = a.rounded_out(24);
        CHECK(subset(a, r));
        CHECK(r.re_lo() >= a.re_lo() - Dyadic::pow2(-24));
        CHECK(r.im_hi() <= a.im_hi() + Dyadic::pow2(-24));
    }
}
