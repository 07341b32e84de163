#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "juliacert/dyadic.hpp"

using namespace juliacert;

namespace {

Dyadic random_dyadic(std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> mant(-(1LL << 40), 1LL << 40);
    std::uniform_int_distribution<int> expo(-40, 40);
    return Dyadic(BigInt(mant(rng)), expo(rng));
}

} // namespace

TEST_CASE("canonical form: mantissa odd or zero") {
    Dyadic a(BigInt(12), 0);
    CHECK(a.mantissa() == 3);
    CHECK(a.exponent() == 2);

    Dyadic z(BigInt(0), 17);
    CHECK(z.is_zero());
    CHECK(z.exponent() == 0);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Dyadic x = random_dyadic(rng) + random_dyadic(rng) * random_dyadic(rng);
        if (x.is_zero()) {
            CHECK(x.exponent() == 0);
        } else {
            CHECK(boost::multiprecision::lsb(x.mantissa() < 0 ? BigInt(-x.mantissa())
                                                              : x.mantissa()) == 0u);
        }
    }
}

TEST_CASE("arithmetic is exact: (x + y) - y == x") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5000; ++i) {
        Dyadic x = random_dyadic(rng);
        Dyadic y = random_dyadic(rng);
        CHECK((x + y) - y == x);
        CHECK(x * y == y * x);
        CHECK((x * y) * y == x * (y * y));
    }
}

TEST_CASE("comparison agrees with subtraction") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        Dyadic x = random_dyadic(rng);
        Dyadic y = random_dyadic(rng);
        CHECK((x < y) == ((x - y).sign() < 0));
        CHECK((x == y) == ((x - y).is_zero()));
    }
    CHECK(Dyadic::pow2(100) > Dyadic::pow2(-100));
    CHECK(-Dyadic::pow2(100) < Dyadic::pow2(-100));
}

TEST_CASE("dyadic_round: per-operation examples") {
    // already representable
    CHECK(dyadic_round(Dyadic(3), 4) == Dyadic(3));
    // tiny value rounds within the 2^-4 bound
    {
        Dyadic x = Dyadic::pow2(-10);
        Dyadic r = dyadic_round(x, 4);
        CHECK(abs(r - x) <= Dyadic::pow2(-4));
        CHECK(r.exponent() >= -4);
    }
    // 0.625 at prec 2: within 2^-2
    {
        Dyadic x(BigInt(5), -3);
        Dyadic r = dyadic_round(x, 2);
        CHECK(abs(r - x) <= Dyadic::pow2(-2));
        CHECK(r.exponent() >= -2);
    }
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2000; ++i) {
        Dyadic x = random_dyadic(rng);
        for (int prec : {1, 3, 10, 30}) {
            Dyadic r = dyadic_round(x, prec);
            CHECK(abs(r - x) <= Dyadic::pow2(-prec));
            CHECK(r.exponent() >= -prec);
        }
    }
}

TEST_CASE("floor/ceil bracket the value") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 2000; ++i) {
        Dyadic x = random_dyadic(rng);
        Dyadic f = x.floor_to(8), c = x.ceil_to(8);
        CHECK(f <= x);
        CHECK(x <= c);
        CHECK(c - f <= Dyadic::pow2(-8));
    }
}

TEST_CASE("sqrt bounds") {
    CHECK(sqrt_upper(Dyadic(4), 30) >= Dyadic(2));
    CHECK(sqrt_lower(Dyadic(4), 30) <= Dyadic(2));
    CHECK(sqrt_upper(Dyadic(4), 30) - sqrt_lower(Dyadic(4), 30) <= Dyadic::pow2(-29));
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        Dyadic x = abs(random_dyadic(rng));
        Dyadic lo = sqrt_lower(x, 20), hi = sqrt_upper(x, 20);
        CHECK(lo * lo <= x);
        CHECK(hi * hi >= x);
        CHECK(hi - lo <= Dyadic::pow2(-19));
    }
}

TEST_CASE("directed division brackets the quotient") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 500; ++i) {
        Dyadic a = random_dyadic(rng);
        Dyadic b = random_dyadic(rng);
        if (b.is_zero()) continue;
        Dyadic lo = div_lower(a, b, 24), hi = div_upper(a, b, 24);
        CHECK(lo <= hi);
        // check a/b in [lo, hi] by cross-multiplying with the sign of b
        if (b.sign() > 0) {
            CHECK(lo * b <= a);
            CHECK(hi * b >= a);
        } else {
            CHECK(lo * b >= a);
            CHECK(hi * b <= a);
        }
        CHECK(hi - lo <= Dyadic::pow2(-22));
    }
}

TEST_CASE("overflow is an explicit error") {
    Dyadic big = Dyadic::pow2(detail::kMaxExponent - 2);
    CHECK_THROWS_AS(big * big * big, overflow_error);
    Dyadic a = Dyadic::pow2(detail::kMaxShiftBits + 5);
    CHECK_THROWS_AS(a + Dyadic(1), overflow_error);
}

TEST_CASE("parse and print round-trip") {
    auto p = [](const char* s) { return Dyadic::parse(s); };
    CHECK(*p("-2") == Dyadic(-2));
    CHECK(*p("0") == Dyadic());
    CHECK(*p("1.25") == Dyadic(BigInt(5), -2));
    CHECK(*p("-0.5") == Dyadic(BigInt(-1), -1));
    CHECK(*p("3*2^-4") == Dyadic(BigInt(3), -4));
    CHECK(!p("0.1").has_value());  // not dyadic
    CHECK(!p("abc").has_value());
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        Dyadic x = random_dyadic(rng);
        CHECK(*Dyadic::parse(x.str()) == x);
    }
}

TEST_CASE("mixed rounding keeps mantissas bounded for huge magnitudes") {
    Dyadic huge = Dyadic::pow2(1000000) + Dyadic::pow2(999990);
    Dyadic up = huge.round_up_mixed(64);
    Dyadic down = huge.round_down_mixed(64);
    CHECK(down <= huge);
    CHECK(huge <= up);
    CHECK(bit_length(up.mantissa()) <= 100);
}
