#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "juliacert/render.hpp"

using namespace juliacert;

namespace {

PolynomialOracle make_exact(std::initializer_list<long long> cs) {
    std::vector<Coefficient> v;
    for (long long c : cs) v.push_back(Coefficient::exact({Dyadic(c), Dyadic()}));
    return PolynomialOracle(std::move(v));
}

const PolynomialOracle z2 = make_exact({0, 0, 1});
const PolynomialOracle z2m2 = make_exact({-2, 0, 1});

Dyadic segment_dist2(const ComplexBox& cb) {
    Dyadic dx;
    if (cb.re_hi() < Dyadic(-2)) dx = Dyadic(-2) - cb.re_hi();
    else if (cb.re_lo() > Dyadic(2)) dx = cb.re_lo() - Dyadic(2);
    Dyadic dy;
    if (cb.im_hi() < Dyadic(0)) dy = -cb.im_hi();
    else if (cb.im_lo() > Dyadic(0)) dy = cb.im_lo();
    return dx * dx + dy * dy;
}

} // namespace

TEST_CASE("render_filled_julia certifies z^2 - 2 at m = 3") {
    RenderResult r = render_filled_julia(z2m2, 3);
    REQUIRE(r.status == RenderResult::Status::Certified);
    CHECK(!r.output.empty_set());
    CHECK(r.k_used >= 1);
    CHECK(r.periods_used >= 1);
    CHECK(r.steps.back().contained);
    // direction 1: output cells within 2^-3 of the true set [-2, 2]
    Dyadic lim = Dyadic(BigInt(1), -3);
    for (const auto& cell : r.output.cells())
        CHECK(segment_dist2(r.output.cell_box(cell)) <= lim * lim);
    // direction 2: sampled segment points within 2^-3 of the output
    for (int i = -256; i <= 256; ++i) {
        DyadicComplex z{Dyadic(BigInt(i), -7), Dyadic()};
        std::int64_t ix = detail::floor_index(z.re, r.output.depth());
        bool near = false;
        std::int64_t radius = detail::ceil_index(lim, r.output.depth()) + 1;
        for (std::int64_t dx = -radius; dx <= radius && !near; ++dx)
            for (std::int64_t dy = -radius; dy <= radius && !near; ++dy)
                if (r.output.contains_cell({ix + dx, dy - 1}) ||
                    r.output.contains_cell({ix + dx, dy}))
                    near = std::abs(dy) <= radius;
        CHECK(near);
    }
}

TEST_CASE("render on z^2 exhausts budgets honestly (interior obstruction)") {
    RenderBudgets tight;
    tight.max_k = 6;
    tight.max_period = 3;
    RenderResult r = render_filled_julia(z2, 3, tight);
    CHECK(r.status == RenderResult::Status::BudgetExhausted);
    CHECK(r.output.empty_set());
    REQUIRE(!r.steps.empty());
    // the gap stays far from zero: the unit disk has interior
    REQUIRE(r.steps.back().gap.has_value());
    CHECK(*r.steps.back().gap >= Dyadic(BigInt(1), -2));
    for (const auto& s : r.steps) CHECK(!s.contained);

    std::string report = certify_hypothesis_diagnostics(r);
    CHECK(report.find("contained=no") != std::string::npos);
    CHECK(report.find("gap stayed near") != std::string::npos);
}

TEST_CASE("empty diagnostics give an empty report") {
    RenderResult r;
    CHECK(certify_hypothesis_diagnostics(r).empty());
}

TEST_CASE("golden estimator: Fibonacci denominators and monotone bounds") {
    GoldenEstimate est = golden_inner_radius_upper(8, 96);
    REQUIRE(est.q.size() == 8);
    CHECK(est.q[0] == 1);
    CHECK(est.q[1] == 2);
    CHECK(est.q[2] == 3);
    CHECK(est.q[3] == 5);
    CHECK(est.q[4] == 8);
    CHECK(est.q[7] == 34);
    for (std::size_t j = 0; j < est.s_upper.size(); ++j) {
        CHECK(est.s_upper[j].sign() > 0);
        CHECK(est.s_lower[j].sign() > 0);
        CHECK(est.s_lower[j] <= est.s_upper[j]);
        if (j) CHECK(est.s_upper[j] <= est.s_upper[j - 1]); // nonincreasing
    }
    // cross-check against a double-precision orbit (coarse, non-certified)
    const double theta = (std::sqrt(5.0) - 1.0) / 2.0;
    std::complex<double> lam(std::cos(2 * M_PI * theta), std::sin(2 * M_PI * theta));
    std::complex<double> z = -lam / 2.0;
    double run_min = std::abs(z);
    std::int64_t emitted = 0;
    for (std::int64_t i = 1; i <= est.q.back(); ++i) {
        z = z * z + lam * z;
        run_min = std::min(run_min, std::abs(z));
        if (emitted < static_cast<std::int64_t>(est.q.size()) && est.q[emitted] == i) {
            CHECK(run_min <= est.s_upper[emitted].to_double() + 1e-9);
            CHECK(run_min >= est.s_lower[emitted].to_double() - 1e-9);
            ++emitted;
        }
    }
    CHECK(emitted == static_cast<std::int64_t>(est.q.size()));
}

TEST_CASE("siegel render: degenerate rho = 0 exhausts the budget") {
    SiegelParams sp{parse_polynomial("0,golden,1"), Dyadic()};
    RenderBudgets tiny;
    tiny.max_k = 3;
    RenderResult r = render_siegel_with_radius(sp, 1, tiny);
    CHECK(r.status == RenderResult::Status::BudgetExhausted);
    CHECK(r.conditional_on_rho);
}

TEST_CASE("siegel render: parabolic map never certifies") {
    // theta = 0: P(z) = z^2 + z, parabolic fixed point, no Siegel disk
    SiegelParams sp{parse_polynomial("0,1,1"), Dyadic(BigInt(1), -2)};
    RenderBudgets tiny;
    tiny.max_k = 4;
    RenderResult r = render_siegel_with_radius(sp, 1, tiny);
    CHECK(r.status == RenderResult::Status::BudgetExhausted);
}

TEST_CASE("siegel render with the golden map runs and stays conditional") {
    // rho from the estimator's upper bound, rounded down: plausible input
    GoldenEstimate est = golden_inner_radius_upper(6, 80);
    Dyadic rho = est.s_upper.back().floor_to(8);
    if (rho >= Dyadic(1)) rho = Dyadic(BigInt(127), -7);
    SiegelParams sp{parse_polynomial("0,golden,1"), rho};
    RenderBudgets small;
    small.max_k = 3;
    small.max_depth = 8;
    RenderResult r = render_siegel_with_radius(sp, 2, small);
    CHECK(r.conditional_on_rho);
    if (r.status == RenderResult::Status::Certified) {
        // on success the output omits the inner half-radius disk entirely
        Dyadic half = Dyadic(rho.mantissa(), rho.exponent() - 1);
        Dyadic h2 = half * half;
        for (const auto& cell : r.output.cells())
            CHECK(r.output.cell_box(cell).mag2_lower() >= h2);
    } else {
        CHECK(!r.steps.empty());
    }
}

TEST_CASE("siegel map validation rejects wrong shapes") {
    SiegelParams bad1{z2m2, Dyadic(BigInt(1), -2)};          // a_0 != 0
    CHECK_THROWS_AS(render_siegel_with_radius(bad1, 1), usage_error);
    SiegelParams bad2{parse_polynomial("0,golden,1"), Dyadic(2)}; // rho >= 1
    CHECK_THROWS_AS(render_siegel_with_radius(bad2, 1), usage_error);
}
