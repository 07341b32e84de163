#pragma once

#include "juliacert/inner.hpp"
#include "juliacert/outer.hpp"

namespace juliacert {

struct RenderBudgets {
    std::int64_t max_k = 64;
    std::int64_t max_period = 12;
    std::int64_t max_depth = 0; // 0: use m + 16
};

struct StepDiagnostics {
    std::int64_t k = 0;
    std::int64_t period = 0;
    std::size_t d_cells = 0;
    std::size_t b_cells = 0;
    // directed Hausdorff bound: how far the outer set sticks out of the
    // inner cover; reaches 0 exactly when the containment test passes
    std::optional<Dyadic> gap;
    std::size_t unresolved = 0;
    bool contained = false;
};

/// Outcome of a driver run. Certified means the containment test
/// D_k inside B_k passed and the output is that final B_k, bitwise.
/// BudgetExhausted is the honest non-answer; no uncertified set is ever
/// produced.
struct RenderResult {
    enum class Status { Certified, BudgetExhausted };
    Status status = Status::BudgetExhausted;
    CellSet output;
    std::int64_t m = 0;
    std::int64_t k_used = 0;
    std::int64_t periods_used = 0;
    std::vector<StepDiagnostics> steps;
    std::string cause;
    bool conditional_on_rho = false;
    std::string poly;
};

/// The sandwich loop: at step k, the inner cover uses periods up to
/// min(k, max_period) and the outer approximation iterates k times at
/// tolerance 2^-(m+3); on containment the inner cover is the answer, good to
/// Hausdorff precision 2^-m whenever the filled Julia set has empty interior.
inline RenderResult render_filled_julia(const PolynomialOracle& p, std::int64_t m,
                                        RenderBudgets budgets = {}) {
    if (m < 1) throw usage_error("render: m must be >= 1");
    if (budgets.max_k < 1 || budgets.max_period < 1)
        throw usage_error("render: budgets must be positive");
    std::int64_t max_depth = budgets.max_depth > 0 ? budgets.max_depth : m + 16;
    EscapeRadius er = escape_radius(p);
    ComplexBox region(-er.b, er.b, -er.b, er.b);
    Dyadic tol = Dyadic::pow2(-(m + 3));
    CertificateStore store(p, Dyadic::pow2(-(m + 3)), region);

    RenderResult result;
    result.m = m;
    result.poly = p.descriptor();
    for (std::int64_t k = 1; k <= budgets.max_k; ++k) {
        std::int64_t period = std::min(k, budgets.max_period);
        for (std::int64_t n = 1; n <= period; ++n) store.add_period(n);
        InnerCover inner = inner_cover_from_certs(store.repelling(), m);
        ClassifiedGrid grid = preimage_approx(p, er, k, tol, max_depth);
        CellSet d_cells = grid.in_bnd_cellset();

        StepDiagnostics diag;
        diag.k = k;
        diag.period = period;
        diag.d_cells = d_cells.size();
        diag.b_cells = inner.cover.size();
        diag.unresolved = store.unresolved_count();
        if (!inner.empty() && !d_cells.empty_set())
            diag.gap = directed_hausdorff_upper(d_cells, inner.cover);
        diag.contained = !inner.empty() && contained_in(d_cells, inner.cover);
        result.steps.push_back(diag);
        result.k_used = k;
        result.periods_used = period;

        if (diag.contained) {
            result.status = RenderResult::Status::Certified;
            result.output = inner.cover; // output C_m = B_k
            return result;
        }
    }
    result.status = RenderResult::Status::BudgetExhausted;
    result.cause = "containment D_k in B_k not reached within budgets";
    return result;
}

/// Rotation-map parameters for the Siegel variants: the map z^2 + lambda z
/// (fixed point 0 with multiplier lambda) plus the trusted inner radius.
struct SiegelParams {
    PolynomialOracle p;
    Dyadic rho; // trusted inner radius of the Siegel disk, 0 < rho < 1
};

inline void validate_siegel_map(const PolynomialOracle& p) {
    std::vector<std::string> problems;
    if (p.degree() != 2) problems.push_back("siegel map must have degree 2");
    ComplexBox a0 = p.coefficient(0, 30);
    if (!(a0.is_point() && a0.re_lo().is_zero() && a0.im_lo().is_zero()))
        problems.push_back("siegel map must fix the origin (a_0 = 0)");
    ComplexBox a2 = p.coefficient(2, 30);
    if (!(a2.is_point() && a2.re_lo() == Dyadic(1) && a2.im_lo().is_zero()))
        problems.push_back("siegel map must be monic (a_2 = 1)");
    if (!problems.empty()) throw usage_error(problems);
}

/// The known-inner-radius loop: per step k the target disk is
/// W_k = B(0, rho - 2^-k); B_k approximates p^{-k}(W_k) and D_k the escape
/// preimage, both at tolerance 2^-(n+1+2); on success the output is the
/// 2^-(n+1)-neighborhood of D_k minus B_k. Correctness is conditional on the
/// supplied rho.
inline RenderResult render_siegel_with_radius(const SiegelParams& sp, std::int64_t n,
                                              RenderBudgets budgets = {}) {
    if (n < 1) throw usage_error("siegel render: n must be >= 1");
    validate_siegel_map(sp.p);
    // rho = 0 is degenerate but allowed: every W_k is empty and the loop
    // honestly exhausts its budget
    if (sp.rho.sign() < 0 || sp.rho >= Dyadic(1))
        throw usage_error("siegel render: need 0 <= rho < 1");
    std::int64_t max_depth = budgets.max_depth > 0 ? budgets.max_depth : n + 16;
    EscapeRadius er = escape_radius(sp.p);
    Dyadic tol = Dyadic::pow2(-(n + 3));
    Dyadic nb_radius = Dyadic::pow2(-(n + 1));

    RenderResult result;
    result.m = n;
    result.poly = sp.p.descriptor();
    result.conditional_on_rho = true;
    for (std::int64_t k = 1; k <= budgets.max_k; ++k) {
        Dyadic w_radius = sp.rho - Dyadic::pow2(-k);
        ClassifiedGrid d_grid = preimage_approx(sp.p, er, k, tol, max_depth);
        CellSet d_cells = d_grid.in_bnd_cellset();

        StepDiagnostics diag;
        diag.k = k;
        diag.d_cells = d_cells.size();
        result.k_used = k;
        if (w_radius.sign() > 0) {
            Dyadic w2 = w_radius * w_radius;
            ClassifiedGrid b_grid =
                detail::run_outer(sp.p, er, k, tol, nullptr, max_depth, &w2);
            CellSet b_cells = b_grid.in_bnd_cellset();
            diag.b_cells = b_cells.size();
            if (!b_cells.empty_set() && !d_cells.empty_set()) {
                CellSet fattened = neighborhood(b_cells, nb_radius);
                diag.gap = directed_hausdorff_upper(d_cells, b_cells);
                diag.contained = contained_in(d_cells, fattened);
                if (diag.contained) {
                    result.steps.push_back(diag);
                    result.status = RenderResult::Status::Certified;
                    result.output =
                        neighborhood(cellset_difference(d_cells, b_cells), nb_radius);
                    return result;
                }
            }
        }
        result.steps.push_back(diag);
    }
    result.status = RenderResult::Status::BudgetExhausted;
    result.cause = "siegel containment test not reached within budgets";
    return result;
}

/// Fibonacci denominators q_1 = 1, q_2 = 2, ... of the golden-mean continued
/// fraction, with certified bounds on min_{i <= q_j} |P^i(c)| for the
/// critical orbit of P(z) = z^2 + lambda* z (c = -lambda*/2). s_upper is the
/// nonincreasing sequence of certified upper bounds.
struct GoldenEstimate {
    std::vector<std::int64_t> q;
    std::vector<Dyadic> s_upper;
    std::vector<Dyadic> s_lower;
};

inline GoldenEstimate golden_inner_radius_upper(std::int64_t n, std::int64_t prec,
                                                std::int64_t cap = 16) {
    if (n < 1) throw usage_error("golden estimator: n must be >= 1");
    if (n > cap) throw usage_error("golden estimator: n exceeds the configured cap");
    if (prec < 16) prec = 16;
    // golden-mean convergent denominators: 1, 2, 3, 5, 8, ...
    std::vector<std::int64_t> q(static_cast<std::size_t>(n) + 1);
    q[0] = 1;
    q[1] = 1;
    if (n >= 2) q[2] = 2;
    for (std::int64_t j = 3; j <= n; ++j) q[j] = q[j - 1] + q[j - 2];
    std::int64_t steps = q[n];

    for (std::int64_t w = std::max<std::int64_t>(prec, 64);; w *= 2) {
        if (w > (std::int64_t(1) << 15))
            throw resource_error("golden estimator: precision escalation cap");
        ComplexBox lam = golden_lambda_enclosure(w);
        ComplexBox z = lam.scaled(Dyadic(BigInt(-1), -1)); // critical point -lambda/2
        std::vector<Dyadic> upper(static_cast<std::size_t>(steps) + 1);
        std::vector<Dyadic> lower(static_cast<std::size_t>(steps) + 1);
        bool precise = true;
        for (std::int64_t i = 0; i <= steps; ++i) {
            upper[i] = sqrt_upper(z.mag2_upper(), w / 2);
            lower[i] = sqrt_lower(z.mag2_lower(), w / 2);
            if (i == steps) break;
            // P(z) = z^2 + lambda z
            z = (box_sqr(z) + box_mul(lam, z)).rounded_out(w);
            if (z.max_side() > Dyadic::pow2(-(prec / 2))) {
                precise = false;
                break;
            }
        }
        if (!precise) continue;
        GoldenEstimate out;
        Dyadic run_up = upper[0], run_lo = lower[0];
        std::int64_t next = 1;
        for (std::int64_t i = 1; i <= steps; ++i) {
            run_up = min(run_up, upper[i]);
            run_lo = min(run_lo, lower[i]);
            while (next <= n && q[next] == i) {
                out.q.push_back(q[next]);
                out.s_upper.push_back(run_up);
                out.s_lower.push_back(run_lo);
                ++next;
            }
        }
        return out;
    }
}

/// Plain-text explanation of a BudgetExhausted run from its recorded,
/// certified diagnostics only.
inline std::string certify_hypothesis_diagnostics(const RenderResult& result) {
    if (result.steps.empty()) return "";
    std::ostringstream out;
    out << "non-certified run for poly=" << result.poly << " m=" << result.m << "\n";
    for (const auto& s : result.steps) {
        out << "k=" << s.k << " period=" << s.period << " outer_cells=" << s.d_cells
            << " inner_cells=" << s.b_cells;
        if (s.gap) out << " gap<=" << s.gap->str() << " (~" << s.gap->to_double() << ")";
        if (s.unresolved) out << " unresolved=" << s.unresolved;
        out << (s.contained ? " contained=yes" : " contained=no") << "\n";
    }
    const auto& first = result.steps.front();
    const auto& last = result.steps.back();
    if (first.gap && last.gap) {
        Dyadic half = Dyadic(first.gap->mantissa(), first.gap->exponent() - 1);
        if (*last.gap > half) {
            out << "gap stayed near " << last.gap->to_double()
                << ": the outer set keeps mass far from every inner cover "
                   "(interior obstruction is consistent with this trace)\n";
        } else {
            out << "gap shrank from " << first.gap->to_double() << " to "
                << last.gap->to_double() << ": larger budgets may certify\n";
        }
    }
    if (last.unresolved)
        out << last.unresolved
            << " periodic candidate(s) stayed unresolved at the classification budget\n";
    return out.str();
}

} // namespace juliacert
