#pragma once

#include "juliacert/cellset.hpp"
#include "juliacert/parallel.hpp"
#include "juliacert/roots.hpp"

namespace juliacert {

/// Escape radius with the certified growth property:
/// |z| >= b implies |p(z)| >= 2|z|, hence the orbit tends to infinity.
struct EscapeRadius {
    Dyadic b;
};

/// b = max(1, (2 + sum_{i<d} |a_i|^) / |a_d|_) from certified coefficient
/// bounds; the triangle-estimate growth inequality is re-checked exactly.
inline EscapeRadius escape_radius(const PolynomialOracle& p) {
    return EscapeRadius{coefficient_escape_bound(p)};
}

/// Adaptive certified classification of the frame [-b, b]^2 against
/// p^{-k}(D), D = B(0, b):
///   IN  - certified p^k(cell) inside D,
///   OUT - certified escape by step k (enclosure left D; growth does the rest),
///   BND - undecided at the finest level; side <= tol/2.
struct GridCell {
    std::int64_t ix = 0, iy = 0;
    std::int32_t level = 0;
    CellClass cls = CellClass::Bnd;
    friend bool operator<(const GridCell& a, const GridCell& b) {
        if (a.level != b.level) return a.level < b.level;
        if (a.ix != b.ix) return a.ix < b.ix;
        return a.iy < b.iy;
    }
};

struct ClassifiedGrid {
    std::int64_t depth = 0; // finest level: cells there have side <= tol/2
    Dyadic b;
    std::int64_t k = 0;
    Dyadic tol;
    std::vector<GridCell> cells; // a partition of the frame, canonically sorted

    ComplexBox frame() const { return ComplexBox(-b, b, -b, b); }

    /// The IN-or-BND region flattened to the finest depth.
    CellSet in_bnd_cellset() const {
        std::vector<CellIndex> idx;
        for (const auto& c : cells) {
            if (c.cls == CellClass::Out) continue;
            std::int64_t f = std::int64_t(1) << (depth - c.level);
            for (std::int64_t dx = 0; dx < f; ++dx)
                for (std::int64_t dy = 0; dy < f; ++dy)
                    idx.push_back({c.ix * f + dx, c.iy * f + dy});
        }
        return CellSet(depth, std::move(idx), frame());
    }

    /// Flattened cells with per-cell class, aligned with the CellSet order.
    std::pair<CellSet, std::vector<CellClass>> in_bnd_classified() const {
        std::vector<std::pair<CellIndex, CellClass>> tagged;
        for (const auto& c : cells) {
            if (c.cls == CellClass::Out) continue;
            std::int64_t f = std::int64_t(1) << (depth - c.level);
            for (std::int64_t dx = 0; dx < f; ++dx)
                for (std::int64_t dy = 0; dy < f; ++dy)
                    tagged.push_back({{c.ix * f + dx, c.iy * f + dy}, c.cls});
        }
        std::sort(tagged.begin(), tagged.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<CellIndex> idx;
        std::vector<CellClass> cls;
        idx.reserve(tagged.size());
        for (auto& [i, c] : tagged) {
            idx.push_back(i);
            cls.push_back(c);
        }
        return {CellSet(depth, std::move(idx), frame()), std::move(cls)};
    }
};

namespace detail {

enum class CellVerdict : std::uint8_t { In, Out, Bnd, Split };

struct OuterEngine {
    const PolynomialOracle& p;
    Dyadic b, b2;
    std::int64_t k;
    std::int64_t finest;
    std::int64_t prec;
    const std::vector<TrapDisk>* traps;    // nullptr for the plain preimage
    const Dyadic* final_radius2 = nullptr; // target disk W for p^{-k}(W); default D

    // extra virtual subdivision for classification only: rectangle wrapping
    // defeats escape certificates a few widths from the set, so undecided
    // finest cells are re-examined on sub-boxes without refining the grid
    static constexpr std::int32_t kVirtualExtra = 3;

    CellVerdict classify(const ComplexBox& box, std::int32_t level) const {
        ComplexBox f = box;
        for (std::int64_t j = 0;; ++j) {
            if (f.mag2_lower() > b2) return CellVerdict::Out; // certified escape
            if (traps) {
                for (const auto& t : *traps) {
                    ComplexBox off = f - ComplexBox::point(t.center);
                    if (off.mag2_upper() < t.radius * t.radius)
                        return CellVerdict::Out; // certified capture by a trap
                }
            }
            if (j == k) break;
            // wrapping control: split before the enclosure outgrows the frame
            if (f.max_side() > b && level < finest + kVirtualExtra) return CellVerdict::Split;
            f = p.eval(f, prec);
        }
        const Dyadic& target2 = final_radius2 ? *final_radius2 : b2;
        if (f.mag2_upper() <= target2) return CellVerdict::In;
        if (final_radius2 && f.mag2_lower() > target2)
            return CellVerdict::Out; // the k-th image certifiably misses the target disk
        return level < finest + kVirtualExtra ? CellVerdict::Split : CellVerdict::Bnd;
    }

    /// Terminal classification of a finest-level cell: undecided cells are
    /// split virtually; a cell is In/Out only when every sub-leaf agrees.
    CellClass resolve(const ComplexBox& box, std::int32_t level) const {
        CellVerdict v = classify(box, level);
        if (v == CellVerdict::In) return CellClass::In;
        if (v == CellVerdict::Out) return CellClass::Out;
        if (v == CellVerdict::Bnd || level >= finest + kVirtualExtra) return CellClass::Bnd;
        DyadicComplex m = box.midpoint();
        ComplexBox quads[4] = {ComplexBox(box.re_lo(), m.re, box.im_lo(), m.im),
                               ComplexBox(m.re, box.re_hi(), box.im_lo(), m.im),
                               ComplexBox(box.re_lo(), m.re, m.im, box.im_hi()),
                               ComplexBox(m.re, box.re_hi(), m.im, box.im_hi())};
        bool all_in = true, all_out = true;
        for (const auto& q : quads) {
            CellClass c = resolve(q, level + 1);
            if (c == CellClass::Bnd) return CellClass::Bnd;
            all_in &= c == CellClass::In;
            all_out &= c == CellClass::Out;
        }
        if (all_in) return CellClass::In;
        if (all_out) return CellClass::Out;
        return CellClass::Bnd;
    }
};

inline ClassifiedGrid run_outer(const PolynomialOracle& p, const EscapeRadius& er,
                                std::int64_t k, const Dyadic& tol,
                                const std::vector<TrapDisk>* traps,
                                std::int64_t max_depth,
                                const Dyadic* final_radius2 = nullptr) {
    if (k < 1) throw usage_error("preimage_approx: k must be >= 1");
    if (tol.sign() <= 0) throw usage_error("preimage_approx: tol must be positive");
    const Dyadic& b = er.b;
    // finest level: first with 2^-L <= tol/2
    std::int64_t finest = 1;
    while (Dyadic::pow2(-finest) > Dyadic(tol.mantissa(), tol.exponent() - 1)) ++finest;
    if (finest > max_depth)
        throw resource_error("preimage_approx: required depth exceeds the budget");
    // base level where cells tile [-b, b] exactly
    std::int64_t base = std::max<std::int64_t>(0, -b.exponent());
    if (base > finest) throw usage_error("preimage_approx: b is too finely dyadic");

    OuterEngine eng{p, b, b * b, k, finest, finest + 24, traps, final_radius2};

    BigInt nb = b.mantissa() << static_cast<unsigned>(b.exponent() + base);
    std::int64_t n = nb.convert_to<std::int64_t>(); // cells per half-side at base level
    std::vector<GridCell> wave;
    for (std::int64_t ix = -n; ix < n; ++ix)
        for (std::int64_t iy = -n; iy < n; ++iy)
            wave.push_back({ix, iy, static_cast<std::int32_t>(base), CellClass::Bnd});

    ClassifiedGrid grid;
    grid.depth = finest;
    grid.b = b;
    grid.k = k;
    grid.tol = tol;
    constexpr auto kSplitMark = static_cast<CellClass>(0xFF);
    while (!wave.empty()) {
        std::vector<CellClass> results(wave.size());
        parallel::parallel_for(wave.size(), [&](std::size_t i) {
            const GridCell& c = wave[i];
            Dyadic side = Dyadic::pow2(-c.level);
            Dyadic x0(BigInt(c.ix), -c.level), y0(BigInt(c.iy), -c.level);
            ComplexBox box(x0, x0 + side, y0, y0 + side);
            if (c.level >= finest) {
                results[i] = eng.resolve(box, c.level); // terminal, maybe virtually split
                return;
            }
            CellVerdict v = eng.classify(box, c.level);
            switch (v) {
                case CellVerdict::In: results[i] = CellClass::In; break;
                case CellVerdict::Out: results[i] = CellClass::Out; break;
                case CellVerdict::Bnd: results[i] = CellClass::Bnd; break;
                case CellVerdict::Split: results[i] = kSplitMark; break;
            }
        });
        std::vector<GridCell> next;
        for (std::size_t i = 0; i < wave.size(); ++i) {
            GridCell c = wave[i];
            if (results[i] == kSplitMark) {
                for (std::int64_t dx = 0; dx < 2; ++dx)
                    for (std::int64_t dy = 0; dy < 2; ++dy)
                        next.push_back({2 * c.ix + dx, 2 * c.iy + dy,
                                        static_cast<std::int32_t>(c.level + 1), CellClass::Bnd});
            } else {
                c.cls = results[i];
                grid.cells.push_back(c);
            }
        }
        wave = std::move(next);
    }
    std::sort(grid.cells.begin(), grid.cells.end());
    return grid;
}

} // namespace detail

/// Certified adaptive approximation of p^{-k}(D): the union of IN and BND
/// cells is within tol of the true closed preimage in the Hausdorff metric
/// (IN/OUT classifications are certified; BND cells have side <= tol/2).
inline ClassifiedGrid preimage_approx(const PolynomialOracle& p, const EscapeRadius& er,
                                      std::int64_t k, const Dyadic& tol,
                                      std::int64_t max_depth = 64) {
    return detail::run_outer(p, er, k, tol, nullptr, max_depth);
}

/// Same engine against the complement of the known attracting basins: cells
/// whose orbit enclosure certifiably enters a trap disk (or escapes) are OUT;
/// the IN/BND union approximates the complement of the basins found so far.
inline ClassifiedGrid complement_preimage_approx(const PolynomialOracle& p,
                                                 const std::vector<TrapDisk>& traps,
                                                 const EscapeRadius& er, std::int64_t k,
                                                 const Dyadic& tol,
                                                 std::int64_t max_depth = 64) {
    for (const auto& t : traps)
        if (t.radius.sign() <= 0) throw usage_error("complement_preimage_approx: bad trap disk");
    return detail::run_outer(p, er, k, tol, &traps, max_depth);
}

} // namespace juliacert
