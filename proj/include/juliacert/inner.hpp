#pragma once

#include "juliacert/cellset.hpp"
#include "juliacert/roots.hpp"

namespace juliacert {

/// The inner bound: dyadic disks of radius 2^-(m+1) around certified
/// repelling periodic points whose isolation radius is at most 2^-(m+3),
/// gridded at depth m+4. Unconditionally inside the 2^-m neighborhood of the
/// Julia set; covers it once enough periods are enumerated.
struct InnerCover {
    std::int64_t m = 1;
    std::vector<OrbitCertificate> used;
    CellSet cover;

    bool empty() const { return cover.empty_set(); }
};

/// Builds the cover from an existing certificate list (the driver's
/// incremental store feeds this once per step).
inline InnerCover inner_cover_from_certs(const std::vector<OrbitCertificate>& certs,
                                         std::int64_t m) {
    if (m < 1) throw usage_error("inner_cover: m must be >= 1");
    Dyadic iso_max = Dyadic::pow2(-(m + 3));
    Dyadic radius = Dyadic::pow2(-(m + 1));
    std::int64_t depth = m + 4;
    InnerCover out;
    out.m = m;
    std::vector<std::pair<DyadicComplex, Dyadic>> disks;
    for (const auto& c : certs) {
        if (c.kind != OrbitKind::Repelling) continue;
        if (c.iso_radius > iso_max) continue;
        disks.push_back({c.approx, radius});
        out.used.push_back(c);
    }
    if (disks.empty()) {
        out.cover = CellSet::empty(depth, ComplexBox());
        return out; // explicit empty cover; the caller keeps iterating
    }
    out.cover = from_disks(disks, depth);
    return out;
}

/// Standalone form: enumerates repelling points up to max_period first.
inline InnerCover inner_cover(const PolynomialOracle& p, std::int64_t m,
                              std::int64_t max_period) {
    if (max_period < 1) throw usage_error("inner_cover: max_period must be >= 1");
    Dyadic b = coefficient_escape_bound(p);
    ComplexBox region(-b, b, -b, b);
    std::vector<OrbitCertificate> certs =
        enumerate_repelling(p, max_period, Dyadic::pow2(-(m + 3)), region);
    return inner_cover_from_certs(certs, m);
}

} // namespace juliacert
