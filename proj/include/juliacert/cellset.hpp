#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <sstream>
#include <vector>

#include "juliacert/box.hpp"

namespace juliacert {

struct CellIndex {
    std::int64_t ix = 0, iy = 0;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

namespace detail {

/// floor(x * 2^depth) as a machine integer; throws if out of range.
inline std::int64_t floor_index(const Dyadic& x, std::int64_t depth) {
    if (x.is_zero()) return 0;
    BigInt v = floor_shr(x.mantissa(), -(x.exponent() + depth));
    if (v > (BigInt(1) << 56) || v < -(BigInt(1) << 56))
        throw resource_error("cell index out of range");
    return v.convert_to<std::int64_t>();
}

inline std::int64_t ceil_index(const Dyadic& x, std::int64_t depth) {
    return -floor_index(-x, depth);
}

} // namespace detail

/// Finite union of closed dyadic squares of side 2^-depth on the grid
/// 2^-depth * Z^2; the artifact's encoding of a computed set approximation.
/// Canonical: indices sorted and unique, so set equality is representation
/// equality at a common depth.
class CellSet {
public:
    CellSet() : depth_(0), frame_(ComplexBox()) {}
    CellSet(std::int64_t depth, std::vector<CellIndex> cells, ComplexBox frame)
        : depth_(depth), cells_(std::move(cells)), frame_(std::move(frame)) {
        if (depth < 0) throw usage_error("cellset: depth must be >= 0");
        std::sort(cells_.begin(), cells_.end());
        cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    }
    static CellSet empty(std::int64_t depth, ComplexBox frame) {
        return CellSet(depth, {}, std::move(frame));
    }

    std::int64_t depth() const { return depth_; }
    const std::vector<CellIndex>& cells() const { return cells_; }
    const ComplexBox& frame() const { return frame_; }
    bool empty_set() const { return cells_.empty(); }
    std::size_t size() const { return cells_.size(); }

    Dyadic side() const { return Dyadic::pow2(-depth_); }
    Dyadic diagonal_upper() const { return sqrt_upper(Dyadic(2), 24) * side(); }

    ComplexBox cell_box(const CellIndex& c) const {
        Dyadic s = side();
        Dyadic x(BigInt(c.ix), -depth_), y(BigInt(c.iy), -depth_);
        return ComplexBox(x, x + s, y, y + s);
    }

    bool contains_cell(const CellIndex& c) const {
        return std::binary_search(cells_.begin(), cells_.end(), c);
    }

    /// Same point set re-encoded at a finer depth.
    CellSet refined_to(std::int64_t finer) const {
        if (finer < depth_) throw usage_error("refined_to: target depth coarser");
        std::int64_t delta = finer - depth_;
        if (delta == 0) return *this;
        if (delta > 16 || cells_.size() << (2 * delta) > (std::size_t(1) << 28))
            throw resource_error("refined_to: refinement too large");
        std::int64_t f = std::int64_t(1) << delta;
        std::vector<CellIndex> out;
        out.reserve(cells_.size() << (2 * delta));
        for (const auto& c : cells_)
            for (std::int64_t dx = 0; dx < f; ++dx)
                for (std::int64_t dy = 0; dy < f; ++dy)
                    out.push_back({c.ix * f + dx, c.iy * f + dy});
        return CellSet(finer, std::move(out), frame_);
    }

    friend bool operator==(const CellSet& a, const CellSet& b) {
        return a.depth_ == b.depth_ && a.cells_ == b.cells_;
    }

private:
    std::int64_t depth_;
    std::vector<CellIndex> cells_;
    ComplexBox frame_;
};

/// Cells covering a union of closed disks: every disk is contained in the
/// union, and the union lies in the (sqrt(2) * 2^-depth)-neighborhood of the
/// disks. Requires 2^-depth <= min radius / 4.
inline CellSet from_disks(const std::vector<std::pair<DyadicComplex, Dyadic>>& disks,
                          std::int64_t depth) {
    if (depth < 0) throw usage_error("from_disks: depth must be >= 0");
    Dyadic s = Dyadic::pow2(-depth);
    for (const auto& [c, r] : disks) {
        if (r.sign() <= 0) throw usage_error("from_disks: radius must be positive");
        if (s * Dyadic(4) > r)
            throw usage_error("from_disks: depth too coarse for the smallest radius");
    }
    std::vector<CellIndex> out;
    ComplexBox frame = ComplexBox::point({Dyadic(), Dyadic()});
    bool first = true;
    for (const auto& [c, r] : disks) {
        std::int64_t x0 = detail::floor_index(c.re - r, depth) - 1;
        std::int64_t x1 = detail::floor_index(c.re + r, depth) + 1;
        std::int64_t y0 = detail::floor_index(c.im - r, depth) - 1;
        std::int64_t y1 = detail::floor_index(c.im + r, depth) + 1;
        Dyadic r2 = r * r;
        for (std::int64_t ix = x0; ix <= x1; ++ix) {
            Dyadic xl(BigInt(ix), -depth);
            Dyadic dx;
            if (c.re < xl) dx = xl - c.re;
            else if (c.re > xl + s) dx = c.re - (xl + s);
            Dyadic dx2 = dx * dx;
            if (dx2 > r2) continue;
            for (std::int64_t iy = y0; iy <= y1; ++iy) {
                Dyadic yl(BigInt(iy), -depth);
                Dyadic dy;
                if (c.im < yl) dy = yl - c.im;
                else if (c.im > yl + s) dy = c.im - (yl + s);
                if (dx2 + dy * dy <= r2) out.push_back({ix, iy});
            }
        }
        ComplexBox db = ComplexBox::square(c, r + s);
        frame = first ? db : hull(frame, db);
        first = false;
    }
    return CellSet(depth, std::move(out), frame);
}

/// Grid over-approximation of the r-neighborhood: contains the exact
/// r-neighborhood and is contained in the (r + sqrt(2) * 2^-depth)-one.
inline CellSet neighborhood(const CellSet& set, const Dyadic& r) {
    if (r.sign() < 0) throw usage_error("neighborhood: radius must be >= 0");
    if (set.empty_set()) return set;
    std::int64_t depth = set.depth();
    if (r.is_zero()) return set;
    // mask of index offsets whose cells come within r of the base cell
    std::int64_t radius_cells = detail::ceil_index(r, depth) + 1;
    Dyadic rhs = Dyadic(r.mantissa(), r.exponent() + depth); // r * 2^depth
    Dyadic rhs2 = rhs * rhs;
    std::vector<CellIndex> mask;
    for (std::int64_t dx = -radius_cells; dx <= radius_cells; ++dx) {
        std::int64_t gx = dx > 0 ? dx - 1 : (dx < 0 ? -dx - 1 : 0);
        for (std::int64_t dy = -radius_cells; dy <= radius_cells; ++dy) {
            std::int64_t gy = dy > 0 ? dy - 1 : (dy < 0 ? -dy - 1 : 0);
            if (Dyadic(gx * gx + gy * gy) <= rhs2) mask.push_back({dx, dy});
        }
    }
    if (set.size() * mask.size() > (std::size_t(1) << 27))
        throw resource_error("neighborhood: expansion too large");
    std::vector<CellIndex> out;
    out.reserve(set.size() * mask.size());
    for (const auto& c : set.cells())
        for (const auto& m : mask) out.push_back({c.ix + m.ix, c.iy + m.iy});
    ComplexBox f = set.frame();
    Dyadic pad = r + set.side();
    ComplexBox frame(f.re_lo() - pad, f.re_hi() + pad, f.im_lo() - pad, f.im_hi() + pad);
    return CellSet(depth, std::move(out), frame);
}

namespace detail {

inline std::pair<CellSet, CellSet> to_common_depth(const CellSet& a, const CellSet& b) {
    std::int64_t d = std::max(a.depth(), b.depth());
    return {a.refined_to(d), b.refined_to(d)};
}

} // namespace detail

/// Exact containment of the point sets (after refining to the finer grid).
inline bool contained_in(const CellSet& a, const CellSet& b) {
    auto [ra, rb] = detail::to_common_depth(a, b);
    return std::includes(rb.cells().begin(), rb.cells().end(), ra.cells().begin(),
                         ra.cells().end());
}

inline CellSet cellset_union(const CellSet& a, const CellSet& b) {
    auto [ra, rb] = detail::to_common_depth(a, b);
    std::vector<CellIndex> out;
    out.reserve(ra.size() + rb.size());
    std::merge(ra.cells().begin(), ra.cells().end(), rb.cells().begin(), rb.cells().end(),
               std::back_inserter(out));
    return CellSet(ra.depth(), std::move(out), hull(a.frame(), b.frame()));
}

/// Cells of a not in b.
inline CellSet cellset_difference(const CellSet& a, const CellSet& b) {
    auto [ra, rb] = detail::to_common_depth(a, b);
    std::vector<CellIndex> out;
    std::set_difference(ra.cells().begin(), ra.cells().end(), rb.cells().begin(),
                        rb.cells().end(), std::back_inserter(out));
    return CellSet(ra.depth(), std::move(out), a.frame());
}

namespace detail {

// Exact squared Euclidean distance transform on an integer grid
// (two-pass parabola method), distances measured between cell centers.
inline std::vector<std::int64_t> squared_edt(std::int64_t w, std::int64_t h,
                                             const std::vector<char>& source) {
    constexpr std::int64_t kInf = std::int64_t(1) << 60;
    std::vector<std::int64_t> d(static_cast<std::size_t>(w * h), kInf);
    // vertical pass: distance (not squared) to the nearest source in-column
    for (std::int64_t x = 0; x < w; ++x) {
        std::int64_t last = -kInf;
        for (std::int64_t y = 0; y < h; ++y) {
            if (source[static_cast<std::size_t>(x * h + y)]) last = y;
            std::int64_t dy = y - last;
            d[static_cast<std::size_t>(x * h + y)] = dy < (std::int64_t(1) << 29) ? dy * dy : kInf;
        }
        last = kInf;
        for (std::int64_t y = h - 1; y >= 0; --y) {
            if (source[static_cast<std::size_t>(x * h + y)]) last = y;
            std::int64_t dy = last - y;
            if (dy < (std::int64_t(1) << 29)) {
                auto& cur = d[static_cast<std::size_t>(x * h + y)];
                cur = std::min(cur, dy * dy);
            }
        }
    }
    // horizontal pass: lower envelope of parabolas per row, over the columns
    // that found an in-column source
    std::vector<std::int64_t> sx, sf, v;
    std::vector<double> z;
    std::vector<std::int64_t> out(static_cast<std::size_t>(w * h), kInf);
    for (std::int64_t y = 0; y < h; ++y) {
        sx.clear();
        sf.clear();
        for (std::int64_t x = 0; x < w; ++x) {
            std::int64_t fx = d[static_cast<std::size_t>(x * h + y)];
            if (fx < kInf) {
                sx.push_back(x);
                sf.push_back(fx);
            }
        }
        if (sx.empty()) continue;
        std::size_t n = sx.size();
        v.assign(n, 0);
        z.assign(n + 1, 0.0);
        std::size_t k = 0;
        z[0] = -1e100;
        z[1] = 1e100;
        for (std::size_t q = 1; q < n; ++q) {
            double s;
            for (;;) {
                std::size_t p = static_cast<std::size_t>(v[k]);
                s = (double(sf[q] + sx[q] * sx[q]) - double(sf[p] + sx[p] * sx[p])) /
                    (2.0 * double(sx[q] - sx[p]));
                if (s <= z[k] && k > 0) {
                    --k;
                } else {
                    break;
                }
            }
            ++k;
            v[k] = static_cast<std::int64_t>(q);
            z[k] = s;
            z[k + 1] = 1e100;
        }
        k = 0;
        for (std::int64_t x = 0; x < w; ++x) {
            while (z[k + 1] < double(x)) ++k;
            std::size_t p = static_cast<std::size_t>(v[k]);
            std::int64_t dx = x - sx[p];
            out[static_cast<std::size_t>(x * h + y)] = dx * dx + sf[p];
        }
    }
    return out;
}

// max over cells of a of the squared center distance to the nearest cell of
// b, in cell units; 0 entries mean the a-cell belongs to b.
inline std::vector<std::int64_t> center_dist2_to(const CellSet& a, const CellSet& b) {
    std::int64_t minx = a.cells()[0].ix, maxx = a.cells()[0].ix;
    std::int64_t miny = a.cells()[0].iy, maxy = a.cells()[0].iy;
    for (const auto& c : a.cells()) {
        minx = std::min(minx, c.ix); maxx = std::max(maxx, c.ix);
        miny = std::min(miny, c.iy); maxy = std::max(maxy, c.iy);
    }
    for (const auto& c : b.cells()) {
        minx = std::min(minx, c.ix); maxx = std::max(maxx, c.ix);
        miny = std::min(miny, c.iy); maxy = std::max(maxy, c.iy);
    }
    std::int64_t w = maxx - minx + 1, h = maxy - miny + 1;
    if (w * h > (std::int64_t(1) << 26)) throw resource_error("hausdorff: grid too large");
    std::vector<char> src(static_cast<std::size_t>(w * h), 0);
    for (const auto& c : b.cells()) src[static_cast<std::size_t>((c.ix - minx) * h + (c.iy - miny))] = 1;
    std::vector<std::int64_t> edt = squared_edt(w, h, src);
    std::vector<std::int64_t> out;
    out.reserve(a.size());
    for (const auto& c : a.cells())
        out.push_back(edt[static_cast<std::size_t>((c.ix - minx) * h + (c.iy - miny))]);
    return out;
}

} // namespace detail

/// Upper bound on sup_{x in A} dist(x, B); exact when A is contained in B.
inline Dyadic directed_hausdorff_upper(const CellSet& a, const CellSet& b) {
    if (a.empty_set() || b.empty_set())
        throw usage_error("hausdorff: undefined for empty sets");
    auto [ra, rb] = detail::to_common_depth(a, b);
    std::vector<std::int64_t> d2 = detail::center_dist2_to(ra, rb);
    std::int64_t worst = 0;
    for (std::int64_t v : d2) worst = std::max(worst, v);
    if (worst == 0) return Dyadic();
    Dyadic s = ra.side();
    Dyadic halfdiag = sqrt_upper(Dyadic(2), 24) * Dyadic(s.mantissa(), s.exponent() - 1);
    return sqrt_upper(Dyadic(worst), 24) * s + halfdiag;
}

/// Upper bound on the Hausdorff distance, exact to within one cell diagonal
/// at the finer depth; reports exact zero for equal encodings.
inline Dyadic hausdorff_upper(const CellSet& a, const CellSet& b) {
    return max(directed_hausdorff_upper(a, b), directed_hausdorff_upper(b, a));
}

// ---- text and bitmap formats ----

enum class CellClass : std::uint8_t { In = 0, Bnd = 1, Out = 2 };

namespace detail {

inline std::string frame_str(const ComplexBox& f) {
    return f.re_lo().str() + "," + f.re_hi().str() + "," + f.im_lo().str() + "," +
           f.im_hi().str();
}

} // namespace detail

/// Cell-list text: optional '#' comment lines, then the header
/// "depth=L frame=a,b,c,d poly=...", then one "ix iy [class]" line per cell.
inline std::string cell_list_text(const CellSet& set, std::string_view poly,
                                  const std::vector<std::string>& comments = {},
                                  const std::vector<CellClass>* classes = nullptr) {
    std::ostringstream out;
    for (const auto& c : comments) out << "# " << c << "\n";
    out << "depth=" << set.depth() << " frame=" << detail::frame_str(set.frame())
        << " poly=" << poly << "\n";
    const auto& cells = set.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i].ix << " " << cells[i].iy;
        if (classes) out << " " << ((*classes)[i] == CellClass::In ? "IN" : "BND");
        out << "\n";
    }
    return out.str();
}

struct ParsedCellList {
    CellSet set;
    std::vector<CellClass> classes; // empty when the file carries no classes
    std::string poly;
};

inline ParsedCellList parse_cell_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = line;
        break;
    }
    auto field = [&](const std::string& key) -> std::string {
        std::size_t pos = header.find(key + "=");
        if (pos == std::string::npos) throw usage_error("cell list: missing " + key);
        std::size_t end = header.find(' ', pos);
        return header.substr(pos + key.size() + 1,
                             (end == std::string::npos ? header.size() : end) - pos -
                                 key.size() - 1);
    };
    std::int64_t depth = std::stoll(field("depth"));
    std::string fr = field("frame");
    std::vector<Dyadic> fv;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= fr.size(); ++i) {
        if (i == fr.size() || fr[i] == ',') {
            auto d = Dyadic::parse(fr.substr(start, i - start));
            if (!d) throw usage_error("cell list: bad frame");
            fv.push_back(*d);
            start = i + 1;
        }
    }
    if (fv.size() != 4) throw usage_error("cell list: bad frame");
    std::string poly;
    {
        std::size_t pos = header.find("poly=");
        if (pos != std::string::npos) poly = header.substr(pos + 5);
    }
    std::vector<CellIndex> cells;
    std::vector<CellClass> classes;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        CellIndex c;
        std::string cls;
        ls >> c.ix >> c.iy >> cls;
        cells.push_back(c);
        if (!cls.empty()) classes.push_back(cls == "IN" ? CellClass::In : CellClass::Bnd);
    }
    if (!classes.empty() && classes.size() != cells.size())
        throw usage_error("cell list: class column incomplete");
    // note: CellSet canonicalizes order; classes are only meaningful when the
    // file was written canonically, which this library always does.
    return {CellSet(depth, std::move(cells), ComplexBox(fv[0], fv[1], fv[2], fv[3])),
            std::move(classes), std::move(poly)};
}

/// Raw grayscale raster over the frame: one byte per pixel, 0 = OUT,
/// 128 = BND, 255 = IN, row-major with the top row at the highest imaginary
/// coordinate. Pixel (row, col) covers cell (ix0 + col, iy1 - 1 - row).
struct BitmapData {
    std::string bytes;
    std::int64_t width = 0, height = 0;
    std::string sidecar; // one line: depth, frame, width, height
};

inline BitmapData render_bitmap(const CellSet& set, const std::vector<CellClass>* classes = nullptr) {
    std::int64_t d = set.depth();
    std::int64_t x0 = detail::floor_index(set.frame().re_lo(), d);
    std::int64_t x1 = detail::ceil_index(set.frame().re_hi(), d);
    std::int64_t y0 = detail::floor_index(set.frame().im_lo(), d);
    std::int64_t y1 = detail::ceil_index(set.frame().im_hi(), d);
    std::int64_t w = std::max<std::int64_t>(x1 - x0, 1);
    std::int64_t h = std::max<std::int64_t>(y1 - y0, 1);
    if (w * h > (std::int64_t(1) << 26)) throw resource_error("bitmap: raster too large");
    BitmapData bm;
    bm.width = w;
    bm.height = h;
    bm.bytes.assign(static_cast<std::size_t>(w * h), '\0');
    const auto& cells = set.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::int64_t col = cells[i].ix - x0;
        std::int64_t row = (y1 - 1) - cells[i].iy;
        if (col < 0 || col >= w || row < 0 || row >= h) continue;
        char v = static_cast<char>(0xFF);
        if (classes && (*classes)[i] == CellClass::Bnd) v = static_cast<char>(0x80);
        bm.bytes[static_cast<std::size_t>(row * w + col)] = v;
    }
    std::ostringstream side;
    side << "depth=" << d << " frame=" << detail::frame_str(set.frame()) << " width=" << w
         << " height=" << h << "\n";
    bm.sidecar = side.str();
    return bm;
}

} // namespace juliacert
