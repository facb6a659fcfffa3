#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "fatpart/errors.hpp"

namespace fatpart {

inline constexpr double kPi = std::numbers::pi;

// Tolerances shared across the geometric routines.
inline constexpr double kAngleTol = 1e-9;     // angle comparisons (radians)
inline constexpr double kBoundaryTol = 1e-9;  // point-on-boundary tests
inline constexpr double kVertexMergeRel = 1e-12;  // vertex merge, relative to extent
inline constexpr double kCollinearTol = 1e-12;    // sin of turn angle
inline constexpr double kGapTieTol = 1e-12;       // gap-width ties in the orientation scan
inline constexpr double kAreaFloor = 1e-300;      // smallest admissible piece area

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Convex polygon, vertices in counter-clockwise order.
struct ConvexPolygon {
    std::vector<Vec2> vertices;

    std::size_t size() const { return vertices.size(); }
    const Vec2& operator[](std::size_t i) const { return vertices[i]; }
};

inline ConvexPolygon unit_square() {
    return ConvexPolygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
}

/// Shoelace area. Vertices are translated to a local frame first so that the
/// result stays accurate for very small polygons far from the origin.
inline double area(const ConvexPolygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return 0.0;
    const Vec2 o = p[0];
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        s += cross(p[i] - o, p[i + 1] - o);
    }
    return 0.5 * s;
}

/// Largest pairwise vertex distance.
inline double diameter(const ConvexPolygon& p) {
    double best = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const Vec2 d = p[j] - p[i];
            best = std::max(best, dot(d, d));
        }
    return std::sqrt(best);
}

/// Vertex pair realizing the diameter; ties resolved to the lexicographically
/// smallest index pair.
inline std::pair<std::size_t, std::size_t> diameter_endpoints(const ConvexPolygon& p) {
    double best = -1.0;
    std::pair<std::size_t, std::size_t> arg{0, 0};
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const Vec2 d = p[j] - p[i];
            const double v = dot(d, d);
            if (v > best) {
                best = v;
                arg = {i, j};
            }
        }
    return arg;
}

/// diameter(P)^2 / area(P).
inline double aspect_ratio(const ConvexPolygon& p) {
    const double d = diameter(p);
    return d * d / area(p);
}

/// Largest bounding-box side; used to scale tolerances.
inline double extent(const ConvexPolygon& p) {
    double lox = std::numeric_limits<double>::infinity(), hix = -lox;
    double loy = lox, hiy = -lox;
    for (const Vec2& v : p.vertices) {
        lox = std::min(lox, v.x);
        hix = std::max(hix, v.x);
        loy = std::min(loy, v.y);
        hiy = std::max(hiy, v.y);
    }
    return std::max(hix - lox, hiy - loy);
}

/// Interior angle at vertex i (radians), assuming CCW orientation.
inline double interior_angle(const ConvexPolygon& p, std::size_t i) {
    const std::size_t n = p.size();
    const Vec2 a = p[(i + n - 1) % n], b = p[i], c = p[(i + 1) % n];
    const Vec2 d1 = b - a, d2 = c - b;
    const double turn = std::atan2(cross(d1, d2), dot(d1, d2));
    return kPi - turn;
}

/// Index of the vertex with the smallest interior angle (ties: lowest index).
inline std::size_t min_interior_angle_vertex(const ConvexPolygon& p) {
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = interior_angle(p, i);
        if (a < best) {
            best = a;
            arg = i;
        }
    }
    return arg;
}

/// Folds any angle into the line-orientation range [0, pi).
inline double fold_angle(double th) {
    th = std::fmod(th, kPi);
    if (th < 0.0) th += kPi;
    if (th >= kPi) th -= kPi;
    return th;
}

/// Direction of edge (a,b) folded into [0, pi).
inline double edge_orientation(Vec2 a, Vec2 b) {
    return fold_angle(std::atan2(b.y - a.y, b.x - a.x));
}

/// Acute angle between two line orientations in [0, pi).
inline double orientation_angle(double t1, double t2) {
    double d = std::fabs(t1 - t2);
    while (d >= kPi) d -= kPi;
    return std::min(d, kPi - d);
}

/// Smallest acute angle between direction theta and any edge line of P.
inline double min_edge_angle(const ConvexPolygon& p, double theta) {
    double best = kPi;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, orientation_angle(theta, edge_orientation(p[i], p[(i + 1) % n])));
    }
    return best;
}

/// Midpoint of the widest circular gap (period pi) in the multiset of edge
/// orientations. Equal-width gaps resolve to the smaller midpoint angle.
inline double best_angular_orientation(const ConvexPolygon& p) {
    std::vector<double> os;
    os.reserve(p.size());
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) os.push_back(edge_orientation(p[i], p[(i + 1) % n]));
    std::sort(os.begin(), os.end());
    os.erase(std::unique(os.begin(), os.end()), os.end());
    if (os.size() == 1) return fold_angle(os[0] + kPi / 2.0);
    double best_gap = -1.0, best_mid = 0.0;
    for (std::size_t i = 0; i < os.size(); ++i) {
        const double lo = os[i];
        const double hi = (i + 1 < os.size()) ? os[i + 1] : os[0] + kPi;
        const double gap = hi - lo;
        const double mid = fold_angle(lo + gap / 2.0);
        // Ties are judged with a tolerance: symmetric shapes produce gaps that
        // differ only by rounding of the folded orientations.
        const bool wider = gap > best_gap + kGapTieTol;
        const bool tied = std::fabs(gap - best_gap) <= kGapTieTol;
        if (wider || (tied && mid < best_mid)) {
            best_gap = std::max(best_gap, gap);
            best_mid = mid;
        }
    }
    return best_mid;
}

namespace detail {

inline bool on_line_x(const Vec2& a, const Vec2& b, double x0) {
    return std::fabs(a.x - x0) <= kBoundaryTol && std::fabs(b.x - x0) <= kBoundaryTol;
}

inline bool on_line_y(const Vec2& a, const Vec2& b, double y0) {
    return std::fabs(a.y - y0) <= kBoundaryTol && std::fabs(b.y - y0) <= kBoundaryTol;
}

} // namespace detail

/// True when every pair of edges either meets at an angle of at least
/// phi (minus tolerance) or the two edges lie on opposite sides of the unit
/// square (bottom/top or left/right).
inline bool phi_separated(const ConvexPolygon& p, double phi) {
    const std::size_t n = p.size();
    std::vector<double> orient(n);
    std::vector<std::array<bool, 4>> side(n); // bottom, top, left, right
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = p[i], b = p[(i + 1) % n];
        orient[i] = edge_orientation(a, b);
        side[i] = {detail::on_line_y(a, b, 0.0), detail::on_line_y(a, b, 1.0),
                   detail::on_line_x(a, b, 0.0), detail::on_line_x(a, b, 1.0)};
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (orientation_angle(orient[i], orient[j]) >= phi - kAngleTol) continue;
            const bool opposite = (side[i][0] && side[j][1]) || (side[i][1] && side[j][0]) ||
                                  (side[i][2] && side[j][3]) || (side[i][3] && side[j][2]);
            if (!opposite) return false;
        }
    return true;
}

/// Removes duplicate consecutive vertices (within a scale-relative tolerance)
/// and vertices whose turn angle is negligible. Returns false when fewer than
/// three vertices survive.
inline bool cleanup_polygon(ConvexPolygon& p) {
    if (p.size() < 3) return false;
    const double tol = kVertexMergeRel * std::max(extent(p), std::numeric_limits<double>::min());
    bool changed = true;
    while (changed && p.size() >= 3) {
        changed = false;
        // Merge consecutive near-coincident vertices.
        std::vector<Vec2> out;
        out.reserve(p.size());
        for (const Vec2& v : p.vertices) {
            if (!out.empty() && dist(out.back(), v) <= tol) {
                changed = true;
                continue;
            }
            out.push_back(v);
        }
        if (out.size() >= 2 && dist(out.front(), out.back()) <= tol) {
            out.pop_back();
            changed = true;
        }
        p.vertices = std::move(out);
        if (p.size() < 3) return false;
        // Drop vertices with a negligible turn.
        std::vector<Vec2> kept;
        kept.reserve(p.size());
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = p[(i + n - 1) % n], b = p[i], c = p[(i + 1) % n];
            const Vec2 d1 = b - a, d2 = c - b;
            const double l1 = norm(d1), l2 = norm(d2);
            if (std::fabs(cross(d1, d2)) < kCollinearTol * l1 * l2) {
                changed = true;
                continue;
            }
            kept.push_back(b);
        }
        p.vertices = std::move(kept);
    }
    return p.size() >= 3;
}

enum class CutSide { left, right };

/// Straight cut of a convex polygon. `orientation` is the direction of the
/// cut segment in [0, pi); `a`/`b` are its endpoints ordered along that
/// direction; `small_side` records which side of the oriented segment holds
/// the smaller requested piece.
struct Cut {
    double orientation = 0.0;
    Vec2 a, b;
    CutSide small_side = CutSide::left;
};

struct CutResult {
    ConvexPolygon first;  // requested fraction of the area
    ConvexPolygon second; // remainder
    Cut cut;
};

namespace detail {

struct SplitOutcome {
    ConvexPolygon low, high; // low: dot(v,n) <= t, high: dot(v,n) >= t
    Vec2 cut_a, cut_b;       // shared boundary, ordered along the cut direction
    bool cut_found = false;
};

/// Splits P by the line dot(v,n) = t in a single pass so the two pieces share
/// bit-identical boundary vertices.
inline SplitOutcome split_at_offset(const ConvexPolygon& p, Vec2 n, double t) {
    SplitOutcome out;
    const std::size_t k = p.size();
    std::vector<double> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = dot(p[i], n) - t;
    std::vector<Vec2> shared;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 v = p[i];
        const double si = s[i];
        if (si <= 0.0) out.low.vertices.push_back(v);
        if (si >= 0.0) out.high.vertices.push_back(v);
        if (si == 0.0) shared.push_back(v);
        const std::size_t j = (i + 1) % k;
        const double sj = s[j];
        if ((si < 0.0 && sj > 0.0) || (si > 0.0 && sj < 0.0)) {
            const double f = si / (si - sj);
            const Vec2 r = v + f * (p[j] - v);
            out.low.vertices.push_back(r);
            out.high.vertices.push_back(r);
            shared.push_back(r);
        }
    }
    if (shared.size() >= 2) {
        const Vec2 u{n.y, -n.x}; // the cut direction whose left normal is n
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        Vec2 va{}, vb{};
        for (const Vec2& q : shared) {
            const double c = dot(q, u);
            if (c < lo) {
                lo = c;
                va = q;
            }
            if (c > hi) {
                hi = c;
                vb = q;
            }
        }
        out.cut_a = va;
        out.cut_b = vb;
        out.cut_found = lo < hi;
    }
    return out;
}

/// Length of the intersection of P with the line dot(v,n) = t.
inline double chord_length(const ConvexPolygon& p, Vec2 n, double t) {
    const std::size_t k = p.size();
    const Vec2 u{n.y, -n.x};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = (i + 1) % k;
        const double si = dot(p[i], n) - t;
        const double sj = dot(p[j], n) - t;
        if (si == 0.0) {
            const double c = dot(p[i], u);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        if ((si < 0.0 && sj > 0.0) || (si > 0.0 && sj < 0.0)) {
            const double f = si / (si - sj);
            const Vec2 r = p[i] + f * (p[j] - p[i]);
            const double c = dot(r, u);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return hi > lo ? hi - lo : 0.0;
}

inline double low_side_area(const ConvexPolygon& p, Vec2 n, double t) {
    ConvexPolygon low = split_at_offset(p, n, t).low;
    return low.size() >= 3 ? area(low) : 0.0;
}

/// Solves low_side_area(p, n, t) == target. The area is piecewise quadratic
/// in t between consecutive vertex projections, so the active piece is solved
/// in closed form; a bisection pass (up to 80 iterations) refines or replaces
/// the root when the closed form is numerically marginal.
inline double solve_low_offset(const ConvexPolygon& p, Vec2 n, double target) {
    std::vector<double> bp;
    bp.reserve(p.size());
    for (const Vec2& v : p.vertices) bp.push_back(dot(v, n));
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    const std::size_t m = bp.size();
    if (m < 2) return bp.empty() ? 0.0 : bp[0];
    std::vector<double> chord(m), pre(m);
    for (std::size_t i = 0; i < m; ++i) chord[i] = chord_length(p, n, bp[i]);
    pre[0] = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        pre[i] = pre[i - 1] + 0.5 * (chord[i - 1] + chord[i]) * (bp[i] - bp[i - 1]);
    }
    const double total = pre[m - 1];
    double want = std::clamp(target, 0.0, total);

    std::size_t seg = m - 1;
    for (std::size_t i = 1; i < m; ++i) {
        if (want <= pre[i] || i == m - 1) {
            seg = i;
            break;
        }
    }
    const double t0 = bp[seg - 1], t1 = bp[seg];
    const double h = t1 - t0;
    const double A0 = pre[seg - 1];
    const double f0 = chord[seg - 1];
    const double slope = h > 0.0 ? (chord[seg] - f0) / h : 0.0;
    const double K = want - A0;

    double t = t0;
    bool solved = false;
    if (h > 0.0) {
        // 0.5*slope*s^2 + f0*s - K = 0, stable quadratic formula.
        const double disc = f0 * f0 + 2.0 * slope * K;
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            double s;
            if (f0 + root > 0.0) {
                s = 2.0 * K / (f0 + root);
            } else if (slope != 0.0) {
                s = (-f0 + root) / slope;
            } else {
                s = 0.0;
            }
            if (std::isfinite(s)) {
                t = std::clamp(t0 + s, t0, t1);
                solved = true;
            }
        }
    }
    // Refine (or recover) with bisection on the exact clipped area.
    const double tol = std::max(1e-12 * want, 1e-16 * total);
    double err = low_side_area(p, n, t) - want;
    if (!solved || std::fabs(err) > tol) {
        double lo = t0, hi = t1;
        if (solved && err > 0.0) hi = t;
        if (solved && err < 0.0) lo = t;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double e = low_side_area(p, n, mid) - want;
            if (e < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (std::fabs(e) <= tol) {
                lo = hi = mid;
                break;
            }
        }
        t = 0.5 * (lo + hi);
    }
    return t;
}

} // namespace detail

/// Cuts P with a straight segment of direction `theta` so that the piece on
/// `small_side` of the oriented segment has area `fraction * area(P)`.
/// Returns that piece first. Throws DegenerateCut when no positive-area split
/// is representable.
inline CutResult cut_at_orientation(const ConvexPolygon& p, double theta, double fraction,
                                    CutSide small_side) {
    detail::require(fraction > 0.0 && fraction < 1.0, "cut fraction must lie in (0,1)");
    const double total = area(p);
    if (!(total > kAreaFloor)) throw DegenerateCut("polygon area underflow");
    if (!(fraction * total > kAreaFloor) || !((1.0 - fraction) * total > kAreaFloor)) {
        throw DegenerateCut("requested piece area underflows");
    }
    // Solve on the requested piece's own side of the cut (the left side is
    // where the left normal points, so the left piece is the LOW side of the
    // flipped normal). Solving for `fraction` directly keeps full precision
    // for tiny fractions, which 1 - fraction would round away.
    const bool flipped = (small_side == CutSide::left);
    const Vec2 n = flipped ? Vec2{std::sin(theta), -std::cos(theta)}
                           : Vec2{-std::sin(theta), std::cos(theta)};
    double t = detail::solve_low_offset(p, n, fraction * total);

    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    for (const Vec2& v : p.vertices) {
        const double s = dot(v, n);
        tmin = std::min(tmin, s);
        tmax = std::max(tmax, s);
    }
    auto try_split = [&](double tt, CutResult& out) -> bool {
        detail::SplitOutcome sp = detail::split_at_offset(p, n, tt);
        ConvexPolygon low = std::move(sp.low), high = std::move(sp.high);
        if (!cleanup_polygon(low) || !cleanup_polygon(high)) return false;
        if (!(area(low) > kAreaFloor) || !(area(high) > kAreaFloor)) return false;
        if (!sp.cut_found) return false;
        Cut cut;
        cut.orientation = theta;
        // Endpoints stay ordered along the cut direction of theta; the
        // flipped normal reverses the traversal, so swap them back.
        cut.a = flipped ? sp.cut_b : sp.cut_a;
        cut.b = flipped ? sp.cut_a : sp.cut_b;
        cut.small_side = small_side;
        out = CutResult{std::move(low), std::move(high), cut};
        return true;
    };

    CutResult result;
    if (try_split(t, result)) return result;
    // The ideal offset is unrepresentable (piece thinner than the vertex
    // grid). Step toward the polygon interior with doubling stride until both
    // pieces are genuine polygons.
    const bool step_up = (t - tmin) <= (tmax - t);
    const double bound = step_up ? tmax : tmin;
    double delta = std::numeric_limits<double>::epsilon() *
                   std::max({std::fabs(t), std::fabs(tmin), std::fabs(tmax), 1e-300});
    for (int i = 0; i < 200; ++i) {
        const double probe = step_up ? t + delta : t - delta;
        if (step_up ? probe >= bound : probe <= bound) break;
        if (try_split(probe, result)) return result;
        delta *= 2.0;
    }
    throw DegenerateCut("no positive-area split representable at this offset");
}

// ---------------------------------------------------------------------------
// Axis-aligned hyperrectangles in R^d.
// ---------------------------------------------------------------------------

struct HyperRect {
    std::vector<double> origin; // corner with the smallest coordinates
    std::vector<double> sides;  // strictly positive lengths

    std::size_t dim() const { return sides.size(); }
};

inline double volume(const HyperRect& r) {
    double v = 1.0;
    for (double s : r.sides) v *= s;
    return v;
}

inline double rect_aspect_ratio(const HyperRect& r) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double s : r.sides) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return hi / lo;
}

inline double diagonal(const HyperRect& r) {
    double s2 = 0.0;
    for (double s : r.sides) s2 += s * s;
    return std::sqrt(s2);
}

inline std::vector<double> center(const HyperRect& r) {
    std::vector<double> c(r.dim());
    for (std::size_t i = 0; i < r.dim(); ++i) c[i] = r.origin[i] + 0.5 * r.sides[i];
    return c;
}

inline bool rect_contains_point(const HyperRect& r, const std::vector<double>& p, double tol) {
    for (std::size_t i = 0; i < r.dim(); ++i) {
        if (p[i] < r.origin[i] - tol || p[i] > r.origin[i] + r.sides[i] + tol) return false;
    }
    return true;
}

inline bool rect_contains_rect(const HyperRect& outer, const HyperRect& inner, double tol) {
    for (std::size_t i = 0; i < outer.dim(); ++i) {
        if (inner.origin[i] < outer.origin[i] - tol) return false;
        if (inner.origin[i] + inner.sides[i] > outer.origin[i] + outer.sides[i] + tol) return false;
    }
    return true;
}

/// True when the interiors of a and b do not overlap (tol shrinks each box).
inline bool rects_disjoint(const HyperRect& a, const HyperRect& b, double tol) {
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.origin[i] + a.sides[i] <= b.origin[i] + tol) return true;
        if (b.origin[i] + b.sides[i] <= a.origin[i] + tol) return true;
    }
    return false;
}

/// Shrinks R to the given volume, keeping the corner with the smallest
/// coordinates fixed. The longest sides are reduced first, levelling them
/// toward equality, so the rectangular aspect ratio never increases.
inline HyperRect shrink_to_volume(const HyperRect& r, double target) {
    const double vol = volume(r);
    if (target >= vol) return r;
    detail::require(target > 0.0, "shrink target must be positive");
    const std::size_t d = r.dim();
    std::vector<double> sorted = r.sides;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    // Find the cap level L so that prod_i min(side_i, L) == target.
    double cap = 0.0;
    double tail = 1.0; // product of sides strictly below the cap
    for (std::size_t m = 1; m <= d; ++m) {
        tail = 1.0;
        for (std::size_t i = m; i < d; ++i) tail *= sorted[i];
        const double l = std::pow(target / tail, 1.0 / static_cast<double>(m));
        const double lo = (m < d) ? sorted[m] : 0.0;
        if (l >= lo - 1e-15 * sorted[0] && l <= sorted[m - 1] * (1.0 + 1e-15)) {
            cap = std::min(l, sorted[m - 1]);
            break;
        }
    }
    if (cap <= 0.0) cap = std::pow(target, 1.0 / static_cast<double>(d));
    HyperRect out = r;
    for (std::size_t i = 0; i < d; ++i) out.sides[i] = std::min(out.sides[i], cap);
    // Polish the volume on one capped side so the target is met exactly.
    const double got = volume(out);
    if (got != target && got > 0.0) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (out.sides[i] < r.sides[i]) {
                j = i;
                break;
            }
        }
        out.sides[j] = std::min(out.sides[j] * (target / got), r.sides[j]);
    }
    return out;
}

} // namespace fatpart
