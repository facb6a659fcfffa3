#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fatpart/errors.hpp"
#include "fatpart/geometry.hpp"
#include "fatpart/hierarchy.hpp"
#include "fatpart/util.hpp"

namespace fatpart {

enum class Method { angular, greedy, random, greedy_rect };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::angular: return "angular";
        case Method::greedy: return "greedy";
        case Method::random: return "random";
        case Method::greedy_rect: return "greedy-rect";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    if (s == "angular") return Method::angular;
    if (s == "greedy") return Method::greedy;
    if (s == "random") return Method::random;
    if (s == "greedy-rect" || s == "greedy_rect") return Method::greedy_rect;
    return std::nullopt;
}

struct PartitionConfig {
    int theta_samples = 64;          // uniformly spaced cut orientations tried by greedy
    std::uint64_t seed = 0;          // seeds the random method (per-node streams)
    bool constructive_candidates = true; // include the worst-case-bounded cut candidates
    int threads = 1;
};

/// Hierarchical polygon assignment: polygons[i] is node i's region,
/// depths[i] its depth in the binary tree. The root gets the unit square.
struct PolygonalPartition {
    Method method = Method::greedy;
    std::vector<ConvexPolygon> polygons;
    std::vector<int> depths;
};

struct PartitionStats {
    double avg_aspect_ratio = 0.0;
    double max_aspect_ratio = 0.0;
    std::vector<double> per_depth_max;
    std::size_t polygon_count = 0;
};

using PolygonPair = std::pair<ConvexPolygon, ConvexPolygon>;

/// Cuts at the orientation farthest from every edge direction; the smaller
/// piece always goes to the left of the oriented cut line.
inline PolygonPair angular_cut(const ConvexPolygon& P, double a) {
    detail::require(a > 0.0 && a < 1.0, "area fraction must lie in (0,1)");
    const double theta = best_angular_orientation(P);
    if (a <= 0.5) {
        CutResult r = cut_at_orientation(P, theta, a, CutSide::left);
        return {std::move(r.first), std::move(r.second)};
    }
    CutResult r = cut_at_orientation(P, theta, a, CutSide::right);
    return {std::move(r.first), std::move(r.second)};
}

/// Cuts at a uniformly random orientation drawn from rng; smaller piece on
/// the left, as in angular_cut.
inline PolygonPair random_cut(const ConvexPolygon& P, double a, Splitmix64& rng) {
    detail::require(a > 0.0 && a < 1.0, "area fraction must lie in (0,1)");
    const double theta = rng.next_double() * kPi;
    const CutSide side = (a <= 0.5) ? CutSide::left : CutSide::right;
    CutResult r = cut_at_orientation(P, theta, a, side);
    return {std::move(r.first), std::move(r.second)};
}

namespace detail {

struct CutCandidate {
    double theta;
    CutSide side;
};

/// Cut orthogonal to the interior-angle bisector at the sharpest vertex,
/// taking the piece that contains that vertex. Keeps tiny pieces fat.
inline CutCandidate corner_candidate(const ConvexPolygon& P) {
    const std::size_t vi = min_interior_angle_vertex(P);
    const std::size_t k = P.vertices.size();
    const Vec2 v = P.vertices[vi];
    const Vec2 to_next = P.vertices[(vi + 1) % k] - v;
    const Vec2 to_prev = P.vertices[(vi + k - 1) % k] - v;
    const Vec2 bis = (1.0 / norm(to_next)) * to_next + (1.0 / norm(to_prev)) * to_prev;
    const double theta = fold_angle(std::atan2(bis.y, bis.x) + kPi / 2.0);
    const Vec2 n{-std::sin(theta), std::cos(theta)};
    // The sharp vertex minimizes the projection onto the inward bisector, so
    // it sits on the low side exactly when n points along the bisector.
    const CutSide side = (dot(n, bis) > 0.0) ? CutSide::right : CutSide::left;
    return {theta, side};
}

/// Cuts orthogonal to the diameter, taking the piece at one chosen endpoint.
inline CutCandidate diameter_candidate(const ConvexPolygon& P, bool at_first_endpoint) {
    const auto [pi, qi] = diameter_endpoints(P);
    const Vec2 dir = P.vertices[qi] - P.vertices[pi];
    const double theta = fold_angle(std::atan2(dir.y, dir.x) + kPi / 2.0);
    const Vec2 n{-std::sin(theta), std::cos(theta)};
    const bool low_is_p = dot(n, dir) > 0.0;
    // left piece is the high-projection side
    const CutSide side_for_p = low_is_p ? CutSide::right : CutSide::left;
    if (at_first_endpoint) return {theta, side_for_p};
    return {theta, side_for_p == CutSide::left ? CutSide::right : CutSide::left};
}

} // namespace detail

/// Tries a grid of orientations (both sides) plus the worst-case-bounded
/// candidates and keeps the cut minimizing the larger piece aspect ratio.
inline PolygonPair greedy_cut(const ConvexPolygon& P, double a, const PartitionConfig& cfg = {}) {
    detail::require(a > 0.0 && a < 1.0, "area fraction must lie in (0,1)");
    detail::require(cfg.theta_samples >= 4, "theta_samples must be at least 4");
    std::vector<detail::CutCandidate> candidates;
    candidates.reserve(static_cast<std::size_t>(cfg.theta_samples) * 2 + 3);
    for (int i = 0; i < cfg.theta_samples; ++i) {
        const double theta = kPi * static_cast<double>(i) / static_cast<double>(cfg.theta_samples);
        candidates.push_back({theta, CutSide::left});
        candidates.push_back({theta, CutSide::right});
    }
    if (cfg.constructive_candidates) {
        const double k = static_cast<double>(P.vertices.size());
        if (std::min(a, 1.0 - a) <= 1.0 / (k * k)) {
            candidates.push_back(detail::corner_candidate(P));
        }
        candidates.push_back(detail::diameter_candidate(P, true));
        candidates.push_back(detail::diameter_candidate(P, false));
    }

    std::optional<PolygonPair> best;
    double best_score = 0.0;
    for (const auto& cand : candidates) {
        try {
            CutResult r = cut_at_orientation(P, cand.theta, a, cand.side);
            const double score = std::max(aspect_ratio(r.first), aspect_ratio(r.second));
            if (!best || score < best_score) {
                best_score = score;
                best = PolygonPair{std::move(r.first), std::move(r.second)};
            }
        } catch (const DegenerateCut&) {
            // candidate unusable at this area fraction; try the next one
        }
    }
    if (!best) throw DegenerateCut("no cut candidate produced valid pieces");
    return std::move(*best);
}

/// Axis-aligned split of an axis-aligned rectangle, perpendicular to its
/// longer side (ties cut vertically); the first piece sits at the
/// low-coordinate end.
inline PolygonPair greedy_rect_cut(const ConvexPolygon& P, double a) {
    detail::require(a > 0.0 && a < 1.0, "area fraction must lie in (0,1)");
    double x0 = P.vertices[0].x, x1 = x0, y0 = P.vertices[0].y, y1 = y0;
    for (const Vec2& v : P.vertices) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double w = x1 - x0;
    const double h = y1 - y0;
    detail::require(P.vertices.size() == 4 && std::abs(w * h - area(P)) <= 1e-9 * w * h,
                    "greedy_rect_cut needs an axis-aligned rectangle");
    auto rect = [](double ax, double ay, double bx, double by) {
        return ConvexPolygon{{{ax, ay}, {bx, ay}, {bx, by}, {ax, by}}};
    };
    if (w >= h) {
        const double xm = x0 + a * w;
        if (!(xm > x0 && xm < x1)) throw DegenerateCut("rectangle cut collapsed");
        return {rect(x0, y0, xm, y1), rect(xm, y0, x1, y1)};
    }
    const double ym = y0 + a * h;
    if (!(ym > y0 && ym < y1)) throw DegenerateCut("rectangle cut collapsed");
    return {rect(x0, y0, x1, ym), rect(x0, ym, x1, y1)};
}

namespace detail {

struct PartitionJob {
    const BinaryTree& tree;
    Method method;
    const PartitionConfig& cfg;
    PolygonalPartition& out;

    PolygonPair cut_node(int id, const ConvexPolygon& poly, double a) const {
        switch (method) {
            case Method::angular: return angular_cut(poly, a);
            case Method::greedy: return greedy_cut(poly, a, cfg);
            case Method::random: {
                Splitmix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(id)));
                return random_cut(poly, a, rng);
            }
            case Method::greedy_rect: return greedy_rect_cut(poly, a);
        }
        throw InternalError("unhandled method");
    }

    void run(int id, int spawn_budget) const {
        const TreeNode& node = tree.node(id);
        if (node.is_leaf()) return;
        internal_check(node.children.size() == 2, "partition needs a binary tree");
        const int c1 = node.children[0];
        const int c2 = node.children[1];
        const double w1 = tree.node(c1).weight;
        const double w2 = tree.node(c2).weight;
        const int small = (w1 <= w2) ? c1 : c2;
        const int big = (w1 <= w2) ? c2 : c1;
        const double a = tree.node(small).weight / (w1 + w2);
        PolygonPair pieces = cut_node(id, out.polygons[static_cast<std::size_t>(id)], a);
        out.polygons[static_cast<std::size_t>(small)] = std::move(pieces.first);
        out.polygons[static_cast<std::size_t>(big)] = std::move(pieces.second);
        out.depths[static_cast<std::size_t>(c1)] = out.depths[static_cast<std::size_t>(id)] + 1;
        out.depths[static_cast<std::size_t>(c2)] = out.depths[static_cast<std::size_t>(id)] + 1;
        if (spawn_budget > 0) {
            auto fut = std::async(std::launch::async,
                                  [this, c1, spawn_budget] { run(c1, spawn_budget - 1); });
            run(c2, spawn_budget - 1);
            fut.get();
        } else {
            run(c1, 0);
            run(c2, 0);
        }
    }
};

} // namespace detail

/// Builds the hierarchical polygon assignment for a binary tree: the root
/// gets the unit square and every internal node's region is cut between its
/// two children with areas proportional to their weights. The lighter child
/// receives the first piece of the cut.
inline PolygonalPartition partition(const BinaryTree& tree, Method method,
                                    const PartitionConfig& cfg = {}) {
    detail::require(cfg.theta_samples >= 4, "theta_samples must be at least 4");
    detail::require(cfg.threads >= 1, "threads must be at least 1");
    PolygonalPartition out;
    out.method = method;
    out.polygons.assign(tree.node_count(), ConvexPolygon{});
    out.depths.assign(tree.node_count(), 0);
    out.polygons[static_cast<std::size_t>(tree.root)] = unit_square();
    int budget = 0;
    while ((1 << budget) < cfg.threads) ++budget;
    if (budget > 0) budget += 2; // a little oversubscription smooths imbalance
    detail::PartitionJob job{tree, method, cfg, out};
    job.run(tree.root, budget);
    return out;
}

/// Aggregates aspect ratios over every node polygon (root included).
inline PartitionStats stats(const PolygonalPartition& p) {
    PartitionStats s;
    s.polygon_count = p.polygons.size();
    if (p.polygons.empty()) return s;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.polygons.size(); ++i) {
        const double ar = aspect_ratio(p.polygons[i]);
        sum += ar;
        s.max_aspect_ratio = std::max(s.max_aspect_ratio, ar);
        const auto depth = static_cast<std::size_t>(p.depths[i]);
        if (s.per_depth_max.size() <= depth) s.per_depth_max.resize(depth + 1, 0.0);
        s.per_depth_max[depth] = std::max(s.per_depth_max[depth], ar);
    }
    s.avg_aspect_ratio = sum / static_cast<double>(p.polygons.size());
    return s;
}

} // namespace fatpart
