#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fatpart/errors.hpp"
#include "fatpart/geometry.hpp"
#include "fatpart/metric.hpp"
#include "fatpart/slack.hpp"

namespace fatpart {

struct HstNode {
    double label = 0.0; // distance between leaves whose paths join here
    int height = 0;     // leaves sit at height 0
    std::vector<int> children;
    int parent = -1;
    int leaf_index = -1; // metric point index for leaves, -1 otherwise
};

/// Tree with all leaves on one level and labels doubling per level upward;
/// leaf distances (in the rescaled metric) are the labels of their lowest
/// common ancestors.
struct Hst {
    std::vector<HstNode> nodes;
    int root = -1;
    double alpha = 2.0;
    double scale = 1.0; // divisor applied to the input distances
    std::vector<int> leaf_map; // point index -> leaf node id

    const HstNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
};

/// Lowest common ancestor of two points' leaves.
inline int hst_nca(const Hst& t, std::size_t x, std::size_t y) {
    int a = t.leaf_map[x];
    int b = t.leaf_map[y];
    while (a != b) {
        a = t.node(a).parent;
        b = t.node(b).parent;
        detail::internal_check(a >= 0 && b >= 0, "leaf paths failed to join");
    }
    return a;
}

/// Tree distance between two points, in the units of the input metric.
inline double hst_distance(const Hst& t, std::size_t x, std::size_t y) {
    if (x == y) return 0.0;
    return t.node(hst_nca(t, x, y)).label * t.scale;
}

/// Rounds an ultrametric onto label tree distances: every distance maps to
/// the next power of two (relative to the smallest distance), so no pair
/// contracts and no pair stretches beyond a factor 2. Unary chains are kept
/// so that all leaves sit on the bottom level.
inline Hst build_2hst(const MetricSpace& m) {
    Hst t;
    const std::size_t n = m.size();
    if (n == 1) {
        HstNode leaf;
        leaf.label = 0.5;
        leaf.leaf_index = 0;
        t.nodes.push_back(std::move(leaf));
        t.root = 0;
        t.leaf_map = {0};
        return t;
    }
    if (!validate_ultrametric(m)) throw NotUltrametric("distance matrix is not an ultrametric");
    t.scale = metric_min_distance(m);
    const double spread = metric_diameter(m) / t.scale;

    // Height of the root: smallest h with 2^(h-1) covering the spread.
    int top = 1;
    while (std::ldexp(1.0, top - 1) * (1.0 + 1e-12) < spread) {
        ++top;
        detail::internal_check(top < 1100, "spread exceeds representable levels");
    }

    t.leaf_map.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        HstNode leaf;
        leaf.label = 0.5;
        leaf.leaf_index = static_cast<int>(i);
        t.leaf_map[i] = static_cast<int>(t.nodes.size());
        t.nodes.push_back(std::move(leaf));
    }

    // Agglomerate level by level; every cluster gets a node on every level,
    // so single-child chains appear wherever a cluster stays unmerged.
    std::vector<int> rep = t.leaf_map;  // point -> current cluster node
    std::vector<std::size_t> uf(n);     // union-find over points, min-index roots
    auto find = [&uf](std::size_t x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) uf[i] = i;
    for (int h = 1; h <= top; ++h) {
        const double threshold = std::ldexp(1.0, h - 1) * t.scale * (1.0 + 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (m.d(i, j) > threshold) continue;
                const std::size_t a = find(i), b = find(j);
                if (a != b) uf[std::max(a, b)] = std::min(a, b);
            }
        }
        // One node per cluster, children in first-appearance order.
        std::vector<int> group_node(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t g = find(i);
            if (group_node[g] < 0) {
                HstNode inner;
                inner.label = std::ldexp(1.0, h - 1);
                inner.height = h;
                group_node[g] = static_cast<int>(t.nodes.size());
                t.nodes.push_back(std::move(inner));
            }
            const int node_id = group_node[g];
            const int child = rep[i];
            if (t.nodes[static_cast<std::size_t>(child)].parent < 0) {
                t.nodes[static_cast<std::size_t>(child)].parent = node_id;
                t.nodes[static_cast<std::size_t>(node_id)].children.push_back(child);
            }
            rep[i] = node_id;
        }
    }
    t.root = rep[0];
    for (std::size_t i = 0; i < n; ++i) {
        detail::internal_check(rep[i] == t.root, "clustering did not converge to one root");
    }
    return t;
}

/// Volume of the d-dimensional euclidean ball of radius r.
inline double ball_volume(int d, double r) {
    detail::require(d >= 1, "dimension must be at least 1");
    detail::require(r > 0.0, "radius must be positive");
    // Unit-ball volume by the two-step recurrence v_d = v_{d-2} * 2*pi/d.
    double unit = (d % 2 == 0) ? 1.0 : 2.0;
    for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) unit *= 2.0 * kPi / k;
    return unit * std::pow(r, d);
}

/// Radius of the d-dimensional ball of volume v; inverse of ball_volume.
inline double radius_for_volume(int d, double v) {
    detail::require(d >= 1, "dimension must be at least 1");
    detail::require(v > 0.0, "volume must be positive");
    return std::pow(v / ball_volume(d, 1.0), 1.0 / d);
}

/// Per-node space estimates: the volume any embedding that never contracts
/// distances needs for the leaves below each node.
struct VolumeEstimates {
    std::vector<double> values; // by hst node id
    int dim = 2;
};

inline VolumeEstimates compute_astar(const Hst& t, int d) {
    detail::require(d >= 1, "dimension must be at least 1");
    VolumeEstimates est;
    est.dim = d;
    est.values.assign(t.nodes.size(), 0.0);
    const double leaf_value = ball_volume(d, 0.5);
    const double inv_d = 1.0 / static_cast<double>(d);
    // Children are created before parents, so ids ascend from leaves to root.
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const HstNode& node = t.nodes[i];
        if (node.children.empty()) {
            est.values[i] = leaf_value;
            continue;
        }
        const double pad = std::pow(ball_volume(d, node.label / 4.0), inv_d);
        double sum = 0.0;
        for (int c : node.children) {
            sum += std::pow(std::pow(est.values[static_cast<std::size_t>(c)], inv_d) + pad,
                            static_cast<double>(d));
        }
        est.values[i] = sum;
    }
    return est;
}

/// Largest value of (ball-radius of the node's space estimate)/(node label)
/// minus one, over internal nodes: a floor under the distortion of any
/// embedding of the tree metric into R^d. Zero when there is no internal node.
inline double distortion_lower_bound(const VolumeEstimates& est, const Hst& t) {
    double best = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const HstNode& node = t.nodes[i];
        if (node.children.empty()) continue;
        const double v = radius_for_volume(est.dim, est.values[i]) / node.label - 1.0;
        best = seen ? std::max(best, v) : v;
        seen = true;
    }
    return seen ? best : 0.0;
}

struct DistortionReport {
    double expansion = 1.0;   // worst stretch: max image-distance / distance
    double contraction = 1.0; // worst squeeze: max distance / image-distance
    double distortion = 1.0;  // expansion * contraction
    double lower_bound = 1.0; // distortion floor (never below 1)
    double ratio = 1.0;       // distortion / lower_bound
    double spread = 1.0;      // diameter / smallest distance
    double epsilon_used = 1.0 / 3.0;
    bool warning = false; // set when the spread is too small for the
                          // quality guarantees at this dimension
};

struct EmbeddingResult {
    Hst hst;
    VolumeEstimates estimates;
    std::vector<std::vector<double>> points; // by metric point index
    std::vector<HyperRect> boxes;            // by hst node id, before shrinking
    std::vector<HyperRect> shrunk_boxes;     // by hst node id, after shrinking
    DistortionReport report;
};

namespace detail {

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double embed_epsilon(double spread) {
    const double lg = std::log2(spread);
    if (lg > 3.0) return 1.0 / lg;
    return 1.0 / 3.0;
}

/// Fills the pairwise part of the report and the lower-bound pipeline.
inline DistortionReport make_report(const MetricSpace& m,
                                    const std::vector<std::vector<double>>& points, int d) {
    const std::size_t n = m.size();
    detail::require(points.size() == n && n >= 2, "points must match the metric");
    DistortionReport r;
    double expansion = 0.0, contraction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double image = euclid(points[i], points[j]);
            if (image == 0.0) throw DuplicatePoints("two points share an image");
            expansion = std::max(expansion, image / m.d(i, j));
            contraction = std::max(contraction, m.d(i, j) / image);
        }
    }
    r.expansion = expansion;
    r.contraction = contraction;
    r.distortion = expansion * contraction;
    const Hst t = build_2hst(m);
    const VolumeEstimates est = compute_astar(t, d);
    r.lower_bound = std::max(distortion_lower_bound(est, t), 1.0);
    r.ratio = r.distortion / r.lower_bound;
    r.spread = metric_spread(m);
    r.epsilon_used = embed_epsilon(r.spread);
    r.warning = std::log2(r.spread) < std::sqrt(static_cast<double>(d) - 1.0);
    return r;
}

} // namespace detail

/// Measures an embedding: worst stretch, worst squeeze, their product, and
/// the computable distortion floor of the metric itself.
inline DistortionReport distortion(const MetricSpace& m,
                                   const std::vector<std::vector<double>>& points) {
    detail::require(!points.empty() && points[0].size() >= 2, "points must live in dimension >= 2");
    if (!validate_ultrametric(m)) throw NotUltrametric("distance matrix is not an ultrametric");
    return detail::make_report(m, points, static_cast<int>(points[0].size()));
}

/// Embeds an ultrametric into R^d: round to the label tree, estimate the
/// space every subtree needs, pack boxes with those volumes, pull children
/// toward their parents' centers, and place each point at its box center.
inline EmbeddingResult embed(const MetricSpace& m, int d) {
    if (d < 2) throw DimensionTooSmall("embedding needs dimension at least 2");
    EmbeddingResult res;
    const std::size_t n = m.size();
    if (n == 0) throw EmptyTree("metric has no points");

    if (n == 1) {
        res.hst = build_2hst(m);
        res.estimates = compute_astar(res.hst, d);
        HyperRect cube;
        cube.origin.assign(static_cast<std::size_t>(d), 0.0);
        cube.sides.assign(static_cast<std::size_t>(d), 1.0);
        res.boxes = {cube};
        res.shrunk_boxes = {cube};
        res.points = {center(cube)};
        res.report.warning = true;
        return res;
    }

    if (!validate_ultrametric(m)) throw NotUltrametric("distance matrix is not an ultrametric");
    res.hst = build_2hst(m);
    res.estimates = compute_astar(res.hst, d);
    const Hst& t = res.hst;

    const double spread = metric_spread(m);
    const double lg = std::log2(spread);
    const double eps = detail::embed_epsilon(spread);
    double sigma; // per-level pull toward the parent center
    if (spread <= 1.0) {
        sigma = 1.0;
    } else if (lg <= 1.0) {
        sigma = 0.5;
    } else {
        sigma = 1.0 - 1.0 / lg;
    }

    // Pack boxes top-down with the space estimates as weights. Children
    // claim less than the parent's volume; the rest is slack.
    res.boxes.assign(t.nodes.size(), HyperRect{});
    {
        HyperRect cube;
        cube.origin.assign(static_cast<std::size_t>(d), 0.0);
        cube.sides.assign(static_cast<std::size_t>(d), 1.0);
        res.boxes[static_cast<std::size_t>(t.root)] = std::move(cube);
    }
    std::vector<int> order; // preorder
    order.reserve(t.nodes.size());
    order.push_back(t.root);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int id = order[i];
        const HstNode& node = t.node(id);
        if (node.children.empty()) continue;
        const HyperRect& box = res.boxes[static_cast<std::size_t>(id)];
        const double scale = (1.0 - eps) * volume(box) / res.estimates.values[static_cast<std::size_t>(id)];
        std::vector<double> targets;
        targets.reserve(node.children.size());
        for (int c : node.children) {
            targets.push_back(res.estimates.values[static_cast<std::size_t>(c)] * scale);
        }
        std::vector<HyperRect> packed = detail::slack_cut_impl(box, std::move(targets), eps, true);
        for (std::size_t k = 0; k < node.children.size(); ++k) {
            res.boxes[static_cast<std::size_t>(node.children[k])] = std::move(packed[k]);
            order.push_back(node.children[k]);
        }
    }

    // Pull each subtree toward its root's center, once per internal node,
    // to open gaps between neighbouring subtrees.
    res.shrunk_boxes = res.boxes;
    if (sigma < 1.0) {
        for (int id : order) {
            const HstNode& node = t.node(id);
            if (node.children.empty()) continue;
            const std::vector<double> c = center(res.shrunk_boxes[static_cast<std::size_t>(id)]);
            std::vector<int> sub(node.children.begin(), node.children.end());
            for (std::size_t i = 0; i < sub.size(); ++i) {
                HyperRect& b = res.shrunk_boxes[static_cast<std::size_t>(sub[i])];
                for (std::size_t k = 0; k < b.dim(); ++k) {
                    b.origin[k] = c[k] + sigma * (b.origin[k] - c[k]);
                    b.sides[k] *= sigma;
                }
                for (int child : t.node(sub[i]).children) sub.push_back(child);
            }
        }
    }

    res.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.points[i] = center(res.shrunk_boxes[static_cast<std::size_t>(t.leaf_map[i])]);
    }
    res.report = detail::make_report(m, res.points, d);
    res.report.epsilon_used = eps;
    return res;
}

} // namespace fatpart
