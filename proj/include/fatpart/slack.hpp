#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "fatpart/errors.hpp"
#include "fatpart/geometry.hpp"
#include "fatpart/hierarchy.hpp"

namespace fatpart {

struct SlackConfig {
    double epsilon = 0.1; // box aspect ratios stay below 1/epsilon
    int dim = 2;
};

/// Hierarchical box assignment: rects[i] is node i's box; the root gets the
/// unit hypercube. Child volumes undershoot their proportional share by
/// exactly the factor (1 - epsilon) per level.
struct SlackPartition {
    SlackConfig config;
    std::vector<HyperRect> rects;
};

namespace detail {

/// Splits R perpendicular to its longest side (ties: lowest axis); the first
/// piece keeps the low-coordinate corner and takes `fraction` of the volume.
inline std::pair<HyperRect, HyperRect> split_rect(const HyperRect& r, double fraction) {
    std::size_t axis = 0;
    for (std::size_t i = 1; i < r.dim(); ++i) {
        if (r.sides[i] > r.sides[axis]) axis = i;
    }
    HyperRect low = r, high = r;
    const double cut = fraction * r.sides[axis];
    internal_check(cut > 0.0 && cut < r.sides[axis], "slab cut collapsed a side");
    low.sides[axis] = cut;
    high.origin[axis] = r.origin[axis] + cut;
    high.sides[axis] = r.sides[axis] - cut;
    return {std::move(low), std::move(high)};
}

/// Recursive weight-splitting construction. idx[lo, hi) indexes `weights`
/// sorted descending; boxes land in out[] at the original positions.
class SlackCutter {
public:
    SlackCutter(const std::vector<double>& weights, double eps, std::vector<HyperRect>& out)
        : w_(weights), eps_(eps), out_(out) {}

    void run(const HyperRect& r, std::vector<int>& idx, std::size_t lo, std::size_t hi) {
        internal_check(hi > lo, "empty weight slice");
        double total = 0.0;
        for (std::size_t i = lo; i < hi; ++i) total += w_[static_cast<std::size_t>(idx[i])];
        const double w1 = w_[static_cast<std::size_t>(idx[lo])];

        if (w1 > (1.0 - eps_) * total) {
            // Largest weight dominates: cut its box off as a full slab, then
            // shrink the remainder so the recursion sees the exact ratio again.
            auto [slab, rest] = split_rect(r, w1 / volume(r));
            out_[static_cast<std::size_t>(idx[lo])] = std::move(slab);
            if (hi - lo > 1) {
                const HyperRect shrunk = shrink_to_volume(rest, (total - w1) / (1.0 - eps_));
                run(shrunk, idx, lo + 1, hi);
            }
            return;
        }
        // Split the weights at the first prefix reaching eps*total; both parts
        // then hold between eps and (1-eps) of the mass, so both slabs stay fat.
        double prefix = 0.0;
        std::size_t split = lo;
        while (split < hi) {
            prefix += w_[static_cast<std::size_t>(idx[split])];
            ++split;
            if (prefix >= eps_ * total) break;
        }
        if (split == hi) {
            // Reachable only through rounding at the eps*total threshold; the
            // last weight alone is a valid remainder.
            --split;
            prefix -= w_[static_cast<std::size_t>(idx[split])];
        }
        internal_check(split > lo && split < hi, "weight split left an empty side");
        auto [low, high] = split_rect(r, prefix / total);
        run(low, idx, lo, split);
        run(high, idx, split, hi);
    }

private:
    const std::vector<double>& w_;
    double eps_;
    std::vector<HyperRect>& out_;
};

/// Core cut used by both the public entry and the embedding pipeline.
/// allow_deficit permits the weights to sum to less than (1-eps)*vol(R);
/// the unused mass is carried by an internal padding weight whose box is
/// discarded.
inline std::vector<HyperRect> slack_cut_impl(const HyperRect& r, std::vector<double> weights,
                                             double eps, bool allow_deficit) {
    require(!weights.empty(), "slack cut needs at least one weight");
    for (double w : weights) require(w > 0.0, "weights must be positive");
    require(eps > 0.0 && eps <= 1.0 / 3.0 + 1e-15, "epsilon out of range");
    const double vol = volume(r);
    const double cap = (1.0 - eps) * vol;
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    require(rect_aspect_ratio(r) <= (1.0 / eps) * (1.0 + 1e-9),
            "box aspect ratio exceeds 1/epsilon");
    const std::size_t k = weights.size();
    bool padded = false;
    if (allow_deficit) {
        require(sum <= cap * (1.0 + 1e-9), "weights exceed (1-epsilon) of the volume");
        if (sum > cap) {
            // Tiny float overshoot: renormalize onto the cap.
            for (double& w : weights) w *= cap / sum;
            sum = cap;
        } else if (cap - sum > 1e-12 * cap) {
            weights.push_back(cap - sum);
            padded = true;
        }
    } else {
        require(std::fabs(sum - cap) <= 1e-10 * cap,
                "weights must sum to (1-epsilon) of the volume");
    }

    std::vector<int> idx(weights.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&weights](int a, int b) { return weights[static_cast<std::size_t>(a)] >
                                                       weights[static_cast<std::size_t>(b)]; });
    std::vector<HyperRect> out(weights.size());
    SlackCutter cutter(weights, eps, out);
    cutter.run(r, idx, 0, idx.size());
    if (padded) out.pop_back();
    out.resize(k);
    return out;
}

} // namespace detail

/// Packs one box per weight into R: boxes are pairwise disjoint, contained in
/// R, have exactly the requested volumes and aspect ratios at most
/// 1/epsilon. The weights must sum to (1-epsilon)*vol(R).
inline std::vector<HyperRect> slack_cut(const HyperRect& r, const std::vector<double>& weights,
                                        double epsilon) {
    detail::require(epsilon > 0.0 && epsilon < 1.0 / 3.0, "epsilon must lie in (0, 1/3)");
    return detail::slack_cut_impl(r, weights, epsilon, false);
}

/// Builds the hierarchical box partition of the unit hypercube for an
/// arbitrary-fanout weighted tree: each child volume is (1-epsilon) times its
/// proportional share of the parent box.
inline SlackPartition slack_partition(const WeightedTree& tree, const SlackConfig& cfg) {
    detail::require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0 / 3.0, "epsilon must lie in (0, 1/3)");
    detail::require(cfg.dim >= 2, "dimension must be at least 2");
    SlackPartition out;
    out.config = cfg;
    out.rects.assign(tree.node_count(), HyperRect{});
    HyperRect cube;
    cube.origin.assign(static_cast<std::size_t>(cfg.dim), 0.0);
    cube.sides.assign(static_cast<std::size_t>(cfg.dim), 1.0);
    out.rects[static_cast<std::size_t>(tree.root)] = std::move(cube);

    std::vector<int> stack{tree.root};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const TreeNode& node = tree.node(id);
        if (node.is_leaf()) continue;
        const HyperRect& box = out.rects[static_cast<std::size_t>(id)];
        double child_sum = 0.0;
        for (int c : node.children) child_sum += tree.node(c).weight;
        const double scale = (1.0 - cfg.epsilon) * volume(box) / child_sum;
        std::vector<double> targets;
        targets.reserve(node.children.size());
        for (int c : node.children) targets.push_back(tree.node(c).weight * scale);
        std::vector<HyperRect> boxes = detail::slack_cut_impl(box, std::move(targets), cfg.epsilon, false);
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            out.rects[static_cast<std::size_t>(node.children[i])] = std::move(boxes[i]);
            stack.push_back(node.children[i]);
        }
    }
    return out;
}

} // namespace fatpart
