#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fatpart/errors.hpp"
#include "fatpart/hierarchy.hpp"
#include "fatpart/metric.hpp"
#include "fatpart/util.hpp"

namespace fatpart {

/// Adversarial instance: a path v0..vd where each v_{i-1} also holds a
/// pendant leaf l_i of weight (4d)^-i, and vd holds one leaf "rest" carrying
/// the remaining mass. Any fat partition of it needs aspect ratio growing
/// linearly with d.
inline WeightedTree lowerbound_tree(int d) {
    detail::require(d >= 1, "lowerbound_tree needs d >= 1");
    WeightedTree tree;
    const double factor = 1.0 / (4.0 * static_cast<double>(d));
    double pendant = 1.0; // becomes (4d)^-i at step i
    double residual = 1.0;

    auto add_node = [&tree](std::string name, double weight) {
        TreeNode n;
        n.name = std::move(name);
        n.weight = weight;
        tree.nodes.push_back(std::move(n));
        return static_cast<int>(tree.nodes.size() - 1);
    };

    int prev = add_node("v0", 0.0);
    tree.root = prev;
    for (int i = 1; i <= d; ++i) {
        pendant *= factor;
        residual -= pendant;
        const int leaf = add_node("l" + std::to_string(i), pendant);
        const int next = add_node("v" + std::to_string(i), 0.0);
        tree.node(prev).children = {leaf, next};
        tree.node(leaf).parent = prev;
        tree.node(next).parent = prev;
        prev = next;
    }
    detail::internal_check(residual > 0.0, "lowerbound_tree residual must stay positive");
    const int rest = add_node("rest", residual);
    tree.node(prev).children = {rest};
    tree.node(rest).parent = prev;
    detail::normalize_weights(tree);
    return tree;
}

enum class WeightLaw { uniform, pareto };

namespace detail {

struct HierarchyBuilder {
    WeightedTree& tree;
    Splitmix64& rng;
    WeightLaw law;
    int leaf_count = 0;

    double draw_weight() {
        const double u = rng.next_open01();
        if (law == WeightLaw::pareto) return std::pow(u, -1.0 / 1.2);
        return u;
    }

    int make_leaf() {
        TreeNode n;
        n.name = "x" + std::to_string(leaf_count++);
        n.weight = draw_weight();
        tree.nodes.push_back(std::move(n));
        return static_cast<int>(tree.nodes.size() - 1);
    }

    // Distributes `count` leaves under one node with at most `depth_left`
    // further levels available.
    int build(int count, int depth_left) {
        if (count == 1) return make_leaf();
        std::vector<int> parts;
        if (depth_left <= 1) {
            parts.assign(static_cast<std::size_t>(count), 1);
        } else {
            const int max_fan = std::min(count, 4);
            const int fan = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_fan - 1)));
            // Random composition of `count` into `fan` positive parts.
            std::vector<int> cuts;
            cuts.reserve(static_cast<std::size_t>(fan) + 1);
            cuts.push_back(0);
            while (static_cast<int>(cuts.size()) < fan) {
                const int c = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(count - 1)));
                if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
            }
            cuts.push_back(count);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 1; i < cuts.size(); ++i) parts.push_back(cuts[i] - cuts[i - 1]);
        }
        std::vector<int> children;
        children.reserve(parts.size());
        for (int p : parts) children.push_back(build(p, depth_left - 1));
        TreeNode n;
        n.name = "g" + std::to_string(tree.nodes.size());
        n.children = std::move(children);
        const int id = static_cast<int>(tree.nodes.size());
        for (int c : n.children) tree.node(c).parent = id;
        tree.nodes.push_back(std::move(n));
        return id;
    }
};

} // namespace detail

/// Seeded random hierarchy with exactly n_leaves leaves and original depth at
/// most max_depth; leaf weights drawn from the chosen law, then normalized.
inline WeightedTree random_hierarchy(std::uint64_t seed, int n_leaves, int max_depth,
                                     WeightLaw law = WeightLaw::pareto) {
    detail::require(n_leaves >= 1, "random_hierarchy needs n_leaves >= 1");
    detail::require(max_depth >= 1, "random_hierarchy needs max_depth >= 1");
    WeightedTree tree;
    Splitmix64 rng(mix_seed(seed, 0x68696572ULL));
    detail::HierarchyBuilder builder{tree, rng, law};
    tree.root = builder.build(n_leaves, max_depth);
    detail::normalize_weights(tree);
    return tree;
}

/// Seeded random ultrametric on n points built from a laminar hierarchy with
/// `levels` strictly decreasing separation values; always an exact
/// ultrametric by construction.
inline MetricSpace random_ultrametric(std::uint64_t seed, int n, int levels) {
    detail::require(n >= 2, "random_ultrametric needs n >= 2");
    detail::require(levels >= 1, "random_ultrametric needs levels >= 1");
    MetricSpace m;
    m.names.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m.names.push_back("p" + std::to_string(i));
    m.dist.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);

    Splitmix64 rng(mix_seed(seed, 0x756c7472ULL));
    // value[l] lies in (levels-l, levels-l+1), so values strictly decrease.
    std::vector<double> value(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        value[static_cast<std::size_t>(l)] = static_cast<double>(levels - l) + rng.next_open01();
    }

    struct Group {
        std::vector<int> points;
        int level;
    };
    std::vector<Group> stack;
    {
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        stack.push_back({std::move(all), 0});
    }
    while (!stack.empty()) {
        Group g = std::move(stack.back());
        stack.pop_back();
        const int sz = static_cast<int>(g.points.size());
        const double sep = value[static_cast<std::size_t>(g.level)];
        auto set_pair = [&m](int p, int q, double v) {
            m.d(static_cast<std::size_t>(p), static_cast<std::size_t>(q)) = v;
            m.d(static_cast<std::size_t>(q), static_cast<std::size_t>(p)) = v;
        };
        if (g.level + 1 >= levels || sz == 2) {
            // Deepest level: all pairs inside split here.
            for (int i = 0; i < sz; ++i)
                for (int j = i + 1; j < sz; ++j)
                    set_pair(g.points[static_cast<std::size_t>(i)],
                             g.points[static_cast<std::size_t>(j)], sep);
        } else {
            // Shuffle, then split into 2..min(sz,4) consecutive runs.
            for (int i = sz - 1; i > 0; --i) {
                const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
                std::swap(g.points[static_cast<std::size_t>(i)], g.points[static_cast<std::size_t>(j)]);
            }
            const int max_fan = std::min(sz, 4);
            const int fan = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_fan - 1)));
            std::vector<int> cuts{0, sz};
            while (static_cast<int>(cuts.size()) < fan + 1) {
                const int c = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(sz - 1)));
                if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            std::vector<std::vector<int>> parts;
            for (std::size_t i = 1; i < cuts.size(); ++i) {
                parts.emplace_back(g.points.begin() + cuts[i - 1], g.points.begin() + cuts[i]);
            }
            // Cross-part pairs separate at this level's value.
            for (std::size_t a = 0; a < parts.size(); ++a) {
                for (std::size_t b = a + 1; b < parts.size(); ++b) {
                    for (int p : parts[a])
                        for (int q : parts[b]) set_pair(p, q, sep);
                }
            }
            for (auto& part : parts) {
                if (part.size() >= 2) stack.push_back({std::move(part), g.level + 1});
            }
        }
    }
    return m;
}

} // namespace fatpart
