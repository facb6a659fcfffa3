#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatpart/errors.hpp"

namespace fatpart {

struct TreeNode {
    std::string name;
    double weight = 0.0;
    std::vector<int> children;
    int parent = -1;

    bool is_leaf() const { return children.empty(); }
};

/// Rooted tree whose leaves carry positive weights; after normalization every
/// internal node weighs the sum of its children and the root weighs 1.
struct WeightedTree {
    std::vector<TreeNode> nodes;
    int root = -1;

    std::size_t node_count() const { return nodes.size(); }
    const TreeNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    TreeNode& node(int id) { return nodes[static_cast<std::size_t>(id)]; }
};

/// Binary version of a WeightedTree. origin[i] is the id of the original node
/// this node stems from, or -1 for nodes introduced by the transformation.
struct BinaryTree {
    std::vector<TreeNode> nodes;
    int root = -1;
    std::vector<int> origin;

    std::size_t node_count() const { return nodes.size(); }
    const TreeNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    TreeNode& node(int id) { return nodes[static_cast<std::size_t>(id)]; }
};

namespace detail {

/// Recomputes internal weights bottom-up from leaf weights and divides
/// everything by the root weight. Iterative; safe for very deep trees.
template <typename Tree>
void normalize_weights(Tree& tree) {
    std::vector<int> order; // reverse BFS gives children-before-parents
    order.reserve(tree.nodes.size());
    order.push_back(tree.root);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (int c : tree.node(order[i]).children) order.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TreeNode& n = tree.node(*it);
        if (!n.is_leaf()) {
            double s = 0.0;
            for (int c : n.children) s += tree.node(c).weight;
            n.weight = s;
        }
    }
    const double total = tree.node(tree.root).weight;
    if (!(total > 0.0)) throw NonPositiveWeight("tree has non-positive total weight");
    for (TreeNode& n : tree.nodes) n.weight /= total;
}

template <typename Tree>
int tree_depth_impl(const Tree& tree) {
    int best = 0;
    std::vector<std::pair<int, int>> stack{{tree.root, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for (int c : tree.node(id).children) stack.emplace_back(c, d + 1);
    }
    return best;
}

} // namespace detail

inline int depth(const WeightedTree& t) { return detail::tree_depth_impl(t); }
inline int depth(const BinaryTree& t) { return detail::tree_depth_impl(t); }

/// "/a/b" style path of a node; the root is "/".
template <typename Tree>
std::string node_path(const Tree& tree, int id) {
    std::vector<const std::string*> parts;
    for (int cur = id; cur != tree.root; cur = tree.node(cur).parent) {
        parts.push_back(&tree.node(cur).name);
    }
    if (parts.empty()) return "/";
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        out += '/';
        out += **it;
    }
    return out;
}

namespace detail {

/// SAX handler that builds the node arena directly, so arbitrarily deep
/// documents use heap rather than call-stack space.
class TreeSax {
public:
    using json = nlohmann::json;

    explicit TreeSax(WeightedTree& out) : out_(out) {}

    bool null() { return fail("unexpected null"); }
    bool boolean(bool) { return fail("unexpected boolean"); }

    bool number_integer(json::number_integer_t v) {
        return number_float(static_cast<double>(v), {});
    }
    bool number_unsigned(json::number_unsigned_t v) {
        return number_float(static_cast<double>(v), {});
    }
    bool number_float(json::number_float_t v, const std::string&) {
        if (!expecting_weight()) return fail("number outside a \"weight\" field");
        frames_.back().weight = static_cast<double>(v);
        frames_.back().key.clear();
        return true;
    }

    bool string(std::string& v) {
        if (frames_.empty() || frames_.back().key != "name") return fail("string outside a \"name\" field");
        frames_.back().name = v;
        frames_.back().key.clear();
        return true;
    }

    bool binary(json::binary_t&) { return fail("unexpected binary value"); }

    bool start_object(std::size_t) {
        if (!frames_.empty() && !frames_.back().in_children && !frames_.back().key.empty()) {
            return fail("object in place of a scalar field");
        }
        if (!frames_.empty() && !frames_.back().in_children) {
            return fail("unexpected nested object");
        }
        frames_.emplace_back();
        return true;
    }

    bool key(std::string& k) {
        if (frames_.empty()) return fail("key outside an object");
        Frame& f = frames_.back();
        if (k == "name" || k == "weight" || k == "children") {
            f.key = k;
            return true;
        }
        return fail("unknown field \"" + k + "\"");
    }

    bool end_object() {
        Frame f = std::move(frames_.back());
        frames_.pop_back();
        if (!f.name) return fail("node is missing \"name\"");
        if (f.weight && f.has_children) return fail("node has both \"weight\" and \"children\"");
        if (!f.weight && !f.has_children) return fail("node has neither \"weight\" nor \"children\"");
        if (f.has_children && f.children.empty()) return fail("internal node with empty \"children\"");
        if (f.weight && !(*f.weight > 0.0)) {
            error_ = "leaf \"" + *f.name + "\" has non-positive weight";
            nonpositive_ = true;
            return false;
        }
        const int id = static_cast<int>(out_.nodes.size());
        TreeNode node;
        node.name = std::move(*f.name);
        if (f.weight) node.weight = *f.weight;
        node.children = std::move(f.children);
        for (int c : node.children) out_.node(c).parent = id;
        out_.nodes.push_back(std::move(node));
        if (frames_.empty()) {
            out_.root = id;
        } else {
            frames_.back().children.push_back(id);
        }
        return true;
    }

    bool start_array(std::size_t) {
        if (frames_.empty() || frames_.back().key != "children") return fail("unexpected array");
        frames_.back().key.clear();
        frames_.back().in_children = true;
        frames_.back().has_children = true;
        return true;
    }

    bool end_array() {
        if (frames_.empty() || !frames_.back().in_children) return fail("unbalanced array");
        frames_.back().in_children = false;
        return true;
    }

    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
        if (error_.empty()) error_ = ex.what();
        return false;
    }

    const std::string& error() const { return error_; }
    bool nonpositive() const { return nonpositive_; }

private:
    struct Frame {
        std::optional<std::string> name;
        std::optional<double> weight;
        std::vector<int> children;
        std::string key;
        bool in_children = false;
        bool has_children = false;
    };

    bool expecting_weight() const {
        return !frames_.empty() && frames_.back().key == "weight";
    }

    bool fail(std::string msg) {
        if (error_.empty()) error_ = std::move(msg);
        return false;
    }

    WeightedTree& out_;
    std::vector<Frame> frames_;
    std::string error_;
    bool nonpositive_ = false;
};

} // namespace detail

/// Parses the hierarchy JSON document. Each node is an object holding "name"
/// and exactly one of "weight" (positive number, leaves) or "children"
/// (non-empty array). Weights are normalized so the root weighs 1.
inline WeightedTree parse_tree(std::string_view text) {
    {
        // An empty or null document denotes "no tree" rather than bad syntax.
        const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
        std::size_t i = 0;
        while (i < text.size() && is_ws(text[i])) ++i;
        if (i == text.size()) throw EmptyTree("document is empty");
        if (text.substr(i, 4) == "null") {
            std::size_t j = i + 4;
            while (j < text.size() && is_ws(text[j])) ++j;
            if (j == text.size()) throw EmptyTree("document is null");
        }
    }
    WeightedTree tree;
    detail::TreeSax sax(tree);
    const bool ok = nlohmann::json::sax_parse(text, &sax);
    if (!ok) {
        if (sax.nonpositive()) throw NonPositiveWeight(sax.error());
        throw MalformedDocument(sax.error().empty() ? "invalid document" : sax.error());
    }
    if (tree.root < 0) throw MalformedDocument("document holds no node");
    detail::normalize_weights(tree);
    return tree;
}

/// Builds a hierarchy from a directory: files become leaves weighted by their
/// byte size (zero-size files are dropped), directories become internal
/// nodes. Entries are visited in name order so the result is deterministic.
inline WeightedTree scan_filesystem(const std::filesystem::path& root_path) {
    namespace fs = std::filesystem;
    WeightedTree tree;
    try {
        if (!fs::exists(root_path)) throw IoError("path does not exist: " + root_path.string());
        if (fs::is_regular_file(root_path)) {
            const auto size = fs::file_size(root_path);
            if (size == 0) throw EmptyTree("file is empty: " + root_path.string());
            TreeNode leaf;
            leaf.name = root_path.filename().string();
            leaf.weight = static_cast<double>(size);
            tree.nodes.push_back(std::move(leaf));
            tree.root = 0;
            detail::normalize_weights(tree);
            return tree;
        }

        struct DirFrame {
            fs::path path;
            std::string name;
            std::vector<int> children;
            std::vector<fs::path> pending; // subdirectories left to visit
            std::size_t next = 0;
        };

        auto expand = [&tree](DirFrame& frame) {
            std::vector<std::pair<std::string, fs::path>> entries;
            for (const auto& e : fs::directory_iterator(frame.path)) {
                entries.emplace_back(e.path().filename().string(), e.path());
            }
            std::sort(entries.begin(), entries.end());
            for (auto& [name, path] : entries) {
                if (fs::is_directory(path)) {
                    frame.pending.push_back(path);
                } else if (fs::is_regular_file(path)) {
                    const auto size = fs::file_size(path);
                    if (size == 0) continue;
                    TreeNode leaf;
                    leaf.name = name;
                    leaf.weight = static_cast<double>(size);
                    frame.children.push_back(static_cast<int>(tree.nodes.size()));
                    tree.nodes.push_back(std::move(leaf));
                }
            }
        };

        std::vector<DirFrame> stack;
        stack.push_back({root_path, root_path.filename().string(), {}, {}, 0});
        if (stack.back().name.empty()) stack.back().name = root_path.string();
        expand(stack.back());
        while (!stack.empty()) {
            DirFrame& top = stack.back();
            if (top.next < top.pending.size()) {
                const fs::path sub = top.pending[top.next++];
                stack.push_back({sub, sub.filename().string(), {}, {}, 0});
                expand(stack.back());
                continue;
            }
            // Finished: emit this directory if it holds any weighted leaf.
            DirFrame frame = std::move(stack.back());
            stack.pop_back();
            if (frame.children.empty()) {
                if (stack.empty()) throw EmptyTree("no positive-size files under " + root_path.string());
                continue;
            }
            TreeNode dir;
            dir.name = std::move(frame.name);
            dir.children = std::move(frame.children);
            const int id = static_cast<int>(tree.nodes.size());
            for (int c : dir.children) tree.node(c).parent = id;
            tree.nodes.push_back(std::move(dir));
            if (stack.empty()) {
                tree.root = id;
            } else {
                stack.back().children.push_back(id);
            }
        }
    } catch (const fs::filesystem_error& e) {
        throw IoError(e.what());
    }
    if (tree.root < 0) throw EmptyTree("no positive-size files under " + root_path.string());
    detail::normalize_weights(tree);
    return tree;
}

/// Rewrites the tree so that every internal node has exactly two children,
/// preserving the leaf set, leaf weights and ancestor/descendant relations of
/// the original nodes. The depth grows by at most a factor that keeps it
/// within 2*(depth(T) + ceil(log2(node_count))) levels.
inline BinaryTree to_binary(const WeightedTree& input) {
    struct WorkNode {
        std::string name;
        double weight = 0.0;
        std::vector<int> children;
        int origin = -1;
        long long subtree = 1; // node count of the subtree this node roots
    };
    std::vector<WorkNode> arena;
    arena.reserve(input.nodes.size() * 2);
    for (std::size_t i = 0; i < input.nodes.size(); ++i) {
        const TreeNode& n = input.nodes[i];
        WorkNode w;
        w.name = n.name;
        w.weight = n.weight;
        w.children = n.children;
        w.origin = static_cast<int>(i);
        arena.push_back(std::move(w));
    }
    // Subtree node counts of the original tree, children before parents.
    {
        std::vector<int> order{input.root};
        order.reserve(input.nodes.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (int c : input.node(order[i]).children) order.push_back(c);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            long long s = 1;
            for (int c : input.node(*it).children) s += arena[static_cast<std::size_t>(c)].subtree;
            arena[static_cast<std::size_t>(*it)].subtree = s;
        }
    }

    int synth_count = 0;
    auto make_synthetic = [&arena, &synth_count](std::vector<int> children) {
        WorkNode w;
        w.name = "#" + std::to_string(++synth_count);
        long long s = 1;
        for (int c : children) s += arena[static_cast<std::size_t>(c)].subtree;
        w.children = std::move(children);
        w.subtree = s;
        const int id = static_cast<int>(arena.size());
        arena.push_back(std::move(w));
        return id;
    };

    std::vector<int> work{input.root};
    while (!work.empty()) {
        const int id = work.back();
        work.pop_back();
        auto children = arena[static_cast<std::size_t>(id)].children;
        if (children.size() <= 2) {
            for (int c : children) work.push_back(c);
            continue;
        }
        const long long total = arena[static_cast<std::size_t>(id)].subtree;
        // mu: child rooting the largest subtree (ties: first in child order).
        std::size_t mu_pos = 0;
        for (std::size_t i = 1; i < children.size(); ++i) {
            if (arena[static_cast<std::size_t>(children[i])].subtree >
                arena[static_cast<std::size_t>(children[mu_pos])].subtree) {
                mu_pos = i;
            }
        }
        const int mu = children[mu_pos];
        std::vector<int> rest;
        rest.reserve(children.size() - 1);
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i != mu_pos) rest.push_back(children[i]);
        }
        // Greedy prefix: extend C1 while its node count stays below total/2.
        std::vector<int> c1, c2;
        long long acc = 0;
        std::size_t split = rest.size();
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const long long next = acc + arena[static_cast<std::size_t>(rest[i])].subtree;
            if (2 * next >= total) {
                split = i;
                break;
            }
            acc = next;
        }
        c1.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(split));
        c2.assign(rest.begin() + static_cast<std::ptrdiff_t>(split), rest.end());
        if (c2.empty()) {
            c2.push_back(c1.back());
            c1.pop_back();
        }
        detail::internal_check(!c1.empty() && !c2.empty(), "binary transform produced an empty side");

        const int n1 = make_synthetic(std::move(c1));
        const int n3 = make_synthetic(std::move(c2));
        const int n2 = make_synthetic({mu, n3});
        arena[static_cast<std::size_t>(id)].children = {n1, n2};
        work.push_back(n1);
        work.push_back(mu);
        work.push_back(n3);
    }

    // Remove degree-1 nodes by splicing them out.
    int root = input.root;
    while (arena[static_cast<std::size_t>(root)].children.size() == 1) {
        root = arena[static_cast<std::size_t>(root)].children[0];
    }
    {
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            for (int& c : arena[static_cast<std::size_t>(id)].children) {
                while (arena[static_cast<std::size_t>(c)].children.size() == 1) {
                    c = arena[static_cast<std::size_t>(c)].children[0];
                }
                stack.push_back(c);
            }
        }
    }

    // Compact reachable nodes into preorder ids.
    BinaryTree out;
    std::vector<int> remap(arena.size(), -1);
    std::vector<int> stack{root};
    std::vector<int> pre;
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        remap[static_cast<std::size_t>(id)] = static_cast<int>(pre.size());
        pre.push_back(id);
        const auto& ch = arena[static_cast<std::size_t>(id)].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    out.nodes.resize(pre.size());
    out.origin.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const WorkNode& w = arena[static_cast<std::size_t>(pre[i])];
        TreeNode n;
        n.name = w.name;
        n.weight = w.weight;
        for (int c : w.children) {
            n.children.push_back(remap[static_cast<std::size_t>(c)]);
        }
        out.nodes[i] = std::move(n);
        out.origin[i] = w.origin;
    }
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        for (int c : out.nodes[i].children) out.node(c).parent = static_cast<int>(i);
    }
    out.root = 0;
    detail::normalize_weights(out);
    return out;
}

} // namespace fatpart
