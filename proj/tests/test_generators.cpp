#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include <fatpart/errors.hpp>
#include <fatpart/generators.hpp>

using namespace fatpart;
using Catch::Approx;

namespace {

std::size_t count_leaves(const WeightedTree& t) {
    std::size_t n = 0;
    for (const TreeNode& node : t.nodes) n += node.is_leaf() ? 1 : 0;
    return n;
}

void check_properly_weighted(const WeightedTree& t) {
    CHECK(t.node(t.root).weight == Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        const TreeNode& n = t.nodes[i];
        CHECK(n.weight > 0.0);
        if (n.is_leaf()) continue;
        double s = 0.0;
        for (int c : n.children) {
            s += t.node(c).weight;
            CHECK(t.node(c).parent == static_cast<int>(i));
        }
        CHECK(n.weight == Approx(s).epsilon(1e-12));
    }
}

bool same_tree(const WeightedTree& a, const WeightedTree& b) {
    if (a.node_count() != b.node_count() || a.root != b.root) return false;
    for (std::size_t i = 0; i < a.node_count(); ++i) {
        if (a.nodes[i].name != b.nodes[i].name) return false;
        if (a.nodes[i].weight != b.nodes[i].weight) return false;
        if (a.nodes[i].children != b.nodes[i].children) return false;
    }
    return true;
}

} // namespace

TEST_CASE("adversarial comb instance") {
    SECTION("smallest instance") {
        const WeightedTree t = lowerbound_tree(1);
        REQUIRE(t.node_count() == 4);
        CHECK(depth(t) == 2);
        CHECK(t.node(t.root).name == "v0");
        REQUIRE(t.node(t.root).children.size() == 2);
        // pendant leaf takes 1/(4d) of the mass, the tail leaf the rest
        CHECK(count_leaves(t) == 2);
        for (const TreeNode& n : t.nodes) {
            if (n.name == "l1") CHECK(n.weight == Approx(0.25).epsilon(1e-15));
            if (n.name == "rest") CHECK(n.weight == Approx(0.75).epsilon(1e-15));
        }
        check_properly_weighted(t);
    }
    SECTION("pendant weights decay geometrically") {
        const WeightedTree t = lowerbound_tree(3);
        REQUIRE(t.node_count() == 8);
        CHECK(depth(t) == 4);
        CHECK(count_leaves(t) == 4);
        for (const TreeNode& n : t.nodes) {
            if (n.name == "l1") CHECK(n.weight == Approx(1.0 / 12.0).epsilon(1e-14));
            if (n.name == "l2") CHECK(n.weight == Approx(1.0 / 144.0).epsilon(1e-14));
            if (n.name == "l3") CHECK(n.weight == Approx(1.0 / 1728.0).epsilon(1e-14));
            if (n.name == "rest") CHECK(n.weight == Approx(1571.0 / 1728.0).epsilon(1e-14));
        }
        check_properly_weighted(t);
        // the comb spine: each internal node has the next spine node as a child
        CHECK(node_path(t, 7) == "/v1/v2/v3/rest");
    }
    SECTION("large instances stay consistent") {
        const WeightedTree t = lowerbound_tree(40);
        CHECK(t.node_count() == 2 * 40 + 2);
        CHECK(depth(t) == 41);
        check_properly_weighted(t);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(lowerbound_tree(0), PreconditionViolated);
        CHECK_THROWS_AS(lowerbound_tree(-2), PreconditionViolated);
    }
}

TEST_CASE("random hierarchies") {
    SECTION("leaf count is exact and depth is capped") {
        for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            for (const int leaves : {1, 2, 17, 200}) {
                const WeightedTree t = random_hierarchy(seed, leaves, 6);
                CHECK(count_leaves(t) == static_cast<std::size_t>(leaves));
                CHECK(depth(t) <= 6);
                check_properly_weighted(t);
            }
        }
    }
    SECTION("a depth cap of one gives a star") {
        const WeightedTree t = random_hierarchy(5, 12, 1);
        CHECK(count_leaves(t) == 12);
        CHECK(depth(t) == 1);
        CHECK(t.node(t.root).children.size() == 12);
    }
    SECTION("seeded runs are reproducible, frozen") {
        const WeightedTree t = random_hierarchy(1, 10, 3);
        CHECK(t.node_count() == 14);
        CHECK(depth(t) == 3);
        double digest = 0.0;
        double x0 = -1.0;
        for (std::size_t i = 0; i < t.node_count(); ++i) {
            digest += static_cast<double>(i + 1) * t.nodes[i].weight;
            if (t.nodes[i].name == "x0") x0 = t.nodes[i].weight;
        }
        CHECK(digest == Approx(34.005529696939732).epsilon(1e-12));
        CHECK(x0 == Approx(0.019384502229518995).epsilon(1e-12));
        CHECK(same_tree(t, random_hierarchy(1, 10, 3)));
        CHECK_FALSE(same_tree(t, random_hierarchy(2, 10, 3)));
    }
    SECTION("weight laws differ") {
        const WeightedTree pareto = random_hierarchy(4, 30, 3, WeightLaw::pareto);
        const WeightedTree uniform = random_hierarchy(4, 30, 3, WeightLaw::uniform);
        CHECK_FALSE(same_tree(pareto, uniform));
        check_properly_weighted(pareto);
        check_properly_weighted(uniform);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(random_hierarchy(1, 0, 3), PreconditionViolated);
        CHECK_THROWS_AS(random_hierarchy(1, 5, 0), PreconditionViolated);
    }
}

TEST_CASE("random ultrametrics") {
    SECTION("the strong triangle rule holds without tolerance") {
        for (const std::uint64_t seed : {7ULL, 8ULL}) {
            const MetricSpace m = random_ultrametric(seed, 20, 4);
            REQUIRE(m.size() == 20);
            validate_metric_shape(m);
            for (std::size_t x = 0; x < m.size(); ++x) {
                for (std::size_t z = x + 1; z < m.size(); ++z) {
                    for (std::size_t y = 0; y < m.size(); ++y) {
                        if (y == x || y == z) continue;
                        CHECK(m.d(x, z) <= std::max(m.d(x, y), m.d(y, z)));
                    }
                }
            }
        }
    }
    SECTION("at most `levels` distinct distances appear") {
        const MetricSpace m = random_ultrametric(7, 6, 2);
        std::set<double> values;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = i + 1; j < m.size(); ++j) values.insert(m.d(i, j));
        }
        CHECK(values.size() <= 2);
        // frozen regression values for this seed
        CHECK(metric_diameter(m) == Approx(2.0453553786365788).epsilon(1e-12));
        CHECK(metric_min_distance(m) == Approx(1.5554759442872164).epsilon(1e-12));
    }
    SECTION("seeded runs are reproducible") {
        const MetricSpace a = random_ultrametric(11, 12, 3);
        const MetricSpace b = random_ultrametric(11, 12, 3);
        CHECK(a.dist == b.dist);
        const MetricSpace c = random_ultrametric(12, 12, 3);
        CHECK(a.dist != c.dist);
    }
    SECTION("two points still work") {
        const MetricSpace m = random_ultrametric(3, 2, 1);
        REQUIRE(m.size() == 2);
        CHECK(m.d(0, 1) > 0.0);
        CHECK(m.d(0, 1) == m.d(1, 0));
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(random_ultrametric(1, 1, 2), PreconditionViolated);
        CHECK_THROWS_AS(random_ultrametric(1, 5, 0), PreconditionViolated);
    }
}
