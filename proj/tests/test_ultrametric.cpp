#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <fatpart/errors.hpp>
#include <fatpart/generators.hpp>
#include <fatpart/metric.hpp>
#include <fatpart/ultrametric.hpp>

#include "oracles.hpp"

using namespace fatpart;
using Catch::Approx;

namespace {

MetricSpace make_metric(std::size_t n, const std::vector<double>& upper) {
    MetricSpace m;
    for (std::size_t i = 0; i < n; ++i) m.names.push_back("p" + std::to_string(i));
    m.dist.assign(n * n, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            m.d(i, j) = upper[k];
            m.d(j, i) = upper[k];
            ++k;
        }
    }
    REQUIRE(k == upper.size());
    return m;
}

MetricSpace star_metric(std::size_t n, double r) {
    MetricSpace m;
    for (std::size_t i = 0; i < n; ++i) m.names.push_back("s" + std::to_string(i));
    m.dist.assign(n * n, r);
    for (std::size_t i = 0; i < n; ++i) m.d(i, i) = 0.0;
    return m;
}

} // namespace

TEST_CASE("metric validation") {
    SECTION("shape violations") {
        MetricSpace tiny;
        tiny.names = {"a"};
        tiny.dist = {0.0};
        CHECK_THROWS_AS(validate_metric_shape(tiny), MalformedDocument);

        MetricSpace asym = make_metric(2, {1.0});
        asym.d(0, 1) = 2.0; // break symmetry one-sided
        CHECK_THROWS_AS(validate_metric_shape(asym), MalformedDocument);

        MetricSpace diag = make_metric(2, {1.0});
        diag.d(1, 1) = 0.5;
        CHECK_THROWS_AS(validate_metric_shape(diag), MalformedDocument);

        MetricSpace nonpos = make_metric(2, {0.0});
        CHECK_THROWS_AS(validate_metric_shape(nonpos), MalformedDocument);
    }
    SECTION("triple rule") {
        CHECK(validate_ultrametric(make_metric(3, {1.0, 3.0, 3.0})));
        CHECK_FALSE(validate_ultrametric(make_metric(3, {1.0, 1.0, 3.0})));
        // plain triangle-inequality metrics are not enough
        CHECK_FALSE(validate_ultrametric(make_metric(3, {1.0, 1.5, 2.0})));
    }
    SECTION("summary quantities") {
        const MetricSpace m = make_metric(3, {1.0, 3.0, 3.0});
        CHECK(metric_diameter(m) == 3.0);
        CHECK(metric_min_distance(m) == 1.0);
        CHECK(metric_spread(m) == 3.0);
    }
}

TEST_CASE("label tree of two points") {
    const Hst t = build_2hst(make_metric(2, {1.0}));
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.scale == 1.0);
    const HstNode& root = t.node(t.root);
    CHECK(root.height == 1);
    CHECK(root.label == 1.0);
    REQUIRE(root.children.size() == 2);
    for (int c : root.children) {
        CHECK(t.node(c).label == 0.5);
        CHECK(t.node(c).height == 0);
        CHECK(t.node(c).parent == t.root);
    }
    CHECK(hst_distance(t, 0, 1) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("label tree of a three-point metric with uneven levels") {
    // distances {d(0,1)=1, d(0,2)=3, d(1,2)=3}: the pair joins at level 1 and
    // the singleton is padded with one node per level until the top
    const Hst t = build_2hst(make_metric(3, {1.0, 3.0, 3.0}));
    REQUIRE(t.nodes.size() == 8);
    const HstNode& root = t.node(t.root);
    CHECK(root.height == 3);
    CHECK(root.label == 4.0);
    REQUIRE(root.children.size() == 2);
    CHECK(hst_distance(t, 0, 1) == Approx(1.0).epsilon(1e-12));
    CHECK(hst_distance(t, 0, 2) == Approx(4.0).epsilon(1e-12)); // 3 rounds up to 4
    CHECK(hst_distance(t, 1, 2) == Approx(4.0).epsilon(1e-12));
    // all leaves sit at height 0 and every internal node label doubles per level
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const HstNode& n = t.nodes[i];
        if (n.children.empty()) {
            CHECK(n.height == 0);
            CHECK(n.label == 0.5);
        } else {
            CHECK(n.label == std::ldexp(1.0, n.height - 1));
            for (int c : n.children) CHECK(t.node(c).height == n.height - 1);
        }
    }
}

TEST_CASE("label distances sandwich the input distances") {
    for (const std::uint64_t seed : {3ULL, 4ULL, 5ULL}) {
        const MetricSpace m = random_ultrametric(seed, 24, 4);
        const Hst t = build_2hst(m);
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = i + 1; j < m.size(); ++j) {
                const double dt = hst_distance(t, i, j);
                CHECK(dt >= m.d(i, j) * (1.0 - 1e-9));
                CHECK(dt <= 2.0 * m.d(i, j) * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("label tree construction is scale invariant") {
    const MetricSpace m = random_ultrametric(9, 15, 3);
    MetricSpace scaled = m;
    for (double& v : scaled.dist) v *= 7.25;
    const Hst t1 = build_2hst(m);
    const Hst t2 = build_2hst(scaled);
    REQUIRE(t1.nodes.size() == t2.nodes.size());
    CHECK(t2.scale == Approx(t1.scale * 7.25).epsilon(1e-12));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            CHECK(hst_distance(t2, i, j) == Approx(7.25 * hst_distance(t1, i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rejecting non-ultrametrics") {
    CHECK_THROWS_AS(build_2hst(make_metric(3, {1.0, 1.0, 3.0})), NotUltrametric);
    CHECK_THROWS_AS(embed(make_metric(3, {1.0, 1.0, 3.0}), 2), NotUltrametric);
    const std::vector<std::vector<double>> pts{{0, 0}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(distortion(make_metric(3, {1.0, 1.0, 3.0}), pts), NotUltrametric);
}

TEST_CASE("ball volumes") {
    SECTION("closed forms") {
        CHECK(ball_volume(1, 1.0) == Approx(2.0).epsilon(1e-15));
        CHECK(ball_volume(2, 1.0) == Approx(kPi).epsilon(1e-15));
        CHECK(ball_volume(3, 1.0) == Approx(4.0 * kPi / 3.0).epsilon(1e-14));
        CHECK(ball_volume(4, 1.0) == Approx(kPi * kPi / 2.0).epsilon(1e-14));
        CHECK(ball_volume(2, 0.5) == Approx(kPi / 4.0).epsilon(1e-15));
        CHECK(ball_volume(3, 2.0) == Approx(32.0 * kPi / 3.0).epsilon(1e-14));
    }
    SECTION("gamma-function cross-check") {
        for (int d = 1; d <= 20; ++d) {
            for (const double r : {0.3, 1.0, 2.5}) {
                CHECK(ball_volume(d, r) == Approx(oracles::ball_volume_gamma(d, r)).epsilon(1e-13));
            }
        }
    }
    SECTION("radius round trip") {
        for (int d = 1; d <= 20; ++d) {
            for (const double r : {0.1, 0.5, 3.0}) {
                CHECK(radius_for_volume(d, ball_volume(d, r)) == Approx(r).epsilon(1e-12));
            }
        }
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(ball_volume(0, 1.0), PreconditionViolated);
        CHECK_THROWS_AS(ball_volume(2, 0.0), PreconditionViolated);
        CHECK_THROWS_AS(radius_for_volume(2, -1.0), PreconditionViolated);
    }
}

TEST_CASE("space estimates for two points") {
    const Hst t = build_2hst(make_metric(2, {1.0}));
    SECTION("dimension 2") {
        const VolumeEstimates est = compute_astar(t, 2);
        // two radius-1/2 balls padded by 1/4 each: 2*(sqrt(pi)/2 + sqrt(pi)/4)^2
        CHECK(est.values[static_cast<std::size_t>(t.root)] ==
              Approx(9.0 * kPi / 8.0).epsilon(1e-14));
        CHECK(distortion_lower_bound(est, t) ==
              Approx(3.0 / (2.0 * std::sqrt(2.0)) - 1.0).margin(1e-13));
    }
    SECTION("dimension 3 needs no extra room but the floor goes negative") {
        const VolumeEstimates est = compute_astar(t, 3);
        CHECK(est.values[static_cast<std::size_t>(t.root)] ==
              Approx(9.0 * kPi / 8.0).epsilon(1e-13));
        CHECK(distortion_lower_bound(est, t) ==
              Approx(std::cbrt(27.0 / 32.0) - 1.0).margin(1e-12));
        CHECK(distortion_lower_bound(est, t) < 0.0);
    }
}

TEST_CASE("space estimates for equidistant points in the plane") {
    // n points at pairwise distance 1: the estimate is n * 9pi/16, whose
    // radius is 3*sqrt(n)/4, so the floor is 3*sqrt(n)/4 - 1.
    for (const std::size_t n : {4, 9, 16}) {
        const Hst t = build_2hst(star_metric(n, 1.0));
        const VolumeEstimates est = compute_astar(t, 2);
        CHECK(est.values[static_cast<std::size_t>(t.root)] ==
              Approx(static_cast<double>(n) * 9.0 * kPi / 16.0).epsilon(1e-13));
        CHECK(distortion_lower_bound(est, t) ==
              Approx(0.75 * std::sqrt(static_cast<double>(n)) - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("space estimates agree with the direct recursion") {
    for (const std::uint64_t seed : {21ULL, 22ULL}) {
        const MetricSpace m = random_ultrametric(seed, 18, 3);
        const Hst t = build_2hst(m);
        for (const int d : {2, 3, 7}) {
            const VolumeEstimates est = compute_astar(t, d);
            REQUIRE(est.values.size() == t.nodes.size());
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                CHECK(est.values[i] ==
                      Approx(oracles::astar_direct(t, static_cast<int>(i), d)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("embedding two points") {
    const MetricSpace m = make_metric(2, {1.0});
    const EmbeddingResult res = embed(m, 2);
    REQUIRE(res.points.size() == 2);
    REQUIRE(res.points[0].size() == 2);
    CHECK(res.points[0][0] == Approx(0.7777777777777778).epsilon(1e-14));
    CHECK(res.points[0][1] == Approx(0.16666666666666669).epsilon(1e-14));
    CHECK(res.points[1][0] == Approx(0.7777777777777778).epsilon(1e-14));
    CHECK(res.points[1][1] == Approx(0.6666666666666667).epsilon(1e-14));
    // scaling both pairwise ratios equally: distortion is exactly 1
    CHECK(res.report.distortion == Approx(1.0).epsilon(1e-12));
    CHECK(res.report.expansion == Approx(0.5).epsilon(1e-12));
    CHECK(res.report.contraction == Approx(2.0).epsilon(1e-12));
    CHECK(res.report.spread == 1.0);
    CHECK(res.report.epsilon_used == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(res.report.lower_bound == 1.0); // raw floor is below one here
    CHECK(res.report.ratio == Approx(1.0).epsilon(1e-12));
    CHECK(res.report.warning); // spread 1 is tiny for any d >= 2
    // spread <= 1 never shrinks, so the box families coincide
    REQUIRE(res.boxes.size() == res.shrunk_boxes.size());
    for (std::size_t i = 0; i < res.boxes.size(); ++i) {
        CHECK(res.boxes[i].origin == res.shrunk_boxes[i].origin);
        CHECK(res.boxes[i].sides == res.shrunk_boxes[i].sides);
    }
}

TEST_CASE("embedding edge cases") {
    const MetricSpace pair = make_metric(2, {1.0});
    CHECK_THROWS_AS(embed(pair, 1), DimensionTooSmall);
    CHECK_THROWS_AS(embed(pair, 0), DimensionTooSmall);
    CHECK_THROWS_AS(embed(MetricSpace{}, 2), EmptyTree);

    SECTION("one point sits at the cube center") {
        MetricSpace one;
        one.names = {"a"};
        one.dist = {0.0};
        const EmbeddingResult res = embed(one, 3);
        REQUIRE(res.points.size() == 1);
        CHECK(res.points[0] == std::vector<double>{0.5, 0.5, 0.5});
        CHECK(res.report.warning);
        CHECK(res.report.distortion == 1.0);
    }
    SECTION("duplicate images are reported") {
        const std::vector<std::vector<double>> pts{{0.25, 0.25}, {0.25, 0.25}};
        CHECK_THROWS_AS(distortion(pair, pts), DuplicatePoints);
    }
    SECTION("points must be at least two-dimensional") {
        const std::vector<std::vector<double>> pts{{0.25}, {0.5}};
        CHECK_THROWS_AS(distortion(pair, pts), PreconditionViolated);
    }
}

TEST_CASE("embedding a wide-spread metric uses the adaptive slack") {
    // spread 32 -> log2 = 5 > 3, so epsilon drops to 1/5
    const MetricSpace m = make_metric(3, {1.0, 32.0, 32.0});
    const EmbeddingResult res = embed(m, 2);
    CHECK(res.report.spread == Approx(32.0).epsilon(1e-12));
    CHECK(res.report.epsilon_used == Approx(0.2).epsilon(1e-12));
    CHECK_FALSE(res.report.warning); // log2(32) = 5 >= sqrt(2 - 1)
    CHECK(res.report.ratio >= 1.0 - 1e-9);
}

TEST_CASE("embedding invariants on random ultrametrics") {
    HyperRect cube2, cube3;
    cube2.origin = {0, 0};
    cube2.sides = {1, 1};
    cube3.origin = {0, 0, 0};
    cube3.sides = {1, 1, 1};
    for (const std::uint64_t seed : {41ULL, 42ULL}) {
        for (const int d : {2, 3}) {
            const MetricSpace m = random_ultrametric(seed, 20, 3);
            const EmbeddingResult res = embed(m, d);
            const HyperRect& cube = (d == 2) ? cube2 : cube3;
            REQUIRE(res.points.size() == m.size());

            // boxes nest along the label tree and siblings stay disjoint
            const Hst& t = res.hst;
            CHECK(rect_contains_rect(cube, res.boxes[static_cast<std::size_t>(t.root)], 1e-12));
            // descendants scale about ancestor centers, so a shrunk box can
            // drift out of its own original footprint but never grows and
            // never leaves the cube
            CHECK(res.shrunk_boxes[static_cast<std::size_t>(t.root)].origin ==
                  res.boxes[static_cast<std::size_t>(t.root)].origin);
            CHECK(res.shrunk_boxes[static_cast<std::size_t>(t.root)].sides ==
                  res.boxes[static_cast<std::size_t>(t.root)].sides);
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
                const HstNode& node = t.nodes[i];
                CHECK(rect_contains_rect(cube, res.shrunk_boxes[i], 1e-9));
                for (std::size_t k = 0; k < res.boxes[i].sides.size(); ++k) {
                    CHECK(res.shrunk_boxes[i].sides[k] <= res.boxes[i].sides[k] * (1.0 + 1e-12));
                }
                for (std::size_t a = 0; a < node.children.size(); ++a) {
                    const auto ca = static_cast<std::size_t>(node.children[a]);
                    CHECK(rect_contains_rect(res.boxes[i], res.boxes[ca], 1e-12));
                    CHECK(rect_contains_rect(res.shrunk_boxes[i], res.shrunk_boxes[ca], 1e-9));
                    for (std::size_t b = a + 1; b < node.children.size(); ++b) {
                        CHECK(rects_disjoint(res.boxes[ca],
                                             res.boxes[static_cast<std::size_t>(node.children[b])],
                                             1e-12));
                    }
                }
            }
            for (std::size_t i = 0; i < m.size(); ++i) {
                CHECK(rect_contains_point(cube, res.points[i], 1e-12));
                CHECK(rect_contains_point(
                    res.shrunk_boxes[static_cast<std::size_t>(t.leaf_map[i])], res.points[i],
                    1e-12));
            }

            // the report matches an independent pairwise recomputation
            double expansion = 0.0, contraction = 0.0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                for (std::size_t j = i + 1; j < m.size(); ++j) {
                    double img = 0.0;
                    for (std::size_t k = 0; k < res.points[i].size(); ++k) {
                        img += (res.points[i][k] - res.points[j][k]) *
                               (res.points[i][k] - res.points[j][k]);
                    }
                    img = std::sqrt(img);
                    expansion = std::max(expansion, img / m.d(i, j));
                    contraction = std::max(contraction, m.d(i, j) / img);
                }
            }
            CHECK(res.report.expansion == Approx(expansion).epsilon(1e-12));
            CHECK(res.report.contraction == Approx(contraction).epsilon(1e-12));
            CHECK(res.report.distortion == Approx(expansion * contraction).epsilon(1e-12));
            // the floor really is a floor
            CHECK(res.report.lower_bound >= 1.0);
            CHECK(res.report.ratio >= 1.0 - 1e-9);
            CHECK(res.report.distortion >= res.report.lower_bound * (1.0 - 1e-9));

            // measuring the returned points again reproduces the report
            const DistortionReport again = distortion(m, res.points);
            CHECK(again.distortion == Approx(res.report.distortion).epsilon(1e-12));
            CHECK(again.lower_bound == Approx(res.report.lower_bound).epsilon(1e-12));
            CHECK(again.epsilon_used == Approx(res.report.epsilon_used).epsilon(1e-12));

            // determinism
            const EmbeddingResult rerun = embed(m, d);
            REQUIRE(rerun.points.size() == res.points.size());
            for (std::size_t i = 0; i < res.points.size(); ++i) {
                CHECK(rerun.points[i] == res.points[i]);
            }
        }
    }
}

TEST_CASE("equidistant points carry their floor into the report") {
    const EmbeddingResult res = embed(star_metric(16, 1.0), 2);
    CHECK(res.report.lower_bound == Approx(2.0).epsilon(1e-12));
    CHECK(res.report.distortion >= 2.0 * (1.0 - 1e-9));
    CHECK(res.report.ratio >= 1.0 - 1e-9);
}
