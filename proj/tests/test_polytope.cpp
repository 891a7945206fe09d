#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pwa/errors.hpp"
#include "pwa/polytope.hpp"

using namespace pwa;

TEST_CASE("box factory builds the expected vertex set") {
    const Polytope box = Polytope::box({-1.0, 0.0}, {2.0, 3.0});
    CHECK(box.dim() == 2);
    CHECK(box.is_feasible());
    CHECK(box.bounded());
    REQUIRE(box.vertices().size() == 4);
    CHECK(box.contains({0.0, 1.0}));
    CHECK(box.contains({-1.0, 0.0}));  // boundary counts
    CHECK_FALSE(box.contains({-1.1, 0.0}));
    // Diameter is the box diagonal.
    CHECK(box.diameter() == doctest::Approx(std::sqrt(9.0 + 9.0)).epsilon(1e-12));
}

TEST_CASE("diameter agrees with explicit vertex pair scan") {
    const Polytope tri(2, {Halfspace{{-1.0, 0.0}, 0.0},   // x >= 0
                           Halfspace{{0.0, -1.0}, 0.0},   // y >= 0
                           Halfspace{{1.0, 1.0}, 2.0}});  // x + y <= 2
    const auto& v = tri.vertices();
    REQUIRE(v.size() == 3);
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, dist(v[i], v[j]));
    CHECK(tri.diameter() == doctest::Approx(best).epsilon(1e-9));
    CHECK(tri.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("interval helpers") {
    const Polytope seg = Polytope::interval(-3.0, 5.0);
    CHECK(seg.dim() == 1);
    const auto [lo, hi] = seg.interval_bounds();
    CHECK(lo == doctest::Approx(-3.0));
    CHECK(hi == doctest::Approx(5.0));
    CHECK(seg.diameter() == doctest::Approx(8.0));

    const Polytope ray(1, {Halfspace{{-1.0}, 0.0}});  // x >= 0
    const auto [rlo, rhi] = ray.interval_bounds();
    CHECK(rlo == doctest::Approx(0.0));
    CHECK(std::isinf(rhi));
}

TEST_CASE("empty and unbounded regions throw on vertex queries") {
    const Polytope empty(1, {Halfspace{{1.0}, 0.0}, Halfspace{{-1.0}, -1.0}});  // x<=0, x>=1
    CHECK_FALSE(empty.is_feasible());
    CHECK_THROWS_AS(empty.vertices(), EmptyRegionError);

    const Polytope half(2, {Halfspace{{1.0, 0.0}, 1.0}});
    CHECK(half.is_feasible());
    CHECK_FALSE(half.bounded());
    CHECK_THROWS_AS(half.diameter(), UnboundedRegionError);
}

TEST_CASE("intersected narrows the region") {
    const Polytope box = Polytope::box({0.0, 0.0}, {4.0, 4.0});
    const Polytope cut = box.intersected({Halfspace{{1.0, 0.0}, 1.0}});  // x <= 1
    CHECK(cut.contains({0.5, 3.0}));
    CHECK_FALSE(cut.contains({2.0, 2.0}));
    CHECK(cut.diameter() == doctest::Approx(std::sqrt(1.0 + 16.0)).epsilon(1e-9));

    const Polytope none = box.intersected({Halfspace{{1.0, 0.0}, -1.0}});  // x <= -1
    CHECK_FALSE(none.is_feasible());
}

TEST_CASE("intersects detects touching and disjoint regions") {
    const Polytope a = Polytope::interval(0.0, 1.0);
    const Polytope b = Polytope::interval(1.0, 2.0);   // shares the point 1
    const Polytope c = Polytope::interval(1.5, 3.0);
    CHECK(intersects(a, b));
    CHECK_FALSE(intersects(a, c));
    CHECK(intersects(b, c));
}

TEST_CASE("random_point lands inside and is deterministic per seed") {
    const Polytope box = Polytope::box({-2.0, 1.0}, {3.0, 4.0});
    std::mt19937_64 r1(42), r2(42);
    for (int i = 0; i < 200; ++i) {
        const Vec p = random_point(box, r1);
        const Vec q = random_point(box, r2);
        CHECK(box.contains(p, 1e-9));
        CHECK(p == q);
    }
}

TEST_CASE("bounding_box covers the vertices") {
    const Polytope tri(2, {Halfspace{{-1.0, 0.0}, 0.0}, Halfspace{{0.0, -1.0}, 0.0},
                           Halfspace{{1.0, 2.0}, 4.0}});
    const auto [lo, hi] = bounding_box(tri);
    CHECK(lo[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(lo[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(hi[0] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(hi[1] == doctest::Approx(2.0).epsilon(1e-9));
}
