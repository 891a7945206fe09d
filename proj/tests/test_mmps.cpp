#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pwa/errors.hpp"
#include "pwa/mmps.hpp"

using namespace pwa;

namespace {

// |x| as a two-piece segment on [-2, 2].
ConvexSegment abs_segment() {
    ConvexSegment seg;
    seg.pieces = {AffineMap{{-1.0}, 0.0}, AffineMap{{1.0}, 0.0}};
    seg.region = Polytope::interval(-2.0, 2.0);
    seg.subregions = compute_subregions(seg);
    return seg;
}

}  // namespace

TEST_CASE("max_value and active_piece pick the max with lowest-index ties") {
    const ConvexSegment seg = abs_segment();
    CHECK(seg.max_value({1.5}) == doctest::Approx(1.5));
    CHECK(seg.max_value({-0.5}) == doctest::Approx(0.5));
    CHECK(seg.active_piece({-0.5}) == 0);
    CHECK(seg.active_piece({1.5}) == 1);
    // At the kink both pieces attain the max; the lower index wins.
    CHECK(seg.active_piece({0.0}) == 0);
}

TEST_CASE("compute_subregions splits the published three-piece segment at its kinks") {
    const ConvexSegment seg = oracle::make_f31();
    REQUIRE(seg.subregions.size() == 3);
    const auto [l0, h0] = seg.subregions[0].interval_bounds();
    const auto [l1, h1] = seg.subregions[1].interval_bounds();
    const auto [l2, h2] = seg.subregions[2].interval_bounds();
    CHECK(l0 == doctest::Approx(oracle::kC3Lo).epsilon(1e-12));
    CHECK(h0 == doctest::Approx(oracle::kF31Kink01).epsilon(1e-12));
    CHECK(l1 == doctest::Approx(oracle::kF31Kink01).epsilon(1e-12));
    CHECK(h1 == doctest::Approx(oracle::kF31Kink12).epsilon(1e-12));
    CHECK(l2 == doctest::Approx(oracle::kF31Kink12).epsilon(1e-12));
    CHECK(h2 == doctest::Approx(oracle::kC3Hi).epsilon(1e-12));
    // Widest cell drives the modulus floor.
    double widest = 0.0;
    for (const auto& cell : seg.subregions) widest = std::max(widest, cell.diameter());
    CHECK(widest == doctest::Approx(oracle::kF31MaxSubdiam).epsilon(1e-12));
}

TEST_CASE("evaluate takes the min across segments") {
    // f = -|x| = min(x, -x); each segment's region is where it attains the
    // min, and the min runs over all segments, not just the region owner.
    ConvexSegment left;
    left.pieces = {AffineMap{{1.0}, 0.0}};
    left.region = Polytope::interval(-2.0, 0.0);
    left.subregions = compute_subregions(left);
    ConvexSegment right;
    right.pieces = {AffineMap{{-1.0}, 0.0}};
    right.region = Polytope::interval(0.0, 2.0);
    right.subregions = compute_subregions(right);

    const MmpsFunction f({left, right}, Polytope::interval(-2.0, 2.0));
    CHECK(f.evaluate({-1.0}) == doctest::Approx(-1.0));
    CHECK(f.evaluate({1.0}) == doctest::Approx(-1.0));
    CHECK(f.evaluate({0.0}) == doctest::Approx(0.0));
    CHECK(f.active_segment({-1.0}) == std::pair<int, int>{0, 0});
    CHECK(f.active_segment({1.0}) == std::pair<int, int>{1, 0});
    // Tie at the shared boundary resolves to the first segment.
    CHECK(f.active_segment({0.0}).first == 0);
    CHECK_THROWS_AS(f.evaluate({2.5}), DomainViolationError);
}

TEST_CASE("validate accepts a continuous tiling and reports its jump") {
    ConvexSegment left;
    left.pieces = {AffineMap{{-1.0}, 0.0}};
    left.region = Polytope::interval(-1.0, 0.0);
    left.subregions = compute_subregions(left);
    ConvexSegment right;
    right.pieces = {AffineMap{{1.0}, 0.0}};
    right.region = Polytope::interval(0.0, 1.0);
    right.subregions = compute_subregions(right);
    const MmpsFunction f({left, right}, Polytope::interval(-1.0, 1.0));

    const ValidationReport rep = validate(f);
    CHECK(rep.valid);
    CHECK(rep.max_jump <= rep.tol);
    CHECK(rep.coverage_gap_count == 0);
}

TEST_CASE("validate flags a boundary jump") {
    ConvexSegment left;
    left.pieces = {AffineMap{{0.0}, 0.0}};
    left.region = Polytope::interval(-1.0, 0.0);
    left.subregions = compute_subregions(left);
    ConvexSegment right;
    right.pieces = {AffineMap{{0.0}, 0.5}};  // jumps to 0.5 at the shared point
    right.region = Polytope::interval(0.0, 1.0);
    right.subregions = compute_subregions(right);
    const MmpsFunction f({left, right}, Polytope::interval(-1.0, 1.0));

    const ValidationReport rep = validate(f);
    CHECK_FALSE(rep.valid);
    CHECK(rep.max_jump == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("validate counts coverage gaps") {
    ConvexSegment left;
    left.pieces = {AffineMap{{0.0}, 0.0}};
    left.region = Polytope::interval(-1.0, -0.5);
    left.subregions = compute_subregions(left);
    const MmpsFunction f({left}, Polytope::interval(-1.0, 1.0));

    const ValidationReport rep = validate(f);
    CHECK_FALSE(rep.valid);
    CHECK(rep.coverage_gap_count > 0);
    REQUIRE(rep.first_gap_point.has_value());
    CHECK((*rep.first_gap_point)[0] > -0.5);
}

TEST_CASE("json round trip preserves values exactly") {
    const ConvexSegment seg = oracle::make_f31();
    const MmpsFunction f({seg}, oracle::make_c3());
    const nlohmann::json doc = to_json(f);
    CHECK(doc.at("format") == "mmps-v1");

    const MmpsFunction g = mmps_from_json(doc);
    REQUIRE(g.segments().size() == 1);
    REQUIRE(g.segments()[0].pieces.size() == 3);
    for (int i = 0; i <= 100; ++i) {
        const Vec x{oracle::kC3Lo + i * (oracle::kC3Hi - oracle::kC3Lo) / 100.0};
        CHECK(f.evaluate(x) == g.evaluate(x));  // bit-exact through JSON
    }
    // Derived activation cells are rebuilt, not parsed.
    CHECK(g.segments()[0].subregions.size() == 3);
}

TEST_CASE("mmps_from_json rejects malformed documents") {
    CHECK_THROWS_AS(mmps_from_json(nlohmann::json{{"format", "other"}}), FormatError);
    CHECK_THROWS_AS(mmps_from_json(nlohmann::json::parse("[1,2,3]")), FormatError);
    nlohmann::json doc = to_json(MmpsFunction({oracle::make_f31()}, oracle::make_c3()));
    doc["segments"][0].erase("pieces");
    CHECK_THROWS_AS(mmps_from_json(doc), FormatError);
}
