#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pwa/errors.hpp"
#include "pwa/modulus.hpp"

using namespace pwa;

TEST_CASE("exact 1-d modulus matches closed-form spot values on the published surrogate") {
    const ConvexSegment seg = oracle::make_f31();
    CHECK(modulus_value_1d(seg, 30.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(modulus_value_1d(seg, 59.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(modulus_value_1d(seg, 61.0) == doctest::Approx(oracle::kF31H1At61).epsilon(1e-9));
    CHECK(modulus_value_1d(seg, 70.0) == doctest::Approx(oracle::kF31H1At70).epsilon(1e-9));
    CHECK(modulus_value_1d(seg, 90.0) == doctest::Approx(oracle::kF31H1At90).epsilon(1e-9));
    CHECK(modulus_value_1d(seg, 120.0) == doctest::Approx(oracle::kF31H1At120).epsilon(1e-9));
}

TEST_CASE("modulus_curve samples the exact 1-d values on a half-open gamma grid") {
    const ConvexSegment seg = oracle::make_f31();
    const ModulusCurve curve = modulus_curve(seg, 300);
    CHECK(curve.mode == "exact-1d");
    CHECK(curve.diam == doctest::Approx(150.0));
    REQUIRE(curve.samples.size() == 300);
    CHECK(curve.samples.front().first == 0.0);
    CHECK(curve.samples.back().first < curve.diam);
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
        CHECK(curve.samples[i].second >= curve.samples[i - 1].second - 1e-12);
    // Spot check one grid point against the exact evaluator.
    const auto& [g, v] = curve.samples[200];  // gamma = 100
    CHECK(v == doctest::Approx(modulus_value_1d(seg, g)).epsilon(1e-12));
}

TEST_CASE("lower bound modulus reproduces the published three-piece geometry") {
    const LowerBoundModulus lb = lower_bound_modulus(oracle::make_f31());
    REQUIRE(lb.c1.has_value());
    CHECK(*lb.c1 == doctest::Approx(oracle::kF31C1).epsilon(1e-12));
    CHECK(lb.c0 == doctest::Approx(oracle::kF31C0).epsilon(1e-12));
    CHECK(lb.c1_safe == doctest::Approx(oracle::kF31C1).epsilon(1e-12));
    CHECK(lb.zero_radius == doctest::Approx(oracle::kF31MaxSubdiam).epsilon(1e-12));
    CHECK(lb.diam == doctest::Approx(150.0));
    // The ramp vanishes inside the widest cell and stays below h1 outside.
    CHECK(lb.evaluate(30.0) == 0.0);
    CHECK(lb.evaluate(70.0) == doctest::Approx(oracle::kF31H1At70).epsilon(1e-9));
    CHECK(lb.evaluate(70.0) <= modulus_value_1d(oracle::make_f31(), 70.0) + 1e-7);
}

TEST_CASE("inverse_modulus rounds up to the next sampled gamma") {
    ModulusCurve curve;
    curve.diam = 3.0;
    curve.mode = "exact-1d";
    curve.samples = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 5.0}};
    CHECK(inverse_modulus(curve, 3.0) == doctest::Approx(2.0));
    CHECK(inverse_modulus(curve, 0.0) == doctest::Approx(2.0));  // first sample above 0
    CHECK(inverse_modulus(curve, 5.0) == doctest::Approx(3.0));  // never exceeded -> diam
    CHECK(confidence_radius(curve, 1.5) == doctest::Approx(inverse_modulus(curve, 3.0)));
}

TEST_CASE("theorem bound matches the published radius and caps at the diameter") {
    const LowerBoundModulus lb = lower_bound_modulus(oracle::make_f31());
    CHECK(theorem_bound(lb, 19.9) == doctest::Approx(oracle::kF31TheoremAt19p9).epsilon(1e-12));
    CHECK(theorem_bound(lb, 1e6) == doctest::Approx(150.0));
    CHECK(confidence_radius(lb, 19.9) == doctest::Approx(theorem_bound(lb, 19.9)));
}

TEST_CASE("degenerate slope gaps raise DegenerateBoundError with the diameter fallback") {
    // Two identical slopes: no separation, c1 undefined or zero.
    const double slopes[] = {1.0, 1.0};
    const double offsets[] = {0.0, 0.0};
    const ConvexSegment seg =
        oracle::make_segment(slopes, offsets, 2, Polytope::interval(0.0, 4.0));
    const LowerBoundModulus lb = lower_bound_modulus(seg);
    try {
        theorem_bound(lb, 1.0);
        FAIL("expected DegenerateBoundError");
    } catch (const DegenerateBoundError& e) {
        CHECK(e.fallback_radius == doctest::Approx(4.0));
    }
}

TEST_CASE("one-piece segment has an identically zero curve and no c1") {
    const double slope = 2.0, offset = 1.0;
    const ConvexSegment seg = oracle::make_segment(&slope, &offset, 1, Polytope::interval(0.0, 2.0));
    const LowerBoundModulus lb = lower_bound_modulus(seg);
    CHECK_FALSE(lb.c1.has_value());
    CHECK(lb.zero_radius == doctest::Approx(2.0));
    const ModulusCurve curve = modulus_curve(seg, 64);
    for (const auto& [g, v] : curve.samples) CHECK(v == 0.0);
    CHECK_THROWS_AS(theorem_bound(lb, 0.5), DegenerateBoundError);
}

TEST_CASE("sampled n-d curve upper-bounds the known modulus of |x1| on a box") {
    // f = max(-x1, x1) on [-1,1]^2. Cells are the two 1x2 halves, so the
    // curve vanishes through gamma = sqrt(5): one endpoint can sit on the
    // kink while the other reaches across. Past it, min(a,b) over straddling
    // pairs with a+b = sqrt(gamma^2-4), a,b <= 1 gives sqrt(gamma^2-4) - 1.
    ConvexSegment seg;
    seg.pieces = {AffineMap{{-1.0, 0.0}, 0.0}, AffineMap{{1.0, 0.0}, 0.0}};
    seg.region = Polytope::box({-1.0, -1.0}, {1.0, 1.0});
    seg.subregions = compute_subregions(seg);
    REQUIRE(seg.subregions.size() == 2);

    ModulusConfig cfg;
    cfg.seed = 3;
    const ModulusCurve curve = modulus_curve(seg, 160, cfg);
    CHECK(curve.mode == "sampled-nd");
    CHECK(curve.diam == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    double prev = 0.0;
    for (const auto& [g, v] : curve.samples) {
        const double exact = g <= std::sqrt(5.0) ? 0.0 : std::sqrt(g * g - 4.0) - 1.0;
        CHECK(v >= exact - 1e-9);        // sampled infimum never undercuts
        CHECK(v <= exact + 0.25);        // and the refinement gets close
        CHECK(v >= prev - 1e-12);        // non-decreasing by construction
        prev = v;
    }
}

TEST_CASE("verify_bound on the surrogate itself reports zero oracle distance") {
    const ConvexSegment seg = oracle::make_f31();
    const ScalarField self = [&seg](const Vec& x) { return seg.max_value(x); };
    const SensitivityReport rep = verify_bound(self, seg, 0.0, 4001);
    REQUIRE(rep.oracle_distance.has_value());
    CHECK(*rep.oracle_distance == 0.0);
    CHECK(rep.verified);
    CHECK((*rep.x_star)[0] == doctest::Approx((*rep.x_hat)[0]));
}

TEST_CASE("report json writes nulls for absent optionals and keeps minimizers") {
    SensitivityReport rep;
    rep.delta = 1.5;
    nlohmann::json j = to_json(rep);
    CHECK(j["format"] == "pwa-sens-report-v1");
    CHECK(j["c1"].is_null());
    CHECK(j["chi_theorem"].is_null());
    CHECK_FALSE(j.contains("x_star"));

    rep.c1 = 2.0;
    rep.x_star = Vec{1.0};
    rep.x_hat = Vec{2.0};
    j = to_json(rep);
    CHECK(j["c1"] == 2.0);
    CHECK(j["x_star"][0] == 1.0);
}

TEST_CASE("modulus structure properties hold on a random family") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const ConvexSegment seg = oracle::random_convex_pwa(rng);
        double maxd = 0.0;
        for (const auto& cell : seg.subregions) maxd = std::max(maxd, cell.diameter());

        const ModulusCurve curve = modulus_curve(seg, 200);
        const LowerBoundModulus lb = lower_bound_modulus(seg);
        double prev = -1.0;
        for (const auto& [g, v] : curve.samples) {
            CHECK(v >= prev - 1e-9);
            prev = v;
            if (g <= maxd + 1e-12) CHECK(v <= 1e-9);
            CHECK(lb.evaluate(g) <= v + 1e-7);
        }
    }
}

TEST_CASE("curve csv uses the gamma,h1 header and full precision") {
    ModulusCurve curve;
    curve.diam = 1.0;
    curve.samples = {{0.0, 0.0}, {0.5, 0.125}};
    const std::string csv = curve_csv(curve);
    CHECK(csv.rfind("gamma,h1\n", 0) == 0);
    CHECK(csv.find("0.5,0.125") != std::string::npos);
}
