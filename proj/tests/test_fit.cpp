#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pwa/bench.hpp"
#include "pwa/errors.hpp"
#include "pwa/fit.hpp"
#include "pwa/modulus.hpp"

using namespace pwa;

namespace {

const ScalarField kEggholder = [](const Vec& x) { return eggholder_1d(x[0]); };

double sup_error_on_samples(const ConvexSegment& seg, const SampleSet& samples) {
    double worst = 0.0;
    for (const auto& [x, v] : samples.points)
        worst = std::max(worst, std::fabs(seg.max_value(x) - v));
    return worst;
}

}  // namespace

TEST_CASE("sample grids the domain and rejects non-finite objectives") {
    const SampleSet s = sample(kEggholder, Polytope::interval(-1.0, 1.0), 5);
    REQUIRE(s.points.size() == 5);
    CHECK(s.points.front().first[0] == doctest::Approx(-1.0));
    CHECK(s.points.back().first[0] == doctest::Approx(1.0));
    CHECK(s.resolution == 5);

    const ScalarField bad = [](const Vec& x) {
        return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    };
    CHECK_THROWS_AS(sample(bad, Polytope::interval(0.0, 1.0), 11), EvaluationError);
    CHECK_THROWS_AS(sample(kEggholder, Polytope::interval(0.0, 1.0), 1), InputError);
}

TEST_CASE("an affine objective is reproduced exactly") {
    const ScalarField f = [](const Vec& x) { return 2.0 * x[0] + 1.0; };
    const Polytope dom = Polytope::interval(0.0, 1.0);
    auto [mm, delta] = fit_mmps(f, dom, FitConfig{});
    CHECK(delta.delta <= 1e-9);
    for (double x : {0.0, 0.31, 0.77, 1.0})
        CHECK(mm.evaluate({x}) == doctest::Approx(2.0 * x + 1.0).epsilon(1e-9));
}

TEST_CASE("a convex kink is recovered to sample precision") {
    const ScalarField f = [](const Vec& x) { return std::fabs(x[0]); };
    const Polytope dom = Polytope::interval(-1.0, 2.0);
    FitConfig cfg;
    cfg.pieces_per_segment = 2;
    cfg.resolution = 601;
    auto [mm, delta] = fit_mmps(f, dom, cfg);
    CHECK(delta.delta <= 1e-7);
    // Recovered slopes bracket the kink.
    const auto& pieces = mm.segments().front().pieces;
    REQUIRE(pieces.size() >= 2);
    double smin = 1e300, smax = -1e300;
    for (const auto& p : pieces) {
        smin = std::min(smin, p.a[0]);
        smax = std::max(smax, p.a[0]);
    }
    CHECK(smin == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(smax == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit_segment requires enough samples") {
    const SampleSet s = sample(kEggholder, Polytope::interval(0.0, 1.0), 3);
    CHECK_THROWS_AS(fit_segment(s, 8, FitConfig{}), InsufficientDataError);
}

TEST_CASE("residual is non-increasing in the piece count on fixed samples") {
    const SampleSet s = sample(kEggholder, oracle::make_c3(), 1001);
    FitConfig cfg;
    cfg.restarts = 1;
    cfg.reseed_dead = true;
    double prev = 1e300;
    for (int q = 2; q <= 6; ++q) {
        const ConvexSegment seg = fit_segment(s, q, cfg);
        const double resid = sup_error_on_samples(seg, s);
        CHECK(resid <= prev + 1e-12);
        prev = resid;
    }
}

TEST_CASE("three-piece fit on C3 lands in the reference residual band") {
    FitConfig cfg;
    cfg.pieces_per_segment = 3;
    auto [mm, delta] = fit_mmps(kEggholder, oracle::make_c3(), cfg);
    CHECK(delta.delta >= 14.0);
    CHECK(delta.delta <= 16.5);
}

TEST_CASE("the eight-piece recipe reproduces the fitted-stage geometry") {
    FitConfig cfg;
    cfg.pieces_per_segment = 8;
    cfg.resolution = 3001;
    cfg.restarts = 1;
    cfg.reseed_dead = true;
    const SampleSet s = sample(kEggholder, oracle::make_c3(), cfg.resolution);
    const ConvexSegment seg = fit_segment(s, 8, cfg);
    const MmpsFunction mm({seg}, oracle::make_c3());

    const double delta = estimate_delta(kEggholder, mm, oracle::make_c3(), 3001).delta;
    CHECK(delta >= 2.0);
    CHECK(delta <= 2.5);

    const LowerBoundModulus lb = lower_bound_modulus(seg);
    REQUIRE(lb.c1.has_value());
    CHECK(*lb.c1 == doctest::Approx(oracle::kF32C1).epsilon(1e-9));
    CHECK(lb.zero_radius == doctest::Approx(oracle::kF32MaxSubdiam).epsilon(1e-9));
}

TEST_CASE("equal-width cells leave near-tied slopes") {
    FitConfig cfg;
    cfg.lock_equal_cells = true;
    cfg.pieces_per_segment = 15;
    cfg.resolution = 3001;
    auto [mm, delta] = fit_mmps(kEggholder, oracle::make_c3(), cfg);
    CHECK(delta.delta == doctest::Approx(oracle::kLock15Delta).epsilon(1e-9));

    const LowerBoundModulus lb = lower_bound_modulus(mm.segments().front());
    REQUIRE(lb.c1.has_value());
    CHECK(*lb.c1 == doctest::Approx(oracle::kLock15C1).epsilon(1e-6));
    CHECK(lb.zero_radius == doctest::Approx(10.0).epsilon(1e-9));
    // Near-tied slopes push the theorem radius past the region diameter.
    CHECK(theorem_bound(lb, delta.delta) == doctest::Approx(150.0));
}

TEST_CASE("refinement hits the radius target with separated slopes") {
    auto [mm, rep] = refine_to_radius(kEggholder, oracle::make_c3(), 15.0, FitConfig{});
    CHECK(rep.verified);
    CHECK(rep.max_subregion_diam <= 10.0 + 1e-9);
    REQUIRE(rep.chi_theorem.has_value());
    CHECK(*rep.chi_theorem <= 15.0);
    CHECK(rep.delta == doctest::Approx(oracle::kRefineDelta).epsilon(1e-9));
    REQUIRE(rep.c1.has_value());
    CHECK(*rep.c1 == doctest::Approx(oracle::kRefineC1).epsilon(1e-9));
    // The curve route stays above the theorem route here: the global curve
    // never separates points inside the widest cell, the per-pair ramp does.
    REQUIRE(rep.chi_curve.has_value());
    CHECK(*rep.chi_curve >= *rep.chi_theorem);
}

TEST_CASE("fits are deterministic and repeatable") {
    FitConfig cfg;
    cfg.pieces_per_segment = 4;
    cfg.resolution = 1001;
    cfg.seed = 9;
    auto [mm1, d1] = fit_mmps(kEggholder, oracle::make_c3(), cfg);
    auto [mm2, d2] = fit_mmps(kEggholder, oracle::make_c3(), cfg);
    CHECK(d1.delta == d2.delta);
    CHECK(to_json(mm1).dump() == to_json(mm2).dump());
}

TEST_CASE("multi-region partition stays continuous and tracks the regional minima") {
    const std::vector<double> edges = {-512.0, -385.0, -330.0, -180.0, 180.0, 512.0};
    FitConfig cfg;
    cfg.resolution = 3001;
    cfg.reseed_dead = true;
    cfg.pieces_by_region = {3, 1, 3, 3, 1};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        cfg.partition.push_back(Polytope::interval(edges[i], edges[i + 1]));

    auto [mm, delta] = fit_mmps(kEggholder, Polytope::interval(-512.0, 512.0), cfg);
    REQUIRE(mm.segments().size() == 5);

    const ValidationReport vr = validate(mm);
    CHECK(vr.valid);
    CHECK(vr.max_jump <= 1e-6);

    CHECK(delta.delta >= 350.0);
    CHECK(delta.delta <= 372.0);

    // Each regional surrogate minimum sits near the true regional minimum.
    const double expected[] = {-512.0, -330.0, -238.5, -86.18, 512.0};
    for (int r = 0; r < 5; ++r) {
        const double m = oracle::grid_argmin(
            [&](double x) { return mm.evaluate({x}); }, edges[r], edges[r + 1], 4001);
        CHECK(std::fabs(m - expected[r]) <= 2.0);
    }
    // Boundary agreement pieces only ever extend a segment's piece list.
    for (int r = 0; r < 5; ++r)
        CHECK(mm.segments()[r].pieces.size() >=
              static_cast<std::size_t>(cfg.pieces_by_region[r]));
}

TEST_CASE("estimate_delta finds the worst gap and applies Lipschitz padding") {
    const double slope = 0.0, offset = 0.0;
    const ConvexSegment zero =
        oracle::make_segment(&slope, &offset, 1, Polytope::interval(-1.0, 1.0));
    const MmpsFunction mm({zero}, Polytope::interval(-1.0, 1.0));
    const ScalarField f = [](const Vec& x) { return std::fabs(x[0]); };

    const DeltaEstimate d = estimate_delta(f, mm, Polytope::interval(-1.0, 1.0), 201);
    CHECK(d.delta == doctest::Approx(1.0));
    CHECK(std::fabs(d.argmax_point[0]) == doctest::Approx(1.0));
    CHECK(d.resolution == 201);

    // Padding: delta + L * spacing / 2 with spacing = 2/200.
    const DeltaEstimate padded = estimate_delta(f, mm, Polytope::interval(-1.0, 1.0), 201, 1.0);
    CHECK(padded.delta == doctest::Approx(1.0 + 0.5 * 0.01));
}

TEST_CASE("voronoi construction covers the box with the generators inside their cells") {
    const auto nmpc = *find_benchmark("nmpc-theta0");
    const std::vector<Vec> gens = cvt_generators(nmpc.field, nmpc.domain, 4, 0);
    REQUIRE(gens.size() == 4);
    for (const Vec& g : gens) CHECK(nmpc.domain.contains(g, 1e-9));

    const std::vector<Polytope> cells = voronoi_cells(gens, nmpc.domain);
    REQUIRE(cells.size() == 4);
    for (std::size_t q = 0; q < cells.size(); ++q) CHECK(cells[q].contains(gens[q], 1e-7));
    // Cells tile the box: a probe grid always lands in at least one cell.
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const Vec p{-20.0 + 2.0 * i, -20.0 + 2.0 * j};
            bool covered = false;
            for (const auto& c : cells) covered = covered || c.contains(p, 1e-7);
            CHECK(covered);
        }
}

TEST_CASE("the four-cell nmpc fit reproduces its frozen certificate") {
    const auto nmpc = *find_benchmark("nmpc-theta0");
    FitConfig cfg;
    cfg.pieces_per_segment = 4;
    cfg.resolution = 201;
    auto [mm, delta] = fit_mmps(nmpc.field, nmpc.domain, cfg);
    REQUIRE(mm.segments().size() == 1);
    CHECK(delta.delta == doctest::Approx(oracle::kNmpcQ4Delta).epsilon(1e-9));

    const LowerBoundModulus lb = lower_bound_modulus(mm.segments().front());
    CHECK(lb.zero_radius == doctest::Approx(oracle::kNmpcQ4MaxSubdiam).epsilon(1e-9));
    CHECK(theorem_bound(lb, delta.delta) == doctest::Approx(oracle::kNmpcQ4Theorem).epsilon(1e-9));
}

TEST_CASE("fit configuration errors surface as usage errors") {
    FitConfig cfg;
    cfg.partition = {Polytope::interval(0.0, 0.4)};  // does not tile [0,1]
    CHECK_THROWS_AS(fit_mmps(kEggholder, Polytope::interval(0.0, 1.0), cfg), InputError);

    FitConfig l1nd;
    l1nd.objective = FitObjective::L1;
    const auto nmpc = *find_benchmark("nmpc-theta0");
    CHECK_THROWS_AS(fit_mmps(nmpc.field, nmpc.domain, l1nd), InputError);
}
