#include <cmath>
#include <random>

#include "doctest.h"
#include "pwa/bench.hpp"

using namespace pwa;

namespace {

// Independent transcription of the two objectives, kept deliberately verbose.
double eggholder_ref(double x) {
    const double y = 0.0;
    const double t1 = -(y + 47.0) * std::sin(std::sqrt(std::fabs(x / 2.0 + y + 47.0)));
    const double t2 = -x * std::sin(std::sqrt(std::fabs(x - (y + 47.0))));
    return t1 + t2;
}

double nmpc_ref(double u1, double u2) {
    const double pi = 3.14159265358979323846;
    const double x1 = 0.02 * u1 + pi;
    const double a = std::sqrt(x1 * x1 + 2.0 * pi * pi);
    const double b = 0.02 * std::sqrt(u1 * u1 + (u1 + u2) * (u1 + u2));
    const double c = 0.01 * std::sqrt(u1 * u1 + u2 * u2);
    return a + b + c;
}

}  // namespace

TEST_CASE("eggholder slice matches an independent transcription") {
    for (double x : {-512.0, -330.0, -250.9875, -94.0, 0.0, 47.0, 123.456, 511.9}) {
        CHECK(eggholder_1d(x) == doctest::Approx(eggholder_ref(x)).epsilon(1e-12));
    }
}

TEST_CASE("eggholder has square-root cusps where the |.| arguments vanish") {
    // Near x = 47 the second term behaves like -47 sin(sqrt|x-47|), so the
    // increment scales with sqrt(h), not h.
    const double h = 1e-8;
    const double ratio = std::fabs(eggholder_1d(47.0 + h) - eggholder_1d(47.0)) / std::sqrt(h);
    CHECK(ratio > 40.0);
    CHECK(ratio < 55.0);
}

TEST_CASE("nmpc objective matches the closed form and its exact minimum") {
    const double pi = 3.14159265358979323846;
    CHECK(nmpc_objective(0.0, 0.0) == doctest::Approx(pi * std::sqrt(3.0)).epsilon(1e-14));
    for (double u1 : {-20.0, -7.5, 0.0, 3.25, 20.0})
        for (double u2 : {-20.0, -1.0, 0.0, 11.0, 20.0})
            CHECK(nmpc_objective(u1, u2) == doctest::Approx(nmpc_ref(u1, u2)).epsilon(1e-12));
}

TEST_CASE("nmpc objective is convex along random chords") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
        const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
        const double mid = nmpc_objective(0.5 * (a1 + b1), 0.5 * (a2 + b2));
        const double chord = 0.5 * (nmpc_objective(a1, a2) + nmpc_objective(b1, b2));
        CHECK(mid <= chord + 1e-9);
    }
    // The origin is the unconstrained minimizer: every norm term bottoms out.
    CHECK(nmpc_objective(0.0, 0.0) <= nmpc_objective(0.3, -0.2));
    CHECK(nmpc_objective(0.0, 0.0) <= nmpc_objective(-20.0, 20.0));
}

TEST_CASE("benchmark registry exposes both objectives with their domains") {
    REQUIRE(benchmarks().size() == 2);

    const auto egg = find_benchmark("eggholder1d");
    REQUIRE(egg.has_value());
    CHECK(egg->domain.dim() == 1);
    const auto [lo, hi] = egg->domain.interval_bounds();
    CHECK(lo == doctest::Approx(-512.0));
    CHECK(hi == doctest::Approx(512.0));
    CHECK(egg->field(Vec{100.0}) == doctest::Approx(eggholder_1d(100.0)));

    const auto nmpc = find_benchmark("nmpc-theta0");
    REQUIRE(nmpc.has_value());
    CHECK(nmpc->domain.dim() == 2);
    CHECK(nmpc->domain.diameter() == doctest::Approx(40.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(nmpc->field(Vec{1.0, -2.0}) == doctest::Approx(nmpc_objective(1.0, -2.0)));

    CHECK_FALSE(find_benchmark("unknown").has_value());
}
