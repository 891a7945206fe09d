#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pwa/modulus.hpp"
#include "pwa/polytope.hpp"

namespace pwa {

// A named nonlinear objective together with the polytopic domain on which the
// certification pipeline is allowed to query it.
struct Benchmark {
    std::string name;
    ScalarField field;
    Polytope domain;
};

// Eggholder restricted to the y = 0 slice; multimodal, locally Lipschitz,
// nondifferentiable at x = -94 and x = 47 where the |.| arguments vanish.
double eggholder_1d(double x);

// Inverted-pendulum NMPC stage objective at theta_k = 0, horizon 2, decision
// variables (u1, u2) in [-20, 20]^2. Convex but not differentiable at the
// origin of each norm term.
double nmpc_objective(double u1, double u2);

const std::vector<Benchmark>& benchmarks();
std::optional<Benchmark> find_benchmark(const std::string& name);

}  // namespace pwa
