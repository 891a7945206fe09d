#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwa/mmps.hpp"

namespace pwa {

using ScalarField = std::function<double(const Vec&)>;

// Sampled convexity-modulus curve gamma -> h1(gamma) on a uniform grid of
// [0, diam); h1 is +inf beyond diam. mode is "exact-1d" or "sampled-nd";
// the sampled flavor is an upper bound of the true infimum.
struct ModulusCurve {
    std::vector<std::pair<double, double>> samples;  // (gamma, value), ascending
    double diam = 0.0;
    std::string mode;
};

struct ModulusConfig {
    int pairs = 4096;         // random chord pairs (n-D sampler)
    int refine_steps = 20;    // accept-if-better local refinement rounds
    std::uint64_t seed = 0;
};

// Closed-form lower bound on h1 built from subregion geometry. c1/c0 follow
// the slope-gap construction at the largest subregion; evaluate() instead
// ramps with c1_safe, the minimum gap over ALL touching subregion pairs,
// because a remote pair with a smaller gap can undercut the c1 ramp.
struct LowerBoundModulus {
    std::optional<double> c1;  // gap at the largest subregion; empty when Q=1
    double c0 = 0.0;           // c1 * diam, kept for traceability
    double c1_safe = 0.0;      // global minimum touching-pair gap
    double zero_radius = 0.0;  // largest subregion diameter
    double diam = 0.0;

    double evaluate(double gamma) const;
};

struct SensitivityReport {
    double delta = 0.0;
    std::optional<double> c1;
    double max_subregion_diam = 0.0;
    std::optional<double> chi_theorem;
    std::optional<double> chi_curve;
    bool verified = false;
    std::optional<double> oracle_distance;
    std::optional<Vec> x_star;  // grid minimizer of the reference field
    std::optional<Vec> x_hat;   // grid minimizer of the surrogate
};

ModulusCurve modulus_curve(const ConvexSegment& seg, int gamma_steps,
                           const ModulusConfig& cfg = {});

// Exact 1-D modulus at a single gamma (breakpoint candidate enumeration).
double modulus_value_1d(const ConvexSegment& seg, double gamma);

LowerBoundModulus lower_bound_modulus(const ConvexSegment& seg);

// Generalized inverse sup{gamma : h1(gamma) <= y}; returns the gamma of the
// first stored sample exceeding y (one conservative grid step), or diam when
// the curve never exceeds y.
double inverse_modulus(const ModulusCurve& curve, double y);

double confidence_radius(const ModulusCurve& curve, double delta);
double confidence_radius(const LowerBoundModulus& bound, double delta);

// min(2*delta/c1 + zero_radius, diam); DegenerateBoundError when c1 is
// undefined or vanishes, carrying diam as the fallback radius.
double theorem_bound(const LowerBoundModulus& bound, double delta);

// Brute-force grid minimization of F and the segment: fills oracle_distance,
// the minimizer pair, and verified = (distance <= radius + grid spacing).
SensitivityReport verify_bound(const ScalarField& F, const ConvexSegment& seg,
                               double radius, int grid_resolution);

std::string curve_csv(const ModulusCurve& curve);

nlohmann::json to_json(const SensitivityReport& rep);

}  // namespace pwa
