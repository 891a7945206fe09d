#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pwa/mmps.hpp"
#include "pwa/modulus.hpp"
#include "pwa/polytope.hpp"

namespace pwa {

struct SampleSet {
    std::vector<std::pair<Vec, double>> points;  // (x, F(x))
    Polytope domain;
    int resolution = 0;  // grid points per dimension
};

enum class FitObjective { Linf, L1 };

struct FitConfig {
    // Explicit segment regions; when empty the domain is split into
    // target_segment_count equal slabs (1-D) or kept whole.
    std::vector<Polytope> partition;
    int target_segment_count = 1;
    int pieces_per_segment = 3;
    // Per-region piece counts; used when its size matches the region count.
    std::vector<int> pieces_by_region;
    FitObjective objective = FitObjective::Linf;
    int max_iterations = 60;
    std::uint64_t seed = 0;
    int restarts = 5;
    int resolution = 3001;
    // Reseed pieces that lose all their samples near the worst-error point
    // instead of parking them below the data.
    bool reseed_dead = false;
    // Re-solve coefficients on the realized breakpoints with the slope-gap
    // boosting LP; costs a slightly larger residual, buys a larger c1.
    bool polish = true;
    // Skip the alternating heuristic: equal-width cells, one LP fit.
    bool lock_equal_cells = false;
    std::optional<double> lipschitz_L;
    // Extra warm-start breakpoints (1-D, size pieces+1) tried before the
    // built-in restart family.
    std::vector<double> warm_edges;
};

struct DeltaEstimate {
    double delta = 0.0;
    Vec argmax_point;
    int resolution = 0;
};

// Uniform grid over the bounding box, filtered to the domain. Non-finite
// objective values raise EvaluationError carrying the offending point.
SampleSet sample(const ScalarField& F, const Polytope& domain, int resolution);

// Best max-of-affines fit with the given number of pieces. Piece counts are
// chained internally (2, 3, ..., pieces) so the residual is non-increasing
// in the piece count on the same samples.
ConvexSegment fit_segment(const SampleSet& samples, int pieces, const FitConfig& config = {});

// Full MMPS surrogate over a partition of the domain, continuous across
// segment boundaries. Returns the surrogate with its residual estimate at
// the fitting resolution.
std::pair<MmpsFunction, DeltaEstimate> fit_mmps(const ScalarField& F, const Polytope& domain,
                                                const FitConfig& config);

DeltaEstimate estimate_delta(const ScalarField& F, const MmpsFunction& f, const Polytope& region,
                             int resolution,
                             std::optional<double> lipschitz_L = std::nullopt);

// Split-and-refit until the theorem bound certifies target_chi (1-D).
// Failure to reach the target is reported through verified=false rather
// than an exception.
std::pair<MmpsFunction, SensitivityReport> refine_to_radius(const ScalarField& F,
                                                            const Polytope& domain,
                                                            double target_chi,
                                                            const FitConfig& config = {});

// Curvature-weighted centroidal Voronoi tessellation pipeline (2-D):
// generators, their Voronoi cells clipped to the box, and the activation
// constrained LP fit with one piece per cell.
std::vector<Vec> cvt_generators(const ScalarField& F, const Polytope& box, int count,
                                std::uint64_t seed, int iters = 40, double power = 0.5);
std::vector<Polytope> voronoi_cells(const std::vector<Vec>& generators, const Polytope& box);
ConvexSegment cvt_constrained_fit(const ScalarField& F, const std::vector<Vec>& generators,
                                  const std::vector<Polytope>& cells, const Polytope& box);

}  // namespace pwa
