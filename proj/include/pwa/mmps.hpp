#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pwa/linalg.hpp"
#include "pwa/polytope.hpp"

namespace pwa {

struct AffineMap {
    Vec a;
    double b = 0.0;
    double value(const Vec& x) const { return dot(a, x) + b; }
};

// One concave/convex building block: max of affine pieces over a region.
// subregions[q] is the activation cell where piece q attains the max; it is
// derived data, refreshed from pieces+region rather than serialized.
struct ConvexSegment {
    std::vector<AffineMap> pieces;
    Polytope region;
    std::vector<Polytope> subregions;

    double max_value(const Vec& x) const;
    int active_piece(const Vec& x) const;  // lowest index attaining the max
};

std::vector<Polytope> compute_subregions(const ConvexSegment& seg);

class MmpsFunction {
  public:
    MmpsFunction() = default;
    MmpsFunction(std::vector<ConvexSegment> segments, Polytope domain);

    const std::vector<ConvexSegment>& segments() const { return segs_; }
    std::vector<ConvexSegment>& segments() { return segs_; }
    const Polytope& domain() const { return domain_; }

    // min over segments of max over pieces; throws DomainViolationError for
    // points outside the domain (up to a diameter-scaled tolerance)
    double evaluate(const Vec& x) const;

    // lexicographically first (segment, piece) attaining the min-max
    std::pair<int, int> active_segment(const Vec& x) const;

    void refresh_subregions();

  private:
    std::vector<ConvexSegment> segs_;
    Polytope domain_;
    double tol_ = 1e-8;
};

struct ValidationReport {
    bool valid = false;
    double max_jump = 0.0;
    int coverage_gap_count = 0;
    std::optional<Vec> first_gap_point;
    double tol = 1e-6;
};

// Checks that segment regions cover the domain and that adjacent segments
// agree along shared boundaries, so the min-max never undercuts a region's
// own value.
ValidationReport validate(const MmpsFunction& f, int boundary_samples = 100);

nlohmann::json to_json(const MmpsFunction& f);
MmpsFunction mmps_from_json(const nlohmann::json& j);

}  // namespace pwa
