#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "pwa/linalg.hpp"

namespace pwa {

// Closed halfspace { x : normal . x <= offset }. Polytope construction
// rescales rows to unit normals so containment tolerances are geometric.
struct Halfspace {
    Vec normal;
    double offset = 0.0;
};

class Polytope {
  public:
    Polytope() = default;
    Polytope(int dim, std::vector<Halfspace> hs);

    static Polytope box(const Vec& lo, const Vec& hi);
    static Polytope interval(double lo, double hi);

    int dim() const { return dim_; }
    const std::vector<Halfspace>& halfspaces() const { return hs_; }

    bool contains(const Vec& x, double tol = 1e-8) const;
    bool is_feasible() const;
    bool bounded() const;

    // Vertex set and diameter require a nonempty bounded region; they throw
    // EmptyRegionError / UnboundedRegionError otherwise. Results are cached.
    const std::vector<Vec>& vertices() const;
    double diameter() const;

    Polytope intersected(const std::vector<Halfspace>& extra) const;

    // 1-D only: the region as [lo, hi], infinities when unbounded.
    std::pair<double, double> interval_bounds() const;

  private:
    int dim_ = 0;
    std::vector<Halfspace> hs_;
    bool contradictory_ = false;
    mutable std::optional<bool> feasible_;
    mutable std::optional<std::vector<Vec>> verts_;
    mutable std::optional<double> diam_;
};

bool intersects(const Polytope& a, const Polytope& b);

// Uniform Dirichlet mixture of the vertices: a deterministic interior-biased
// sampler that works for lower-dimensional (degenerate) regions too.
Vec random_point(const Polytope& poly, std::mt19937_64& rng);

std::pair<Vec, Vec> bounding_box(const Polytope& poly);

}  // namespace pwa
