#pragma once

#include <vector>

#include "pwa/linalg.hpp"

namespace pwa {

// min c.x  subject to  A x <= b,  Aeq x = beq,  x free
struct LpProblem {
    int nvars = 0;
    std::vector<Vec> A;
    Vec b;
    std::vector<Vec> Aeq;
    Vec beq;
    Vec c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

struct LpResult {
    LpStatus status = LpStatus::Stalled;
    double objective = 0.0;
    Vec x;
};

// Dense two-phase simplex on the dual of the row-form problem. The primal has
// few variables and many rows in every use here, so the dual tableau stays
// small. Deterministic pivoting: Dantzig with lowest-index ties, Bland after a
// degeneracy stall.
LpResult solve_lp(const LpProblem& p);

// true iff {x : A x <= b} admits a point; closed regions, tolerance 1e-8 in
// row-normalized units (touching counts)
bool lp_feasible(const std::vector<Vec>& A, const Vec& b, int nvars);

}  // namespace pwa
