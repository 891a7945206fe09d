#include "pwa/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace pwa {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kSafePivot = 1e-7;  // preferred minimum pivot magnitude under Bland
constexpr double kFeasTol = 1e-9;    // Harris ratio-test window on basic values
constexpr int kMaxIters = 200000;
constexpr int kStallLimit = 500;
constexpr int kBlandBurst = 2000;

// Tableau for the dual problem  min f.y  s.t.  M y = g,  y >= 0,
// with M = A^T (rows = primal variables, cols = primal constraints).
struct Tableau {
    int rows = 0;        // active equation count
    int cols = 0;        // real columns
    int width = 0;       // cols + artificials + rhs
    std::vector<double> t;  // (rows + 1) x width, last row = cost row
    std::vector<int> basis;  // column index per row; >= cols means artificial

    double& at(int r, int c) { return t[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return t[static_cast<std::size_t>(r) * width + c]; }

    void pivot(int pr, int pc) {
        const double pv = at(pr, pc);
        const double inv = 1.0 / pv;
        for (int c = 0; c < width; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (int r = 0; r <= rows; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c < width; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis[pr] = pc;
    }
};

// returns false on iteration blowup, true when cost row has no negative
// reduced cost (optimal) or sets *unbounded
bool run_simplex(Tableau& tb, int usable_cols, bool* unbounded) {
    *unbounded = false;
    int iter = 0;
    int stall = 0;
    int bland_left = 0;  // Bland runs in bounded bursts, then Dantzig resumes
    double last_obj = tb.at(tb.rows, tb.width - 1);
    while (iter++ < kMaxIters) {
        const bool bland = bland_left > 0;
        int enter = -1;
        if (!bland) {
            double best = -kReducedCostTol;
            for (int j = 0; j < usable_cols; ++j) {
                const double d = tb.at(tb.rows, j);
                if (d < best) {
                    best = d;
                    enter = j;
                }
            }
        } else {
            for (int j = 0; j < usable_cols; ++j) {
                if (tb.at(tb.rows, j) < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
        }
        if (enter < 0) return true;

        int leave = -1;
        if (!bland) {
            // Harris-style two-pass ratio test: find the tolerance-relaxed
            // minimum ratio, then take the numerically largest pivot inside
            // the window; big pivots keep degenerate plateaus from turning
            // into rounding-noise cycles.
            double theta = std::numeric_limits<double>::infinity();
            for (int r = 0; r < tb.rows; ++r) {
                const double a = tb.at(r, enter);
                if (a > kPivotTol)
                    theta = std::min(theta, (tb.at(r, tb.width - 1) + kFeasTol) / a);
            }
            if (std::isfinite(theta)) {
                double best_a = 0.0;
                for (int r = 0; r < tb.rows; ++r) {
                    const double a = tb.at(r, enter);
                    if (a > kPivotTol && tb.at(r, tb.width - 1) / a <= theta &&
                        (a > best_a ||
                         (a == best_a && (leave < 0 || tb.basis[r] < tb.basis[leave])))) {
                        best_a = a;
                        leave = r;
                    }
                }
            }
        } else {
            // lowest-index rule, but refuse rounding-hostile tiny pivots
            // unless no acceptably sized row exists
            for (double floor_a : {kSafePivot, kPivotTol}) {
                double best_ratio = std::numeric_limits<double>::infinity();
                for (int r = 0; r < tb.rows; ++r) {
                    const double a = tb.at(r, enter);
                    if (a > floor_a) {
                        const double ratio = tb.at(r, tb.width - 1) / a;
                        if (ratio < best_ratio - 1e-15 ||
                            (ratio < best_ratio + 1e-15 &&
                             (leave < 0 || tb.basis[r] < tb.basis[leave]))) {
                            best_ratio = ratio;
                            leave = r;
                        }
                    }
                }
                if (leave >= 0) break;
            }
        }
        if (leave < 0) {
            *unbounded = true;
            return true;
        }
        tb.pivot(leave, enter);

        // cost-row rhs stores -objective, so progress means it increases
        const double obj = tb.at(tb.rows, tb.width - 1);
        if (obj > last_obj + 1e-13) {
            stall = 0;
            bland_left = 0;  // plateau escaped, Dantzig takes over again
            last_obj = obj;
        } else if (bland) {
            if (--bland_left == 0) {
                stall = 0;
                last_obj = obj;  // measure progress from wherever Bland left us
            }
        } else if (++stall > kStallLimit) {
            bland_left = kBlandBurst;
            stall = 0;
        }
    }
    return false;
}

}  // namespace

LpResult solve_lp(const LpProblem& p) {
    const int n = p.nvars;
    LpResult res;

    // fold equalities into inequality rows
    std::vector<const Vec*> rows;
    Vec rhs;
    std::vector<char> negate;
    rows.reserve(p.A.size() + 2 * p.Aeq.size());
    for (std::size_t i = 0; i < p.A.size(); ++i) {
        rows.push_back(&p.A[i]);
        rhs.push_back(p.b[i]);
        negate.push_back(0);
    }
    for (std::size_t i = 0; i < p.Aeq.size(); ++i) {
        rows.push_back(&p.Aeq[i]);
        rhs.push_back(p.beq[i]);
        negate.push_back(0);
        rows.push_back(&p.Aeq[i]);
        rhs.push_back(-p.beq[i]);
        negate.push_back(1);
    }
    const int m = static_cast<int>(rows.size());

    if (m == 0) {
        bool zero = true;
        for (double v : p.c)
            if (v != 0.0) zero = false;
        res.status = zero ? LpStatus::Optimal : LpStatus::Unbounded;
        res.x.assign(n, 0.0);
        return res;
    }

    // dual equations M y = g with M = A^T (n x m), g = -c, costs f = rhs
    std::vector<double> M(static_cast<std::size_t>(n) * m);
    for (int j = 0; j < m; ++j) {
        const Vec& a = *rows[j];
        const double s = negate[j] ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) M[static_cast<std::size_t>(i) * m + j] = s * a[i];
    }
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = -p.c[i];

    // equilibrate rows, remember scales for multiplier recovery
    Vec rscale(n, 1.0);
    for (int i = 0; i < n; ++i) {
        double mx = std::fabs(g[i]);
        for (int j = 0; j < m; ++j) mx = std::max(mx, std::fabs(M[static_cast<std::size_t>(i) * m + j]));
        if (mx > 0) {
            rscale[i] = 1.0 / mx;
            for (int j = 0; j < m; ++j) M[static_cast<std::size_t>(i) * m + j] *= rscale[i];
            g[i] *= rscale[i];
        }
    }
    Vec cscale(m, 1.0);
    Vec f(m);
    for (int j = 0; j < m; ++j) {
        double mx = 0;
        for (int i = 0; i < n; ++i) mx = std::max(mx, std::fabs(M[static_cast<std::size_t>(i) * m + j]));
        if (mx > 0) cscale[j] = 1.0 / mx;
        f[j] = rhs[j] * cscale[j];
    }

    Tableau tb;
    tb.rows = n;
    tb.cols = m;
    tb.width = m + n + 1;
    tb.t.assign(static_cast<std::size_t>(n + 1) * tb.width, 0.0);
    tb.basis.assign(n, 0);

    for (int i = 0; i < n; ++i) {
        const double sign = (g[i] < 0) ? -1.0 : 1.0;
        for (int j = 0; j < m; ++j)
            tb.at(i, j) = sign * M[static_cast<std::size_t>(i) * m + j] * cscale[j];
        tb.at(i, m + i) = 1.0;
        tb.at(i, tb.width - 1) = sign * g[i];
        tb.basis[i] = m + i;
    }
    // phase-1 cost row: minimize sum of artificials
    for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += tb.at(i, j);
        tb.at(n, j) = -s;
    }
    double art_sum = 0;
    for (int i = 0; i < n; ++i) art_sum += tb.at(i, tb.width - 1);
    tb.at(n, tb.width - 1) = -art_sum;

    bool unbounded = false;
    if (!run_simplex(tb, m, &unbounded)) {
        res.status = LpStatus::Stalled;
        return res;
    }
    const double phase1 = -tb.at(n, tb.width - 1);
    double gscale = 1.0;
    for (int i = 0; i < n; ++i) gscale = std::max(gscale, std::fabs(g[i]));
    if (phase1 > 1e-7 * gscale) {
        // dual infeasible: primal unbounded (or infeasible with c = 0 ruled
        // out by callers)
        res.status = LpStatus::Unbounded;
        return res;
    }

    // drive artificials out of the basis; a row with no real pivot is a
    // redundant equation and is dropped
    std::vector<int> eqid(n);
    for (int i = 0; i < n; ++i) eqid[i] = i;
    std::vector<int> keep;
    for (int r = 0; r < tb.rows; ++r) {
        if (tb.basis[r] < m) {
            keep.push_back(r);
            continue;
        }
        int pc = -1;
        for (int j = 0; j < m; ++j) {
            if (std::fabs(tb.at(r, j)) > 1e-9) {
                pc = j;
                break;
            }
        }
        if (pc >= 0) {
            tb.pivot(r, pc);
            keep.push_back(r);
        }
    }
    if (static_cast<int>(keep.size()) < tb.rows) {
        Tableau nt;
        nt.rows = static_cast<int>(keep.size());
        nt.cols = m;
        nt.width = tb.width;
        nt.t.assign(static_cast<std::size_t>(nt.rows + 1) * nt.width, 0.0);
        nt.basis.resize(nt.rows);
        std::vector<int> nid(nt.rows);
        for (int r = 0; r < nt.rows; ++r) {
            for (int c = 0; c < nt.width; ++c) nt.at(r, c) = tb.at(keep[r], c);
            nt.basis[r] = tb.basis[keep[r]];
            nid[r] = eqid[keep[r]];
        }
        tb = std::move(nt);
        eqid = std::move(nid);
    }

    // phase-2 cost row from scratch
    for (int j = 0; j < m; ++j) {
        double d = f[j];
        for (int r = 0; r < tb.rows; ++r) d -= f[tb.basis[r]] * tb.at(r, j);
        tb.at(tb.rows, j) = d;
    }
    for (int j = m; j < tb.width - 1; ++j) tb.at(tb.rows, j) = 1e30;  // block artificials
    double obj = 0;
    for (int r = 0; r < tb.rows; ++r) obj += f[tb.basis[r]] * tb.at(r, tb.width - 1);
    tb.at(tb.rows, tb.width - 1) = -obj;

    if (!run_simplex(tb, m, &unbounded)) {
        res.status = LpStatus::Stalled;
        return res;
    }
    if (unbounded) {
        res.status = LpStatus::Infeasible;
        return res;
    }

    // primal recovery: multipliers of the dual equations, B^T pi = f_B;
    // multipliers of dropped (redundant) equations default to zero and the
    // feasibility audit below rejects the rare case where that is not valid
    const int nr = tb.rows;
    std::vector<Vec> Bt(nr, Vec(nr, 0.0));
    Vec fb(nr);
    for (int r = 0; r < nr; ++r) {
        const int j = tb.basis[r];
        fb[r] = f[j];
        for (int i = 0; i < nr; ++i)
            Bt[r][i] = M[static_cast<std::size_t>(eqid[i]) * m + j] * cscale[j];
    }
    Vec pi;
    if (!solve_linear(Bt, fb, pi)) {
        res.status = LpStatus::Stalled;
        return res;
    }
    res.x.assign(n, 0.0);
    for (int i = 0; i < nr; ++i) res.x[eqid[i]] = pi[i] * rscale[eqid[i]];

    // feasibility audit of the recovered point
    double scale = 1.0;
    for (int j = 0; j < m; ++j) scale = std::max(scale, std::fabs(rhs[j]));
    double viol = 0;
    for (std::size_t i = 0; i < p.A.size(); ++i)
        viol = std::max(viol, dot(p.A[i], res.x) - p.b[i]);
    for (std::size_t i = 0; i < p.Aeq.size(); ++i)
        viol = std::max(viol, std::fabs(dot(p.Aeq[i], res.x) - p.beq[i]));
    if (viol > 1e-5 * scale) {
        res.status = LpStatus::Stalled;
        return res;
    }

    res.status = LpStatus::Optimal;
    res.objective = dot(p.c, res.x);
    return res;
}

bool lp_feasible(const std::vector<Vec>& A, const Vec& b, int nvars) {
    // min s  s.t.  A x - s <= b; feasible iff min s <= tol
    LpProblem q;
    q.nvars = nvars + 1;
    q.A.reserve(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        Vec row(nvars + 1);
        double nrm = norm2(A[i]);
        if (nrm < 1e-14) {
            // degenerate 0.x <= b row
            if (b[i] < -1e-12) return false;
            continue;
        }
        for (int k = 0; k < nvars; ++k) row[k] = A[i][k] / nrm;
        row[nvars] = -1.0;
        q.A.push_back(std::move(row));
        q.b.push_back(b[i] / nrm);
    }
    if (q.A.empty()) return true;
    q.c.assign(nvars + 1, 0.0);
    q.c[nvars] = 1.0;
    LpResult r = solve_lp(q);
    if (r.status == LpStatus::Unbounded) return true;
    if (r.status != LpStatus::Optimal) return false;
    return r.objective <= 1e-8;
}

}  // namespace pwa
