#include "pwa/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pwa/errors.hpp"
#include "pwa/lp.hpp"

namespace pwa {
namespace {

constexpr double kSep = 1e-6;     // minimum slope gap between adjacent cells
constexpr double kDeadB = -1e18;  // offset parking a piece below all data
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + step * i;
    v.back() = hi;
    return v;
}

double eval_field(const ScalarField& F, const Vec& x) {
    const double y = F(x);
    if (!std::isfinite(y)) throw EvaluationError("objective returned a non-finite value", x);
    return y;
}

// ---- elementary affine fits ----

struct Affine1 {
    double a = 0.0, b = 0.0;
};

// Chebyshev fit: min t s.t. |a x_i + b - y_i| <= t.
Affine1 cheb_affine_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    LpProblem p;
    p.nvars = 3;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        p.A.push_back({xs[i], 1.0, -1.0});
        p.b.push_back(ys[i]);
        p.A.push_back({-xs[i], -1.0, -1.0});
        p.b.push_back(-ys[i]);
    }
    p.A.push_back({0.0, 0.0, -1.0});
    p.b.push_back(0.0);
    p.c = {0.0, 0.0, 1.0};
    const LpResult r = solve_lp(p);
    if (r.status != LpStatus::Optimal) return {0.0, kDeadB};
    return {r.x[0], r.x[1]};
}

// Least-absolute-deviations fit: min sum e_i s.t. |a x_i + b - y_i| <= e_i.
Affine1 l1_affine_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int m = static_cast<int>(xs.size());
    LpProblem p;
    p.nvars = 2 + m;
    p.c.assign(static_cast<std::size_t>(p.nvars), 1.0);
    p.c[0] = p.c[1] = 0.0;
    for (int i = 0; i < m; ++i) {
        Vec row(static_cast<std::size_t>(p.nvars), 0.0);
        row[0] = xs[static_cast<std::size_t>(i)];
        row[1] = 1.0;
        row[static_cast<std::size_t>(2 + i)] = -1.0;
        p.A.push_back(row);
        p.b.push_back(ys[static_cast<std::size_t>(i)]);
        for (double& c : row) c = -c;
        row[static_cast<std::size_t>(2 + i)] = -1.0;
        p.A.push_back(row);
        p.b.push_back(-ys[static_cast<std::size_t>(i)]);
    }
    const LpResult r = solve_lp(p);
    if (r.status != LpStatus::Optimal) return {0.0, kDeadB};
    return {r.x[0], r.x[1]};
}

Affine1 affine_1d(const std::vector<double>& xs, const std::vector<double>& ys, FitObjective obj) {
    return obj == FitObjective::L1 ? l1_affine_1d(xs, ys) : cheb_affine_1d(xs, ys);
}

// n-D Chebyshev fit; vars (a_1..a_n, b, t).
std::pair<Vec, double> cheb_affine_nd(const std::vector<const Vec*>& pts,
                                      const std::vector<double>& ys) {
    const int n = static_cast<int>(pts.front()->size());
    LpProblem p;
    p.nvars = n + 2;
    p.c.assign(static_cast<std::size_t>(p.nvars), 0.0);
    p.c.back() = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vec row(static_cast<std::size_t>(p.nvars), 0.0);
        for (int d = 0; d < n; ++d) row[static_cast<std::size_t>(d)] = (*pts[i])[static_cast<std::size_t>(d)];
        row[static_cast<std::size_t>(n)] = 1.0;
        row.back() = -1.0;
        p.A.push_back(row);
        p.b.push_back(ys[i]);
        for (int d = 0; d <= n; ++d) row[static_cast<std::size_t>(d)] = -row[static_cast<std::size_t>(d)];
        p.A.push_back(row);
        p.b.push_back(-ys[i]);
    }
    Vec tb(static_cast<std::size_t>(p.nvars), 0.0);
    tb.back() = -1.0;
    p.A.push_back(tb);
    p.b.push_back(0.0);
    const LpResult r = solve_lp(p);
    Vec a(static_cast<std::size_t>(n), 0.0);
    if (r.status != LpStatus::Optimal) return {a, kDeadB};
    for (int d = 0; d < n; ++d) a[static_cast<std::size_t>(d)] = r.x[static_cast<std::size_t>(d)];
    return {a, r.x[static_cast<std::size_t>(n)]};
}

// ---- alternating max-affine fit, 1-D ----

int cell_of(const std::vector<double>& edges, double x) {
    const int k = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(edges.size()) - 2);
}

struct MaxAffine1 {
    std::vector<double> a, b;
    double resid = kInf;      // sup-norm residual
    double selection = kInf;  // objective-dependent selection key
};

MaxAffine1 fit_once_1d(const std::vector<double>& xs, const std::vector<double>& ys, int Q,
                       const std::vector<double>& edges, const FitConfig& cfg) {
    const std::size_t n = xs.size();
    std::vector<int> assign(n);
    for (std::size_t i = 0; i < n; ++i) assign[i] = cell_of(edges, xs[i]);
    std::vector<double> a(static_cast<std::size_t>(Q), 0.0), b(static_cast<std::size_t>(Q), kDeadB);
    MaxAffine1 best;
    std::vector<double> err(n), cx, cy;
    std::vector<std::size_t> order(n);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (it > 0)
            for (std::size_t i = 0; i < n; ++i) {
                double m = -kInf;
                for (int q = 0; q < Q; ++q) m = std::max(m, a[static_cast<std::size_t>(q)] * xs[i] + b[static_cast<std::size_t>(q)]);
                err[i] = std::abs(m - ys[i]);
            }
        for (int q = 0; q < Q; ++q) {
            cx.clear();
            cy.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == q) {
                    cx.push_back(xs[i]);
                    cy.push_back(ys[i]);
                }
            if (cx.size() >= 2) {
                const Affine1 f = affine_1d(cx, cy, cfg.objective);
                a[static_cast<std::size_t>(q)] = f.a;
                b[static_cast<std::size_t>(q)] = f.b;
            } else if (cfg.reseed_dead && it > 0) {
                // revive at the 5 samples nearest the worst-fit point
                const std::size_t k = static_cast<std::size_t>(
                    std::max_element(err.begin(), err.end()) - err.begin());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
                    const double du = std::abs(xs[u] - xs[k]), dv = std::abs(xs[v] - xs[k]);
                    return du != dv ? du < dv : u < v;
                });
                cx.clear();
                cy.clear();
                for (std::size_t j = 0; j < std::min<std::size_t>(5, n); ++j) {
                    cx.push_back(xs[order[j]]);
                    cy.push_back(ys[order[j]]);
                }
                const Affine1 f = affine_1d(cx, cy, cfg.objective);
                a[static_cast<std::size_t>(q)] = f.a;
                b[static_cast<std::size_t>(q)] = f.b;
            } else {
                a[static_cast<std::size_t>(q)] = 0.0;
                b[static_cast<std::size_t>(q)] = kDeadB;
            }
        }
        double resid = 0.0, asum = 0.0;
        bool fixpoint = true;
        for (std::size_t i = 0; i < n; ++i) {
            double m = -kInf;
            int arg = 0;
            for (int q = 0; q < Q; ++q) {
                const double v = a[static_cast<std::size_t>(q)] * xs[i] + b[static_cast<std::size_t>(q)];
                if (v > m) {
                    m = v;
                    arg = q;
                }
            }
            const double e = std::abs(m - ys[i]);
            resid = std::max(resid, e);
            asum += e;
            if (arg != assign[i]) {
                fixpoint = false;
                assign[i] = arg;
            }
        }
        const double key = cfg.objective == FitObjective::L1 ? asum / static_cast<double>(n) : resid;
        if (key < best.selection) best = {a, b, resid, key};
        if (fixpoint) break;
    }
    return best;
}

// Activation intervals of the live pieces, widths above 1e-9, as sorted
// breakpoint edges [lo, ..., hi].
std::vector<double> realized_edges_1d(const std::vector<double>& a, const std::vector<double>& b,
                                      double lo, double hi) {
    std::vector<double> al, bl;
    for (std::size_t q = 0; q < a.size(); ++q)
        if (b[q] > -1e17) {
            al.push_back(a[q]);
            bl.push_back(b[q]);
        }
    std::vector<std::pair<double, double>> ivs;
    for (std::size_t q = 0; q < al.size(); ++q) {
        double l = lo, h = hi;
        for (std::size_t r = 0; r < al.size(); ++r) {
            if (r == q) continue;
            const double da = al[r] - al[q], db = bl[q] - bl[r];
            if (std::abs(da) < 1e-14) {
                if (db < -1e-12) h = l - 1.0;
                continue;
            }
            const double t = db / da;
            if (da > 0) h = std::min(h, t);
            else l = std::max(l, t);
        }
        if (h - l > 1e-9) ivs.emplace_back(l, h);
    }
    std::sort(ivs.begin(), ivs.end());
    std::vector<double> edges{lo};
    for (std::size_t i = 0; i + 1 < ivs.size(); ++i)
        if (ivs[i].second - edges.back() > 1e-9) edges.push_back(ivs[i].second);
    edges.push_back(hi);
    return edges;
}

// ---- two-phase partition LP engine ----

struct CellSample {
    double x, y;
    int cell;
};

struct EngineFit {
    std::vector<double> a, b;
    double tstar = 0.0, sstar = 0.0;
    bool ok = false;
};

// Continuous piecewise-affine fit on fixed cells with ascending slopes.
// Phase 1 finds the best residual t*; phase 2 maximizes the worst boosted
// half slope gap s subject to t <= t*(1+slack); phase 2c re-solves with the
// gaps pinned at s*, minimizing the total slope range so the returned vertex
// is unique in practice.
EngineFit partition_engine(const std::vector<double>& edges, const std::vector<CellSample>& rows,
                           const std::vector<int>& gap_set, double cap, double slack) {
    const int K = static_cast<int>(edges.size()) - 1;
    const int nv = 2 * K + 1;  // a_0..a_{K-1}, b_0..b_{K-1}, t
    EngineFit out;
    if (K < 1 || rows.empty()) return out;

    std::vector<Vec> A;
    Vec rhs;
    A.reserve(2 * rows.size() + static_cast<std::size_t>(2 * K));
    for (const CellSample& s : rows) {
        Vec r(static_cast<std::size_t>(nv), 0.0);
        r[static_cast<std::size_t>(s.cell)] = s.x;
        r[static_cast<std::size_t>(K + s.cell)] = 1.0;
        r.back() = -1.0;
        A.push_back(r);
        rhs.push_back(s.y);
        r[static_cast<std::size_t>(s.cell)] = -s.x;
        r[static_cast<std::size_t>(K + s.cell)] = -1.0;
        A.push_back(std::move(r));
        rhs.push_back(-s.y);
    }
    for (int k = 0; k + 1 < K; ++k) {  // a_k <= a_{k+1} - sep
        Vec r(static_cast<std::size_t>(nv), 0.0);
        r[static_cast<std::size_t>(k)] = 1.0;
        r[static_cast<std::size_t>(k + 1)] = -1.0;
        A.push_back(std::move(r));
        rhs.push_back(-kSep);
    }
    std::vector<Vec> Aeq;
    Vec beq;
    for (int k = 0; k + 1 < K; ++k) {  // continuity at interior edges
        Vec r(static_cast<std::size_t>(nv), 0.0);
        const double e = edges[static_cast<std::size_t>(k + 1)];
        r[static_cast<std::size_t>(k)] = e;
        r[static_cast<std::size_t>(K + k)] = 1.0;
        r[static_cast<std::size_t>(k + 1)] = -e;
        r[static_cast<std::size_t>(K + k + 1)] = -1.0;
        Aeq.push_back(std::move(r));
        beq.push_back(0.0);
    }

    LpProblem p1;
    p1.nvars = nv;
    p1.A = A;
    p1.b = rhs;
    p1.Aeq = Aeq;
    p1.beq = beq;
    p1.c.assign(static_cast<std::size_t>(nv), 0.0);
    p1.c.back() = 1.0;
    const LpResult r1 = solve_lp(p1);
    if (r1.status != LpStatus::Optimal) return out;
    out.tstar = r1.x.back();
    out.a.assign(r1.x.begin(), r1.x.begin() + K);
    out.b.assign(r1.x.begin() + K, r1.x.begin() + 2 * K);
    out.ok = true;
    if (gap_set.empty()) return out;

    const double budget = out.tstar * (1.0 + slack);

    // phase 2: max s with s below every boosted half gap
    LpProblem p2;
    p2.nvars = nv + 1;
    for (std::size_t i = 0; i < A.size(); ++i) {
        Vec r = A[i];
        r.push_back(0.0);
        p2.A.push_back(std::move(r));
        p2.b.push_back(rhs[i]);
    }
    for (int j : gap_set) {  // 0.5 a_j - 0.5 a_{j+1} + s <= 0
        Vec r(static_cast<std::size_t>(nv + 1), 0.0);
        r[static_cast<std::size_t>(j)] = 0.5;
        r[static_cast<std::size_t>(j + 1)] = -0.5;
        r.back() = 1.0;
        p2.A.push_back(std::move(r));
        p2.b.push_back(0.0);
    }
    {
        Vec r(static_cast<std::size_t>(nv + 1), 0.0);  // t <= budget
        r[static_cast<std::size_t>(nv - 1)] = 1.0;
        p2.A.push_back(std::move(r));
        p2.b.push_back(budget);
        Vec r2(static_cast<std::size_t>(nv + 1), 0.0);  // s >= 0
        r2.back() = -1.0;
        p2.A.push_back(std::move(r2));
        p2.b.push_back(0.0);
        if (std::isfinite(cap)) {
            Vec r3(static_cast<std::size_t>(nv + 1), 0.0);  // s <= cap
            r3.back() = 1.0;
            p2.A.push_back(std::move(r3));
            p2.b.push_back(cap);
        }
    }
    for (std::size_t i = 0; i < Aeq.size(); ++i) {
        Vec r = Aeq[i];
        r.push_back(0.0);
        p2.Aeq.push_back(std::move(r));
        p2.beq.push_back(beq[i]);
    }
    p2.c.assign(static_cast<std::size_t>(nv + 1), 0.0);
    p2.c.back() = -1.0;
    const LpResult r2 = solve_lp(p2);
    if (r2.status != LpStatus::Optimal) return out;  // keep the phase-1 fit
    out.sstar = r2.x.back();

    // phase 2c: pin the boosted gaps at s*, minimize the slope range
    LpProblem p3;
    p3.nvars = nv;
    p3.A = A;
    p3.b = rhs;
    for (int j : gap_set) {
        Vec r(static_cast<std::size_t>(nv), 0.0);
        r[static_cast<std::size_t>(j)] = 0.5;
        r[static_cast<std::size_t>(j + 1)] = -0.5;
        p3.A.push_back(std::move(r));
        p3.b.push_back(-out.sstar);
    }
    {
        Vec r(static_cast<std::size_t>(nv), 0.0);
        r[static_cast<std::size_t>(nv - 1)] = 1.0;
        p3.A.push_back(std::move(r));
        p3.b.push_back(budget);
    }
    p3.Aeq = Aeq;
    p3.beq = beq;
    p3.c.assign(static_cast<std::size_t>(nv), 0.0);
    p3.c[static_cast<std::size_t>(K - 1)] = 1.0;
    p3.c[0] -= 1.0;
    const LpResult r3 = solve_lp(p3);
    if (r3.status != LpStatus::Optimal) return out;
    out.a.assign(r3.x.begin(), r3.x.begin() + K);
    out.b.assign(r3.x.begin() + K, r3.x.begin() + 2 * K);
    return out;
}

std::vector<int> all_gaps(int K) {
    std::vector<int> g;
    for (int j = 0; j + 1 < K; ++j) g.push_back(j);
    return g;
}

ConvexSegment make_segment(const std::vector<double>& a, const std::vector<double>& b,
                           Polytope region) {
    ConvexSegment seg;
    for (std::size_t q = 0; q < a.size(); ++q) seg.pieces.push_back({{a[q]}, b[q]});
    seg.region = std::move(region);
    seg.subregions = compute_subregions(seg);
    return seg;
}

// ---- 1-D fit driver: chained restarts + optional polish ----

struct Sorted1d {
    std::vector<double> xs, ys;
    double lo = 0.0, hi = 0.0;
};

Sorted1d sorted_samples_1d(const SampleSet& samples) {
    std::vector<std::size_t> idx(samples.points.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t u, std::size_t v) {
        return samples.points[u].first[0] < samples.points[v].first[0];
    });
    Sorted1d s;
    for (std::size_t i : idx) {
        s.xs.push_back(samples.points[i].first[0]);
        s.ys.push_back(samples.points[i].second);
    }
    s.lo = s.xs.front();
    s.hi = s.xs.back();
    return s;
}

std::vector<double> arc_length_edges(const Sorted1d& s, int q) {
    std::vector<double> cum(s.xs.size(), 0.0);
    for (std::size_t i = 1; i < s.xs.size(); ++i)
        cum[i] = cum[i - 1] + std::abs(s.ys[i] - s.ys[i - 1]);
    std::vector<double> edges(static_cast<std::size_t>(q + 1));
    for (int j = 0; j <= q; ++j) {
        const double target = cum.back() * static_cast<double>(j) / static_cast<double>(q);
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        if (it == cum.begin()) {
            edges[static_cast<std::size_t>(j)] = s.xs.front();
        } else if (it == cum.end()) {
            edges[static_cast<std::size_t>(j)] = s.xs.back();
        } else {
            const std::size_t i = static_cast<std::size_t>(it - cum.begin());
            const double span = cum[i] - cum[i - 1];
            const double w = span > 0 ? (target - cum[i - 1]) / span : 0.0;
            edges[static_cast<std::size_t>(j)] = s.xs[i - 1] + w * (s.xs[i] - s.xs[i - 1]);
        }
    }
    edges.front() = s.lo;
    edges.back() = s.hi;
    std::sort(edges.begin(), edges.end());
    return edges;
}

MaxAffine1 fit_best_1d(const Sorted1d& s, int pieces, const FitConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    MaxAffine1 prev;
    // Chain piece counts upward; carrying the previous winner (with a
    // duplicated piece) makes the residual non-increasing in the count.
    for (int q = std::min(2, pieces); q <= pieces; ++q) {
        std::vector<std::vector<double>> candidates;
        if (static_cast<int>(cfg.warm_edges.size()) == q + 1) {
            std::vector<double> w = cfg.warm_edges;
            std::sort(w.begin(), w.end());
            candidates.push_back(std::move(w));
        }
        for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
            std::vector<double> edges;
            if (r == 1) {
                edges = arc_length_edges(s, q);
            } else {
                edges = linspace(s.lo, s.hi, q + 1);
                if (r >= 2) {
                    const double amp = (s.hi - s.lo) / static_cast<double>(q) * 0.35;
                    for (std::size_t j = 1; j + 1 < edges.size(); ++j) edges[j] += amp * uni(rng);
                    std::sort(edges.begin(), edges.end());
                }
            }
            candidates.push_back(std::move(edges));
        }
        if (!prev.a.empty()) {  // previous breakpoints with the widest cell split
            std::vector<double> e = realized_edges_1d(prev.a, prev.b, s.lo, s.hi);
            while (static_cast<int>(e.size()) < q + 1) {
                std::size_t k = 0;
                double w = -kInf;
                for (std::size_t j = 0; j + 1 < e.size(); ++j)
                    if (e[j + 1] - e[j] > w) {
                        w = e[j + 1] - e[j];
                        k = j;
                    }
                e.insert(e.begin() + static_cast<std::ptrdiff_t>(k) + 1, 0.5 * (e[k] + e[k + 1]));
            }
            if (static_cast<int>(e.size()) == q + 1) candidates.push_back(std::move(e));
        }
        MaxAffine1 best;
        for (const std::vector<double>& edges : candidates) {
            MaxAffine1 m = fit_once_1d(s.xs, s.ys, q, edges, cfg);
            if (m.selection < best.selection) best = std::move(m);
        }
        if (!prev.a.empty() && prev.selection < best.selection) {
            best = prev;
            best.a.push_back(prev.a[0]);
            best.b.push_back(prev.b[0]);
        }
        prev = std::move(best);
    }
    return prev;
}

std::vector<CellSample> assign_rows(const Sorted1d& s, const std::vector<double>& edges) {
    const int K = static_cast<int>(edges.size()) - 1;
    std::vector<CellSample> rows;
    rows.reserve(s.xs.size());
    for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            if (cell_of(edges, s.xs[i]) == k) rows.push_back({s.xs[i], s.ys[i], k});
    return rows;
}

ConvexSegment fit_segment_1d(const SampleSet& samples, int pieces, const FitConfig& cfg) {
    const Sorted1d s = sorted_samples_1d(samples);
    MaxAffine1 best = fit_best_1d(s, pieces, cfg);
    if (cfg.polish && cfg.objective == FitObjective::Linf && pieces >= 2) {
        const std::vector<double> edges = realized_edges_1d(best.a, best.b, s.lo, s.hi);
        if (edges.size() >= 3) {
            const EngineFit ef = partition_engine(edges, assign_rows(s, edges),
                                                  all_gaps(static_cast<int>(edges.size()) - 1),
                                                  kInf, 0.03);
            if (ef.ok) return make_segment(ef.a, ef.b, samples.domain);
        }
    }
    return make_segment(best.a, best.b, samples.domain);
}

// ---- generic n-D alternating fit ----

ConvexSegment fit_segment_nd(const SampleSet& samples, int pieces, const FitConfig& cfg) {
    const std::size_t n = samples.points.size();
    const int dim = static_cast<int>(samples.points.front().first.size());
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::vector<Vec> best_a;
    std::vector<double> best_b;
    double best_resid = kInf;
    std::vector<int> assign(n, 0);
    std::vector<const Vec*> pts;
    std::vector<double> vals;
    for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
        // distinct random centers seed the assignment
        std::vector<std::size_t> centers;
        while (static_cast<int>(centers.size()) < pieces) {
            const std::size_t c = pick(rng);
            if (std::find(centers.begin(), centers.end(), c) == centers.end()) centers.push_back(c);
        }
        for (std::size_t i = 0; i < n; ++i) {
            int arg = 0;
            double bd = kInf;
            for (int q = 0; q < pieces; ++q) {
                const double d = dist(samples.points[i].first, samples.points[centers[static_cast<std::size_t>(q)]].first);
                if (d < bd) {
                    bd = d;
                    arg = q;
                }
            }
            assign[i] = arg;
        }
        std::vector<Vec> a(static_cast<std::size_t>(pieces), Vec(static_cast<std::size_t>(dim), 0.0));
        std::vector<double> b(static_cast<std::size_t>(pieces), kDeadB);
        double resid = kInf;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            for (int q = 0; q < pieces; ++q) {
                pts.clear();
                vals.clear();
                for (std::size_t i = 0; i < n; ++i)
                    if (assign[i] == q) {
                        pts.push_back(&samples.points[i].first);
                        vals.push_back(samples.points[i].second);
                    }
                if (static_cast<int>(pts.size()) >= dim + 1) {
                    auto [aq, bq] = cheb_affine_nd(pts, vals);
                    a[static_cast<std::size_t>(q)] = std::move(aq);
                    b[static_cast<std::size_t>(q)] = bq;
                } else {
                    a[static_cast<std::size_t>(q)].assign(static_cast<std::size_t>(dim), 0.0);
                    b[static_cast<std::size_t>(q)] = kDeadB;
                }
            }
            resid = 0.0;
            bool fixpoint = true;
            for (std::size_t i = 0; i < n; ++i) {
                double m = -kInf;
                int arg = 0;
                for (int q = 0; q < pieces; ++q) {
                    const double v = dot(a[static_cast<std::size_t>(q)], samples.points[i].first) + b[static_cast<std::size_t>(q)];
                    if (v > m) {
                        m = v;
                        arg = q;
                    }
                }
                resid = std::max(resid, std::abs(m - samples.points[i].second));
                if (arg != assign[i]) {
                    fixpoint = false;
                    assign[i] = arg;
                }
            }
            if (fixpoint) break;
        }
        if (resid < best_resid) {
            best_resid = resid;
            best_a = a;
            best_b = b;
        }
    }
    ConvexSegment seg;
    for (std::size_t q = 0; q < best_a.size(); ++q) seg.pieces.push_back({best_a[q], best_b[q]});
    seg.region = samples.domain;
    seg.subregions = compute_subregions(seg);
    return seg;
}

double polytope_scale(const Polytope& poly) {
    double scale = 1.0;
    for (const Halfspace& h : poly.halfspaces()) scale = std::max(scale, std::abs(h.offset));
    return scale;
}

}  // namespace

// ---- public operations ----

SampleSet sample(const ScalarField& F, const Polytope& domain, int resolution) {
    if (resolution < 2) throw InputError("sampling needs a resolution of at least 2");
    const auto [lo, hi] = bounding_box(domain);
    const int dim = domain.dim();
    const double ctol = 1e-9 * polytope_scale(domain);
    SampleSet out;
    out.domain = domain;
    out.resolution = resolution;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Vec x(static_cast<std::size_t>(dim), 0.0);
    while (true) {
        for (int d = 0; d < dim; ++d) {
            const double t = static_cast<double>(idx[static_cast<std::size_t>(d)]) / static_cast<double>(resolution - 1);
            x[static_cast<std::size_t>(d)] =
                idx[static_cast<std::size_t>(d)] == resolution - 1
                    ? hi[static_cast<std::size_t>(d)]
                    : lo[static_cast<std::size_t>(d)] + t * (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);
        }
        if (domain.contains(x, ctol)) out.points.emplace_back(x, eval_field(F, x));
        int d = dim - 1;
        for (; d >= 0; --d) {
            if (++idx[static_cast<std::size_t>(d)] < resolution) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d < 0) break;
    }
    if (out.points.empty()) throw EmptyRegionError("no grid point lies inside the domain");
    return out;
}

ConvexSegment fit_segment(const SampleSet& samples, int pieces, const FitConfig& config) {
    if (pieces < 1) throw InputError("piece count must be positive");
    if (samples.points.empty()) throw InsufficientDataError("empty sample set");
    const int dim = static_cast<int>(samples.points.front().first.size());
    if (static_cast<int>(samples.points.size()) < pieces * (dim + 1))
        throw InsufficientDataError("need at least pieces*(dim+1) samples");
    if (pieces == 1) {
        ConvexSegment seg;
        if (dim == 1) {
            const Sorted1d s = sorted_samples_1d(samples);
            const Affine1 f = affine_1d(s.xs, s.ys, config.objective);
            seg.pieces.push_back({{f.a}, f.b});
        } else {
            std::vector<const Vec*> pts;
            std::vector<double> vals;
            for (const auto& [x, y] : samples.points) {
                pts.push_back(&x);
                vals.push_back(y);
            }
            auto [a, b] = cheb_affine_nd(pts, vals);
            seg.pieces.push_back({std::move(a), b});
        }
        seg.region = samples.domain;
        seg.subregions = compute_subregions(seg);
        return seg;
    }
    return dim == 1 ? fit_segment_1d(samples, pieces, config)
                    : fit_segment_nd(samples, pieces, config);
}

DeltaEstimate estimate_delta(const ScalarField& F, const MmpsFunction& f, const Polytope& region,
                             int resolution, std::optional<double> lipschitz_L) {
    if (resolution < 2) throw InputError("delta estimation needs a resolution of at least 2");
    const auto [lo, hi] = bounding_box(region);
    const int dim = region.dim();
    const double ctol = 1e-9 * polytope_scale(region);
    DeltaEstimate out;
    out.resolution = resolution;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Vec x(static_cast<std::size_t>(dim), 0.0);
    bool any = false;
    while (true) {
        for (int d = 0; d < dim; ++d) {
            const double t = static_cast<double>(idx[static_cast<std::size_t>(d)]) / static_cast<double>(resolution - 1);
            x[static_cast<std::size_t>(d)] =
                idx[static_cast<std::size_t>(d)] == resolution - 1
                    ? hi[static_cast<std::size_t>(d)]
                    : lo[static_cast<std::size_t>(d)] + t * (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);
        }
        if (region.contains(x, ctol)) {
            any = true;
            const double e = std::abs(f.evaluate(x) - eval_field(F, x));
            if (e > out.delta) {
                out.delta = e;
                out.argmax_point = x;
            }
        }
        int d = dim - 1;
        for (; d >= 0; --d) {
            if (++idx[static_cast<std::size_t>(d)] < resolution) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d < 0) break;
    }
    if (!any) throw EmptyRegionError("no grid point lies inside the region");
    if (out.argmax_point.empty()) out.argmax_point = lo;
    if (lipschitz_L) {
        double s2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double s = (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]) / static_cast<double>(resolution - 1);
            s2 += s * s;
        }
        out.delta += *lipschitz_L * 0.5 * std::sqrt(s2);
    }
    return out;
}

std::pair<MmpsFunction, DeltaEstimate> fit_mmps(const ScalarField& F, const Polytope& domain,
                                                const FitConfig& config) {
    const int dim = domain.dim();

    if (dim >= 2) {
        if (!config.partition.empty() || config.target_segment_count > 1)
            throw InputError("multi-segment fits need a 1-D domain");
        if (config.objective != FitObjective::Linf)
            throw InputError("only the sup-norm objective is supported above 1-D");
        const int Q = config.pieces_per_segment;
        const std::vector<Vec> gens = cvt_generators(F, domain, Q, config.seed);
        const std::vector<Polytope> cells = voronoi_cells(gens, domain);
        ConvexSegment seg = cvt_constrained_fit(F, gens, cells, domain);
        MmpsFunction mm({std::move(seg)}, domain);
        DeltaEstimate de = estimate_delta(F, mm, domain, config.resolution);
        return {std::move(mm), std::move(de)};
    }

    const auto [dlo, dhi] = domain.interval_bounds();

    if (config.lock_equal_cells) {
        const int K = config.pieces_per_segment;
        const std::vector<double> edges = linspace(dlo, dhi, K + 1);
        const SampleSet ss = sample(F, domain, config.resolution);
        const Sorted1d s = sorted_samples_1d(ss);
        const EngineFit ef = partition_engine(edges, assign_rows(s, edges), all_gaps(K), kInf, 0.03);
        if (!ef.ok) throw InputError("equal-cell fit LP did not reach an optimum");
        MmpsFunction mm({make_segment(ef.a, ef.b, domain)}, domain);
        DeltaEstimate de;
        de.resolution = config.resolution;
        for (const auto& [x, y] : ss.points) {
            const double e = std::abs(mm.evaluate(x) - y);
            if (e > de.delta) {
                de.delta = e;
                de.argmax_point = x;
            }
        }
        if (de.argmax_point.empty()) de.argmax_point = {dlo};
        return {std::move(mm), std::move(de)};
    }

    std::vector<Polytope> regions = config.partition;
    if (regions.empty()) {
        const int R = std::max(1, config.target_segment_count);
        const std::vector<double> cuts = linspace(dlo, dhi, R + 1);
        for (int r = 0; r < R; ++r)
            regions.push_back(Polytope::interval(cuts[static_cast<std::size_t>(r)], cuts[static_cast<std::size_t>(r + 1)]));
    }
    const std::size_t R = regions.size();

    // regions must tile the interval left to right
    std::vector<std::pair<double, double>> bounds;
    for (const Polytope& r : regions) bounds.push_back(r.interval_bounds());
    std::vector<std::size_t> order(R);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return bounds[u].first < bounds[v].first; });
    const double jtol = 1e-9 * std::max(1.0, std::max(std::abs(dlo), std::abs(dhi)));
    for (std::size_t i = 0; i < R; ++i) {
        const auto& [l, u] = bounds[order[i]];
        const double wantl = i == 0 ? dlo : bounds[order[i - 1]].second;
        if (std::abs(l - wantl) > jtol || u <= l)
            throw InputError("partition regions must tile the domain without gaps or overlaps");
    }
    if (std::abs(bounds[order.back()].second - dhi) > jtol)
        throw InputError("partition regions must tile the domain without gaps or overlaps");

    std::vector<ConvexSegment> segs(R);
    std::vector<SampleSet> sets(R);
    for (std::size_t i = 0; i < R; ++i) {
        const std::size_t r = order[i];
        const int q = config.pieces_by_region.size() == R
                          ? config.pieces_by_region[r]
                          : config.pieces_per_segment;
        sets[i] = sample(F, regions[r], config.resolution);
        segs[i] = fit_segment(sets[i], q, config);
    }

    if (R > 1) {
        // agreed values at interior edges, then per-segment affine corrections
        std::vector<double> vl(R), vr(R);
        for (std::size_t i = 0; i < R; ++i) {
            vl[i] = segs[i].max_value({bounds[order[i]].first});
            vr[i] = segs[i].max_value({bounds[order[i]].second});
        }
        for (std::size_t i = 0; i + 1 < R; ++i) {
            const double v = 0.5 * (vr[i] + vl[i + 1]);
            vr[i] = v;
            vl[i + 1] = v;
        }
        double maxslope = 0.0, fmin = kInf, fmax = -kInf, minwidth = kInf;
        for (std::size_t i = 0; i < R; ++i) {
            const auto& [l, u] = bounds[order[i]];
            minwidth = std::min(minwidth, u - l);
            const double yl = segs[i].max_value({l}), yu = segs[i].max_value({u});
            const double alpha = ((vr[i] - yu) - (vl[i] - yl)) / (u - l);
            const double beta = (vl[i] - yl) - alpha * l;
            for (AffineMap& p : segs[i].pieces) {
                p.a[0] += alpha;
                p.b += beta;
                if (p.b > -1e17) maxslope = std::max(maxslope, std::abs(p.a[0]));
            }
            for (const auto& [x, y] : sets[i].points) {
                fmin = std::min(fmin, y);
                fmax = std::max(fmax, y);
            }
        }
        // steep hinge pieces pin each segment to the agreed edge values and
        // dominate it outside its own region, so the min never dips early
        const double wall = maxslope + (fmax - fmin) / minwidth + 1.0;
        for (std::size_t i = 0; i < R; ++i) {
            const auto& [l, u] = bounds[order[i]];
            segs[i].pieces.push_back({{-wall}, vl[i] + wall * l});
            segs[i].pieces.push_back({{wall}, vr[i] - wall * u});
            segs[i].subregions = compute_subregions(segs[i]);
        }
    }

    MmpsFunction mm(std::move(segs), domain);
    DeltaEstimate de;
    de.resolution = config.resolution;
    for (std::size_t i = 0; i < R; ++i)
        for (const auto& [x, y] : sets[i].points) {
            const double e = std::abs(mm.evaluate(x) - y);
            if (e > de.delta) {
                de.delta = e;
                de.argmax_point = x;
            }
        }
    if (de.argmax_point.empty()) de.argmax_point = {dlo};
    return {std::move(mm), std::move(de)};
}

std::pair<MmpsFunction, SensitivityReport> refine_to_radius(const ScalarField& F,
                                                            const Polytope& domain,
                                                            double target_chi,
                                                            const FitConfig& config) {
    if (domain.dim() != 1) throw InputError("refinement to a radius target supports 1-D domains");
    if (!(target_chi > 0)) throw InputError("the radius target must be positive");
    (void)config;
    const auto [lo, hi] = domain.interval_bounds();
    const double diam = hi - lo;
    const double budget = target_chi * 2.0 / 3.0;

    std::vector<double> edges =
        linspace(lo, hi, static_cast<int>(std::ceil(diam / budget)) + 1);
    const int mres = 40001;
    const std::vector<double> mg = linspace(lo, hi, mres);
    std::vector<double> mf(static_cast<std::size_t>(mres));
    for (int i = 0; i < mres; ++i) mf[static_cast<std::size_t>(i)] = eval_field(F, {mg[static_cast<std::size_t>(i)]});

    struct State {
        std::vector<double> a, b, edges;
        double delta = 0.0, c1 = 0.0, maxd = 0.0, bound = kInf;
    };
    State best;
    bool success = false;
    int stall = 0;

    for (int it = 0; it < 40 && !success; ++it) {
        const int K = static_cast<int>(edges.size()) - 1;
        std::vector<double> widths(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) widths[static_cast<std::size_t>(k)] = edges[static_cast<std::size_t>(k + 1)] - edges[static_cast<std::size_t>(k)];
        const std::size_t i0 = static_cast<std::size_t>(
            std::max_element(widths.begin(), widths.end()) - widths.begin());
        const double maxw = widths[i0];

        std::vector<CellSample> rows;
        for (int k = 0; k < K; ++k)
            for (double x : linspace(edges[static_cast<std::size_t>(k)], edges[static_cast<std::size_t>(k + 1)], 60))
                rows.push_back({x, eval_field(F, {x}), k});

        // phase 1 residual sets the slope-gap cap for the boosted fit
        const EngineFit probe = partition_engine(edges, rows, {}, kInf, 0.0);
        if (!probe.ok) break;
        const double certify = target_chi * 0.97;
        const double need = certify - maxw > 1e-9 ? 2.0 * probe.tstar / (certify - maxw) : kInf;
        std::vector<int> gaps;
        for (int j : {static_cast<int>(i0) - 1, static_cast<int>(i0)})
            if (j >= 0 && j + 1 < K) gaps.push_back(j);
        const EngineFit ef = partition_engine(edges, rows, gaps, std::min(need, 1e6), 0.05);
        if (!ef.ok) break;

        State st;
        st.a = ef.a;
        st.b = ef.b;
        st.edges = edges;
        for (int i = 0; i < mres; ++i) {
            double m = -kInf;
            for (int k = 0; k < K; ++k)
                m = std::max(m, ef.a[static_cast<std::size_t>(k)] * mg[static_cast<std::size_t>(i)] + ef.b[static_cast<std::size_t>(k)]);
            st.delta = std::max(st.delta, std::abs(m - mf[static_cast<std::size_t>(i)]));
        }
        st.maxd = maxw;
        st.c1 = kInf;
        for (int j : gaps)
            st.c1 = std::min(st.c1, 0.5 * (ef.a[static_cast<std::size_t>(j + 1)] - ef.a[static_cast<std::size_t>(j)]));
        if (!std::isfinite(st.c1) || st.c1 <= 0) st.c1 = 0.0;
        const double raw = st.c1 > 0 ? 2.0 * st.delta / st.c1 + st.maxd : kInf;
        st.bound = std::min(raw, diam);

        if (st.bound < best.bound - 1e-9) {
            best = st;
            stall = 0;
        } else if (++stall >= 8) {
            break;
        }
        if (st.maxd <= budget + 1e-9 && st.bound <= target_chi) {
            best = st;
            success = true;
            break;
        }

        // split: widest cell while over budget (ties break toward the
        // smallest adjacent slope gap), else the bound-determining cell
        std::size_t ksplit = i0;
        if (maxw > budget + 1e-9) {
            double bestgap = kInf;
            for (std::size_t k = 0; k < widths.size(); ++k) {
                if (widths[k] < maxw - 1e-9) continue;
                double g = kInf;
                for (int j : {static_cast<int>(k) - 1, static_cast<int>(k)})
                    if (j >= 0 && j + 1 < K)
                        g = std::min(g, 0.5 * (ef.a[static_cast<std::size_t>(j + 1)] - ef.a[static_cast<std::size_t>(j)]));
                if (g < bestgap) {
                    bestgap = g;
                    ksplit = k;
                }
            }
        }
        const double mid = 0.5 * (edges[ksplit] + edges[ksplit + 1]);
        edges.insert(edges.begin() + static_cast<std::ptrdiff_t>(ksplit) + 1, mid);
    }

    if (best.a.empty()) throw InputError("refinement never produced a feasible fit");

    MmpsFunction mm({make_segment(best.a, best.b, domain)}, domain);
    SensitivityReport rep;
    rep.delta = best.delta;
    rep.c1 = best.c1 > 0 ? std::optional<double>(best.c1) : std::nullopt;
    rep.max_subregion_diam = best.maxd;
    rep.chi_theorem = best.bound;
    const ModulusCurve curve = modulus_curve(mm.segments().front(), 3000);
    rep.chi_curve = confidence_radius(curve, best.delta);
    const double radius = std::min(best.bound, *rep.chi_curve);
    const SensitivityReport vb = verify_bound(F, mm.segments().front(), radius, 10001);
    rep.oracle_distance = vb.oracle_distance;
    rep.x_star = vb.x_star;
    rep.x_hat = vb.x_hat;
    rep.verified = success && vb.verified;
    return {std::move(mm), std::move(rep)};
}

// ---- curvature-weighted CVT pipeline ----

std::vector<Vec> cvt_generators(const ScalarField& F, const Polytope& box, int count,
                                std::uint64_t seed, int iters, double power) {
    if (box.dim() != 2) throw InputError("the CVT pipeline supports 2-D domains");
    if (count < 1) throw InputError("generator count must be positive");
    const auto [lo, hi] = bounding_box(box);
    const int G = 81;
    const std::vector<double> gx = linspace(lo[0], hi[0], G), gy = linspace(lo[1], hi[1], G);
    std::vector<Vec> P;
    P.reserve(static_cast<std::size_t>(G * G));
    for (double x : gx)
        for (double y : gy) P.push_back({x, y});

    // curvature proxy: second differences with the stencil clamped to the box
    const double h = 0.5;
    const auto ev = [&](double x, double y) {
        return eval_field(F, {std::clamp(x, lo[0], hi[0]), std::clamp(y, lo[1], hi[1])});
    };
    std::vector<double> w(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double x = P[i][0], y = P[i][1];
        const double f0 = ev(x, y);
        const double fxx = (ev(x + h, y) - 2 * f0 + ev(x - h, y)) / (h * h);
        const double fyy = (ev(x, y + h) - 2 * f0 + ev(x, y - h)) / (h * h);
        const double fxy =
            (ev(x + h, y + h) - ev(x + h, y - h) - ev(x - h, y + h) + ev(x - h, y - h)) / (4 * h * h);
        w[i] = std::pow(std::abs(fxx) + std::abs(fyy) + 2 * std::abs(fxy) + 1e-6, power);
    }

    // weighted draw without replacement
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> avail = w;
    std::vector<Vec> gen;
    for (int k = 0; k < count; ++k) {
        const double total = std::accumulate(avail.begin(), avail.end(), 0.0);
        double r = uni(rng) * total;
        std::size_t pickd = avail.size();
        for (std::size_t i = 0; i < avail.size(); ++i) {
            if (avail[i] <= 0) continue;
            r -= avail[i];
            if (r <= 0) {
                pickd = i;
                break;
            }
        }
        if (pickd == avail.size())  // numerical tail: last point with weight left
            for (std::size_t j = avail.size(); j-- > 0;)
                if (avail[j] > 0) {
                    pickd = j;
                    break;
                }
        gen.push_back(P[pickd]);
        avail[pickd] = 0.0;
    }

    std::vector<int> asg(P.size(), 0);
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < P.size(); ++i) {
            double bd = kInf;
            int arg = 0;
            for (std::size_t q = 0; q < gen.size(); ++q) {
                const double dx = P[i][0] - gen[q][0], dy = P[i][1] - gen[q][1];
                const double d2 = dx * dx + dy * dy;
                if (d2 < bd) {
                    bd = d2;
                    arg = static_cast<int>(q);
                }
            }
            asg[i] = arg;
        }
        for (std::size_t q = 0; q < gen.size(); ++q) {
            double sx = 0.0, sy = 0.0, sw = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i)
                if (asg[i] == static_cast<int>(q)) {
                    sx += w[i] * P[i][0];
                    sy += w[i] * P[i][1];
                    sw += w[i];
                }
            if (sw > 0) gen[q] = {sx / sw, sy / sw};
        }
    }
    return gen;
}

std::vector<Polytope> voronoi_cells(const std::vector<Vec>& generators, const Polytope& box) {
    std::vector<Polytope> cells;
    for (std::size_t q = 0; q < generators.size(); ++q) {
        std::vector<Halfspace> rows(box.halfspaces().begin(), box.halfspaces().end());
        for (std::size_t r = 0; r < generators.size(); ++r) {
            if (r == q) continue;
            Vec nrm = sub(generators[r], generators[q]);
            for (double& c : nrm) c *= 2.0;
            const double off = dot(generators[r], generators[r]) - dot(generators[q], generators[q]);
            rows.push_back({std::move(nrm), off});
        }
        cells.emplace_back(box.dim(), std::move(rows));
    }
    return cells;
}

ConvexSegment cvt_constrained_fit(const ScalarField& F, const std::vector<Vec>& generators,
                                  const std::vector<Polytope>& cells, const Polytope& box) {
    const int Q = static_cast<int>(generators.size());
    const int nv = 3 * Q + 1;
    const int ns = 7;
    std::vector<std::vector<Vec>> verts(static_cast<std::size_t>(Q));
    for (int q = 0; q < Q; ++q) {
        try {
            verts[static_cast<std::size_t>(q)] = cells[static_cast<std::size_t>(q)].vertices();
        } catch (const EmptyRegionError&) {
        } catch (const UnboundedRegionError&) {
        }
    }

    LpProblem p;
    p.nvars = nv;
    const auto nearest = [&](double x, double y) {
        double bd = kInf;
        int arg = 0;
        for (int r = 0; r < Q; ++r) {
            const double dx = x - generators[static_cast<std::size_t>(r)][0];
            const double dy = y - generators[static_cast<std::size_t>(r)][1];
            const double d2 = dx * dx + dy * dy;
            if (d2 < bd) {
                bd = d2;
                arg = r;
            }
        }
        return arg;
    };
    for (int q = 0; q < Q; ++q) {
        const std::vector<Vec>& V = verts[static_cast<std::size_t>(q)];
        if (V.size() < 3) continue;
        Vec lov = V.front(), hiv = V.front();
        for (const Vec& v : V)
            for (int d = 0; d < 2; ++d) {
                lov[static_cast<std::size_t>(d)] = std::min(lov[static_cast<std::size_t>(d)], v[static_cast<std::size_t>(d)]);
                hiv[static_cast<std::size_t>(d)] = std::max(hiv[static_cast<std::size_t>(d)], v[static_cast<std::size_t>(d)]);
            }
        for (double x : linspace(lov[0], hiv[0], ns))
            for (double y : linspace(lov[1], hiv[1], ns)) {
                if (nearest(x, y) != q) continue;
                const double val = eval_field(F, {x, y});
                Vec row(static_cast<std::size_t>(nv), 0.0);
                row[static_cast<std::size_t>(3 * q)] = x;
                row[static_cast<std::size_t>(3 * q + 1)] = y;
                row[static_cast<std::size_t>(3 * q + 2)] = 1.0;
                row.back() = -1.0;
                p.A.push_back(row);
                p.b.push_back(val);
                row[static_cast<std::size_t>(3 * q)] = -x;
                row[static_cast<std::size_t>(3 * q + 1)] = -y;
                row[static_cast<std::size_t>(3 * q + 2)] = -1.0;
                p.A.push_back(std::move(row));
                p.b.push_back(-val);
            }
        for (const Vec& v : V)  // activation: piece_r <= piece_q on the cell
            for (int r = 0; r < Q; ++r) {
                if (r == q) continue;
                Vec row(static_cast<std::size_t>(nv), 0.0);
                row[static_cast<std::size_t>(3 * r)] = v[0];
                row[static_cast<std::size_t>(3 * r + 1)] = v[1];
                row[static_cast<std::size_t>(3 * r + 2)] = 1.0;
                row[static_cast<std::size_t>(3 * q)] -= v[0];
                row[static_cast<std::size_t>(3 * q + 1)] -= v[1];
                row[static_cast<std::size_t>(3 * q + 2)] -= 1.0;
                p.A.push_back(std::move(row));
                p.b.push_back(0.0);
            }
    }
    {
        Vec row(static_cast<std::size_t>(nv), 0.0);
        row.back() = -1.0;
        p.A.push_back(std::move(row));
        p.b.push_back(0.0);
    }
    p.c.assign(static_cast<std::size_t>(nv), 0.0);
    p.c.back() = 1.0;
    const LpResult r = solve_lp(p);
    if (r.status != LpStatus::Optimal)
        throw InputError("activation-constrained fit LP did not reach an optimum");

    ConvexSegment seg;
    seg.region = box;
    for (int q = 0; q < Q; ++q) {
        if (verts[static_cast<std::size_t>(q)].size() < 3) continue;  // untouched variables carry no fit
        seg.pieces.push_back({{r.x[static_cast<std::size_t>(3 * q)], r.x[static_cast<std::size_t>(3 * q + 1)]},
                              r.x[static_cast<std::size_t>(3 * q + 2)]});
        seg.subregions.push_back(cells[static_cast<std::size_t>(q)]);
    }
    if (seg.pieces.empty()) throw InputError("every Voronoi cell degenerated; nothing to fit");
    return seg;
}

}  // namespace pwa
