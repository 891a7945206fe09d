#include "pwa/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwa/errors.hpp"
#include "pwa/lp.hpp"

namespace pwa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void rows_of(const std::vector<Halfspace>& hs, std::vector<Vec>* A, Vec* b) {
    A->clear();
    b->clear();
    for (const Halfspace& h : hs) {
        A->push_back(h.normal);
        b->push_back(h.offset);
    }
}

}  // namespace

Polytope::Polytope(int dim, std::vector<Halfspace> hs) : dim_(dim) {
    if (dim < 1) throw InputError("polytope dimension must be positive");
    hs_.reserve(hs.size());
    for (Halfspace& h : hs) {
        if (static_cast<int>(h.normal.size()) != dim)
            throw InputError("halfspace normal has wrong dimension");
        const double nrm = norm2(h.normal);
        if (nrm < 1e-14) {
            // 0.x <= offset: vacuous when offset >= 0, contradictory otherwise
            if (h.offset < -1e-12) contradictory_ = true;
            continue;
        }
        for (double& v : h.normal) v /= nrm;
        h.offset /= nrm;
        hs_.push_back(std::move(h));
    }
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size() || lo.empty())
        throw InputError("box bounds must be nonempty and equal-length");
    const int n = static_cast<int>(lo.size());
    std::vector<Halfspace> hs;
    hs.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        Vec up(n, 0.0), dn(n, 0.0);
        up[i] = 1.0;
        dn[i] = -1.0;
        hs.push_back({up, hi[i]});
        hs.push_back({dn, -lo[i]});
    }
    return Polytope(n, std::move(hs));
}

Polytope Polytope::interval(double lo, double hi) { return box({lo}, {hi}); }

bool Polytope::contains(const Vec& x, double tol) const {
    if (contradictory_) return false;
    if (static_cast<int>(x.size()) != dim_) return false;
    for (const Halfspace& h : hs_)
        if (dot(h.normal, x) > h.offset + tol) return false;
    return true;
}

std::pair<double, double> Polytope::interval_bounds() const {
    if (dim_ != 1) throw InputError("interval_bounds requires a 1-D region");
    if (contradictory_) return {1.0, -1.0};
    double lo = -kInf, hi = kInf;
    for (const Halfspace& h : hs_) {
        if (h.normal[0] > 0)
            hi = std::min(hi, h.offset / h.normal[0]);
        else
            lo = std::max(lo, -h.offset / (-h.normal[0]));
    }
    return {lo, hi};
}

bool Polytope::is_feasible() const {
    if (feasible_) return *feasible_;
    bool ok;
    if (contradictory_) {
        ok = false;
    } else if (hs_.empty()) {
        ok = true;
    } else if (dim_ == 1) {
        auto [lo, hi] = interval_bounds();
        ok = lo <= hi + 1e-8;
    } else {
        std::vector<Vec> A;
        Vec b;
        rows_of(hs_, &A, &b);
        ok = lp_feasible(A, b, dim_);
    }
    feasible_ = ok;
    return ok;
}

bool Polytope::bounded() const {
    if (!is_feasible()) return true;
    if (dim_ == 1) {
        auto [lo, hi] = interval_bounds();
        return std::isfinite(lo) && std::isfinite(hi);
    }
    std::vector<Vec> A;
    Vec b;
    rows_of(hs_, &A, &b);
    for (int i = 0; i < dim_; ++i) {
        for (double sgn : {1.0, -1.0}) {
            LpProblem q;
            q.nvars = dim_;
            q.A = A;
            q.b = b;
            q.c.assign(dim_, 0.0);
            q.c[i] = sgn;  // min sgn*x_i = -(max -sgn*x_i)
            LpResult r = solve_lp(q);
            if (r.status == LpStatus::Unbounded) return false;
        }
    }
    return true;
}

const std::vector<Vec>& Polytope::vertices() const {
    if (verts_) return *verts_;
    if (!is_feasible()) throw EmptyRegionError("vertex enumeration on an empty region");
    if (!bounded()) throw UnboundedRegionError("vertex enumeration on an unbounded region");

    std::vector<Vec> out;
    if (dim_ == 1) {
        auto [lo, hi] = interval_bounds();
        out.push_back({lo});
        if (hi - lo > 1e-12) out.push_back({hi});
    } else {
        const int m = static_cast<int>(hs_.size());
        const int n = dim_;
        double scale = 1.0;
        for (const Halfspace& h : hs_) scale = std::max(scale, std::fabs(h.offset));
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        // iterate over all n-subsets of the constraint rows in lexicographic
        // order; counts stay small because regions carry few facets
        bool more = m >= n;
        while (more) {
            std::vector<Vec> A(n);
            Vec b(n);
            for (int i = 0; i < n; ++i) {
                A[i] = hs_[idx[i]].normal;
                b[i] = hs_[idx[i]].offset;
            }
            Vec x;
            if (solve_linear(A, b, x) && contains(x, 1e-7 * scale)) {
                bool dup = false;
                for (const Vec& v : out)
                    if (dist(v, x) < 1e-7 * scale) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(std::move(x));
            }
            // advance combination
            int k = n - 1;
            while (k >= 0 && idx[k] == m - n + k) --k;
            if (k < 0) {
                more = false;
            } else {
                ++idx[k];
                for (int i = k + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
            }
        }
        if (out.empty()) throw EmptyRegionError("feasible region has no basic vertex");
    }
    verts_ = std::move(out);
    return *verts_;
}

double Polytope::diameter() const {
    if (diam_) return *diam_;
    double d = 0.0;
    if (dim_ == 1) {
        if (!is_feasible()) throw EmptyRegionError("diameter of an empty region");
        auto [lo, hi] = interval_bounds();
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw UnboundedRegionError("diameter of an unbounded region");
        d = hi - lo;
    } else {
        const std::vector<Vec>& vs = vertices();
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j)
                d = std::max(d, dist(vs[i], vs[j]));
    }
    diam_ = d;
    return d;
}

Polytope Polytope::intersected(const std::vector<Halfspace>& extra) const {
    std::vector<Halfspace> hs = hs_;
    hs.insert(hs.end(), extra.begin(), extra.end());
    Polytope p(dim_, std::move(hs));
    p.contradictory_ = p.contradictory_ || contradictory_;
    return p;
}

bool intersects(const Polytope& a, const Polytope& b) {
    if (a.dim() != b.dim()) throw InputError("intersecting regions of unequal dimension");
    return a.intersected(b.halfspaces()).is_feasible();
}

Vec random_point(const Polytope& poly, std::mt19937_64& rng) {
    const std::vector<Vec>& vs = poly.vertices();
    std::uniform_real_distribution<double> uni(1e-12, 1.0);
    Vec w(vs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        w[i] = -std::log(uni(rng));
        total += w[i];
    }
    Vec x(poly.dim(), 0.0);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (int k = 0; k < poly.dim(); ++k) x[k] += (w[i] / total) * vs[i][k];
    return x;
}

std::pair<Vec, Vec> bounding_box(const Polytope& poly) {
    const std::vector<Vec>& vs = poly.vertices();
    Vec lo(poly.dim(), kInf), hi(poly.dim(), -kInf);
    for (const Vec& v : vs)
        for (int k = 0; k < poly.dim(); ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
        }
    return {lo, hi};
}

}  // namespace pwa
