#include "pwa/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "pwa/errors.hpp"

namespace pwa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double midpoint_gap(const ConvexSegment& seg, const Vec& v, const Vec& w) {
    return 0.5 * (seg.max_value(v) + seg.max_value(w)) - seg.max_value(midpoint(v, w));
}

const std::vector<Polytope>& subregions_of(const ConvexSegment& seg,
                                           std::vector<Polytope>& scratch) {
    if (seg.subregions.size() == seg.pieces.size()) return seg.subregions;
    scratch = compute_subregions(seg);
    return scratch;
}

// 1-D breakpoints of the max: subregion edges plus every pairwise piece
// crossing (a superset is harmless, the candidate minimum only tightens)
std::vector<double> breakpoints_1d(const ConvexSegment& seg, double lo, double hi) {
    std::vector<double> bps;
    std::vector<Polytope> scratch;
    for (const Polytope& cell : subregions_of(seg, scratch)) {
        if (!cell.is_feasible()) continue;
        auto [slo, shi] = cell.interval_bounds();
        for (double t : {slo, shi})
            if (t > lo + 1e-12 && t < hi - 1e-12) bps.push_back(t);
    }
    for (std::size_t i = 0; i < seg.pieces.size(); ++i) {
        for (std::size_t j = i + 1; j < seg.pieces.size(); ++j) {
            const double da = seg.pieces[i].a[0] - seg.pieces[j].a[0];
            if (std::fabs(da) < 1e-14) continue;
            const double t = (seg.pieces[j].b - seg.pieces[i].b) / da;
            if (t > lo + 1e-12 && t < hi - 1e-12) bps.push_back(t);
        }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
              bps.end());
    return bps;
}

double exact_value_1d(const ConvexSegment& seg, const std::vector<double>& bps,
                      double lo, double hi, double gamma) {
    if (gamma <= 0) return 0.0;
    const double vmax = hi - gamma;
    if (vmax < lo - 1e-12) return kInf;  // no pair at this distance fits
    std::vector<double> cand{lo, vmax};
    for (double t : bps) {
        for (double v : {t, t - 0.5 * gamma, t - gamma}) {
            if (v >= lo - 1e-12 && v <= vmax + 1e-12) cand.push_back(std::clamp(v, lo, vmax));
        }
    }
    double best = kInf;
    for (double v : cand) best = std::min(best, midpoint_gap(seg, {v}, {v + gamma}));
    return std::max(0.0, best);
}

// [t_min, t_max] such that x0 + t*d stays inside the region
bool chord_range(const Polytope& region, const Vec& x0, const Vec& d, double* t_min,
                 double* t_max) {
    *t_min = -kInf;
    *t_max = kInf;
    for (const Halfspace& h : region.halfspaces()) {
        const double nd = dot(h.normal, d);
        const double slack = h.offset - dot(h.normal, x0);
        if (nd > 1e-12) {
            *t_max = std::min(*t_max, slack / nd);
        } else if (nd < -1e-12) {
            *t_min = std::max(*t_min, slack / nd);
        } else if (slack < -1e-9) {
            return false;  // line parallel to a violated facet
        }
    }
    return *t_max - *t_min > -1e-12 && std::isfinite(*t_min) && std::isfinite(*t_max);
}

struct ChordPair {
    Vec center;
    Vec dir;
};

ModulusCurve sampled_curve_nd(const ConvexSegment& seg, int gamma_steps,
                              const ModulusConfig& cfg) {
    const Polytope& region = seg.region;
    const int n = region.dim();
    const double diam = region.diameter();
    const std::vector<Vec>& verts = region.vertices();

    ModulusCurve curve;
    curve.diam = diam;
    curve.mode = "sampled-nd";

    std::vector<double> gammas(gamma_steps);
    std::vector<double> vals(gamma_steps, kInf);
    std::vector<ChordPair> best(gamma_steps);
    for (int k = 0; k < gamma_steps; ++k) gammas[k] = diam * k / gamma_steps;

    auto offer = [&](int k, const Vec& center, const Vec& d) {
        const double g2 = 0.5 * gammas[k];
        Vec v = center, w = center;
        for (int i = 0; i < n; ++i) {
            v[i] -= g2 * d[i];
            w[i] += g2 * d[i];
        }
        const double J = midpoint_gap(seg, v, w);
        if (J < vals[k]) {
            vals[k] = J;
            best[k] = {center, d};
        }
    };

    // chord sweep: place a centered pair of every grid distance on the chord
    // through x0 along d, keeping the center as close to x0 as the ends allow
    auto sweep = [&](const Vec& x0, const Vec& d) {
        double t_min, t_max;
        if (!chord_range(region, x0, d, &t_min, &t_max)) return;
        const double len = t_max - t_min;
        for (int k = 0; k < gamma_steps; ++k) {
            if (gammas[k] > len + 1e-12) break;
            const double tc = std::clamp(0.0, t_min + 0.5 * gammas[k], t_max - 0.5 * gammas[k]);
            Vec c = x0;
            for (int i = 0; i < n; ++i) c[i] += tc * d[i];
            offer(k, c, d);
        }
    };

    // deterministic coverage: all vertex-pair chords (the diameter pair keeps
    // every grid gamma reachable), then max chords of each activation cell so
    // the zero region is hit exactly
    for (std::size_t i = 0; i < verts.size(); ++i) {
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            Vec d = sub(verts[j], verts[i]);
            const double len = norm2(d);
            if (len < 1e-12) continue;
            for (double& e : d) e /= len;
            sweep(verts[i], d);
        }
    }
    std::vector<Polytope> scratch;
    for (const Polytope& cell : subregions_of(seg, scratch)) {
        if (!cell.is_feasible()) continue;
        const std::vector<Vec>* svs = nullptr;
        try {
            svs = &cell.vertices();
        } catch (const EmptyRegionError&) {
            continue;
        }
        double blen = 0.0;
        Vec bu, bv;
        for (std::size_t i = 0; i < svs->size(); ++i)
            for (std::size_t j = i + 1; j < svs->size(); ++j) {
                const double len = dist((*svs)[i], (*svs)[j]);
                if (len > blen) {
                    blen = len;
                    bu = (*svs)[i];
                    bv = (*svs)[j];
                }
            }
        if (blen < 1e-12) continue;
        Vec d = sub(bv, bu);
        for (double& e : d) e /= blen;
        sweep(midpoint(bu, bv), d);
    }

    // randomized chords through point pairs; directions drawn from the
    // region's own affine hull, so degenerate regions still produce chords
    std::mt19937_64 rng(cfg.seed == 0 ? 0x5eedULL : cfg.seed);
    for (int p = 0; p < cfg.pairs; ++p) {
        Vec a = random_point(region, rng);
        Vec b = random_point(region, rng);
        Vec d = sub(b, a);
        const double len = norm2(d);
        if (len < 1e-12) continue;
        for (double& e : d) e /= len;
        sweep(a, d);
    }

    // per-gamma local refinement, accept-if-better
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 1; k < gamma_steps; ++k) {
        if (!std::isfinite(vals[k]) || vals[k] <= 0.0) continue;
        Vec c = best[k].center;
        Vec d = best[k].dir;
        for (int s = 0; s < cfg.refine_steps; ++s) {
            const double decay = std::pow(0.65, s);
            const double sigma = 0.045 * diam * decay;
            Vec c2 = c, d2 = d;
            for (int i = 0; i < n; ++i) {
                c2[i] += sigma * gauss(rng);
                d2[i] += 0.125 * decay * gauss(rng);
            }
            const double dn = norm2(d2);
            if (dn < 1e-12) continue;
            for (double& e : d2) e /= dn;
            double t_min, t_max;
            if (!chord_range(region, c2, d2, &t_min, &t_max)) continue;
            if (t_max - t_min < gammas[k] - 1e-12) continue;
            const double tc = std::clamp(0.0, t_min + 0.5 * gammas[k], t_max - 0.5 * gammas[k]);
            Vec cc = c2;
            for (int i = 0; i < n; ++i) cc[i] += tc * d2[i];
            const double g2 = 0.5 * gammas[k];
            Vec v = cc, w = cc;
            for (int i = 0; i < n; ++i) {
                v[i] -= g2 * d2[i];
                w[i] += g2 * d2[i];
            }
            const double J = midpoint_gap(seg, v, w);
            if (J < vals[k]) {
                vals[k] = J;
                c = cc;
                d = d2;
            }
        }
    }

    // the true modulus is non-decreasing; a right-to-left running minimum
    // restores monotonicity without breaking the upper-bound property
    for (int k = gamma_steps - 2; k >= 0; --k) vals[k] = std::min(vals[k], vals[k + 1]);

    curve.samples.reserve(gamma_steps);
    for (int k = 0; k < gamma_steps; ++k)
        curve.samples.emplace_back(gammas[k], std::max(0.0, vals[k]));
    return curve;
}

}  // namespace

double modulus_value_1d(const ConvexSegment& seg, double gamma) {
    if (seg.region.dim() != 1) throw InputError("modulus_value_1d requires a 1-D region");
    auto [lo, hi] = seg.region.interval_bounds();
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw UnboundedRegionError("modulus of an unbounded region");
    return exact_value_1d(seg, breakpoints_1d(seg, lo, hi), lo, hi, gamma);
}

ModulusCurve modulus_curve(const ConvexSegment& seg, int gamma_steps,
                           const ModulusConfig& cfg) {
    if (gamma_steps < 2) throw InputError("gamma_steps must be at least 2");
    if (seg.region.dim() != 1) return sampled_curve_nd(seg, gamma_steps, cfg);

    auto [lo, hi] = seg.region.interval_bounds();
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw UnboundedRegionError("modulus of an unbounded region");
    const double diam = hi - lo;
    std::vector<double> bps = breakpoints_1d(seg, lo, hi);

    ModulusCurve curve;
    curve.diam = diam;
    curve.mode = "exact-1d";
    curve.samples.reserve(gamma_steps);
    for (int k = 0; k < gamma_steps; ++k) {
        const double g = diam * k / gamma_steps;
        curve.samples.emplace_back(g, exact_value_1d(seg, bps, lo, hi, g));
    }
    return curve;
}

double LowerBoundModulus::evaluate(double gamma) const {
    return std::max(0.0, c1_safe * (gamma - zero_radius));
}

LowerBoundModulus lower_bound_modulus(const ConvexSegment& seg) {
    LowerBoundModulus lb;
    lb.diam = seg.region.diameter();

    std::vector<Polytope> scratch;
    const std::vector<Polytope>& subs = subregions_of(seg, scratch);

    std::vector<int> live;
    std::vector<double> diams(subs.size(), 0.0);
    for (std::size_t q = 0; q < subs.size(); ++q) {
        if (!subs[q].is_feasible()) continue;
        try {
            diams[q] = subs[q].diameter();
        } catch (const EmptyRegionError&) {
            continue;
        }
        live.push_back(static_cast<int>(q));
    }
    if (live.empty()) throw EmptyRegionError("segment has no live activation cell");

    int imax = live[0];
    for (int q : live)
        if (diams[q] > diams[imax]) imax = q;
    lb.zero_radius = diams[imax];

    auto gap = [&](int i, int j) {
        return 0.5 * dist(seg.pieces[i].a, seg.pieces[j].a);
    };
    auto same_piece = [&](int i, int j) {
        return dist(seg.pieces[i].a, seg.pieces[j].a) < 1e-14 &&
               std::fabs(seg.pieces[i].b - seg.pieces[j].b) < 1e-12;
    };

    double c1_raw = kInf;
    for (int j : live) {
        if (j == imax || same_piece(imax, j)) continue;
        if (!intersects(subs[imax], subs[j])) continue;
        c1_raw = std::min(c1_raw, gap(imax, j));
    }
    if (std::isfinite(c1_raw)) {
        lb.c1 = c1_raw;
        lb.c0 = c1_raw * lb.diam;
    }

    double safe = kInf;
    for (std::size_t ii = 0; ii < live.size(); ++ii) {
        for (std::size_t jj = ii + 1; jj < live.size(); ++jj) {
            const int i = live[ii], j = live[jj];
            if (same_piece(i, j)) continue;
            if (!intersects(subs[i], subs[j])) continue;
            safe = std::min(safe, gap(i, j));
        }
    }
    lb.c1_safe = std::isfinite(safe) ? safe : 0.0;
    return lb;
}

double inverse_modulus(const ModulusCurve& curve, double y) {
    if (curve.samples.empty()) throw InputError("inverse of an empty curve");
    if (y < 0) throw InputError("inverse_modulus needs y >= 0");
    for (const auto& [gamma, value] : curve.samples)
        if (value > y + 1e-12) return gamma;
    return curve.diam;
}

double confidence_radius(const ModulusCurve& curve, double delta) {
    if (delta < 0) throw InputError("confidence_radius needs delta >= 0");
    return inverse_modulus(curve, 2.0 * delta);
}

double confidence_radius(const LowerBoundModulus& bound, double delta) {
    return theorem_bound(bound, delta);
}

double theorem_bound(const LowerBoundModulus& bound, double delta) {
    if (delta < 0) throw InputError("theorem_bound needs delta >= 0");
    if (!bound.c1 || *bound.c1 <= 1e-14)
        throw DegenerateBoundError("slope gap c1 vanishes; only the domain diameter bounds the radius",
                                   bound.diam);
    return std::min(2.0 * delta / *bound.c1 + bound.zero_radius, bound.diam);
}

SensitivityReport verify_bound(const ScalarField& F, const ConvexSegment& seg,
                               double radius, int grid_resolution) {
    if (grid_resolution < 2) throw InputError("grid_resolution must be at least 2");
    const Polytope& region = seg.region;
    const int n = region.dim();
    auto [lo, hi] = bounding_box(region);

    double spacing2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double step = (hi[k] - lo[k]) / (grid_resolution - 1);
        spacing2 += step * step;
    }
    const double spacing = std::sqrt(spacing2);

    double scale = 1.0;
    for (int k = 0; k < n; ++k)
        scale = std::max({scale, std::fabs(lo[k]), std::fabs(hi[k])});

    Vec x_star, x_hat;
    double f_star = kInf, f_hat = kInf;
    std::vector<int> idx(n, 0);
    bool more = true;
    while (more) {
        Vec x(n);
        for (int k = 0; k < n; ++k)
            x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (grid_resolution - 1);
        if (region.contains(x, 1e-9 * scale)) {
            const double ft = F(x);
            if (ft < f_star) {
                f_star = ft;
                x_star = x;
            }
            const double fs = seg.max_value(x);
            if (fs < f_hat) {
                f_hat = fs;
                x_hat = x;
            }
        }
        int k = n - 1;
        while (k >= 0 && ++idx[k] == grid_resolution) idx[k--] = 0;
        more = k >= 0;
    }
    if (!std::isfinite(f_star)) throw EmptyRegionError("grid missed the region entirely");

    SensitivityReport rep;
    rep.oracle_distance = dist(x_star, x_hat);
    rep.x_star = std::move(x_star);
    rep.x_hat = std::move(x_hat);
    rep.verified = *rep.oracle_distance <= radius + spacing;
    return rep;
}

std::string curve_csv(const ModulusCurve& curve) {
    std::string out = "gamma,h1\n";
    char buf[128];
    for (const auto& [gamma, value] : curve.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", gamma, value);
        out += buf;
    }
    return out;
}

nlohmann::json to_json(const SensitivityReport& rep) {
    nlohmann::json j;
    j["format"] = "pwa-sens-report-v1";
    j["delta"] = rep.delta;
    j["c1"] = rep.c1 ? nlohmann::json(*rep.c1) : nlohmann::json(nullptr);
    j["max_subregion_diam"] = rep.max_subregion_diam;
    j["chi_theorem"] = rep.chi_theorem ? nlohmann::json(*rep.chi_theorem) : nlohmann::json(nullptr);
    j["chi_curve"] = rep.chi_curve ? nlohmann::json(*rep.chi_curve) : nlohmann::json(nullptr);
    j["verified"] = rep.verified;
    j["oracle_distance"] =
        rep.oracle_distance ? nlohmann::json(*rep.oracle_distance) : nlohmann::json(nullptr);
    if (rep.x_star) j["x_star"] = *rep.x_star;
    if (rep.x_hat) j["x_hat"] = *rep.x_hat;
    return j;
}

}  // namespace pwa
