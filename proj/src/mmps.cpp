#include "pwa/mmps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pwa/errors.hpp"

namespace pwa {

double ConvexSegment::max_value(const Vec& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const AffineMap& p : pieces) best = std::max(best, p.value(x));
    return best;
}

int ConvexSegment::active_piece(const Vec& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const AffineMap& p : pieces) best = std::max(best, p.value(x));
    // Ties within relative tolerance resolve to the lowest index.
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    for (std::size_t q = 0; q < pieces.size(); ++q)
        if (pieces[q].value(x) >= best - tol) return static_cast<int>(q);
    return 0;
}

std::vector<Polytope> compute_subregions(const ConvexSegment& seg) {
    std::vector<Polytope> out;
    out.reserve(seg.pieces.size());
    for (std::size_t q = 0; q < seg.pieces.size(); ++q) {
        std::vector<Halfspace> dom_rows;
        for (std::size_t j = 0; j < seg.pieces.size(); ++j) {
            if (j == q) continue;
            // piece q dominates j: (a_j - a_q).x <= b_q - b_j
            Vec n = sub(seg.pieces[j].a, seg.pieces[q].a);
            dom_rows.push_back({std::move(n), seg.pieces[q].b - seg.pieces[j].b});
        }
        out.push_back(seg.region.intersected(dom_rows));
    }
    return out;
}

MmpsFunction::MmpsFunction(std::vector<ConvexSegment> segments, Polytope domain)
    : segs_(std::move(segments)), domain_(std::move(domain)) {
    if (segs_.empty()) throw InputError("an MMPS function needs at least one segment");
    for (const ConvexSegment& s : segs_)
        if (s.pieces.empty()) throw InputError("every segment needs at least one piece");
    double scale = 1.0;
    for (const Halfspace& h : domain_.halfspaces())
        scale = std::max(scale, std::fabs(h.offset));
    tol_ = 1e-9 * scale;
    refresh_subregions();
}

void MmpsFunction::refresh_subregions() {
    // A caller that certified its own activation cells (one per piece) keeps
    // them; anything else is rebuilt from the dominance inequalities.
    for (ConvexSegment& s : segs_)
        if (s.subregions.size() != s.pieces.size()) s.subregions = compute_subregions(s);
}

double MmpsFunction::evaluate(const Vec& x) const {
    if (!domain_.contains(x, tol_)) throw DomainViolationError("point outside the domain");
    double best = std::numeric_limits<double>::infinity();
    for (const ConvexSegment& s : segs_) best = std::min(best, s.max_value(x));
    return best;
}

std::pair<int, int> MmpsFunction::active_segment(const Vec& x) const {
    if (!domain_.contains(x, tol_)) throw DomainViolationError("point outside the domain");
    double best = std::numeric_limits<double>::infinity();
    for (const ConvexSegment& s : segs_) best = std::min(best, s.max_value(x));
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    for (std::size_t p = 0; p < segs_.size(); ++p)
        if (segs_[p].max_value(x) <= best + tol)
            return {static_cast<int>(p), segs_[p].active_piece(x)};
    return {0, segs_[0].active_piece(x)};
}

namespace {

int coverage_resolution(int dim) {
    if (dim == 1) return 513;
    if (dim == 2) return 65;
    return 17;
}

}  // namespace

ValidationReport validate(const MmpsFunction& f, int boundary_samples) {
    ValidationReport rep;
    const Polytope& dom = f.domain();
    const int n = dom.dim();

    // coverage: every domain grid point must lie in some segment region
    auto [lo, hi] = bounding_box(dom);
    const int res = coverage_resolution(n);
    double scale = 1.0;
    for (int k = 0; k < n; ++k) scale = std::max(scale, std::max(std::fabs(lo[k]), std::fabs(hi[k])));
    const double ctol = 1e-7 * scale;

    std::vector<int> idx(n, 0);
    bool more = true;
    while (more) {
        Vec x(n);
        for (int k = 0; k < n; ++k)
            x[k] = (res == 1) ? lo[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (res - 1);
        if (dom.contains(x, ctol)) {
            bool covered = false;
            for (const ConvexSegment& s : f.segments())
                if (s.region.contains(x, ctol)) {
                    covered = true;
                    break;
                }
            if (!covered) {
                ++rep.coverage_gap_count;
                if (!rep.first_gap_point) rep.first_gap_point = x;
            }
        }
        int k = n - 1;
        while (k >= 0 && ++idx[k] == res) idx[k--] = 0;
        more = k >= 0;
    }

    // boundary agreement between every pair of touching regions
    std::mt19937_64 rng(12345);
    const auto& segs = f.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            Polytope shared = segs[i].region.intersected(segs[j].region.halfspaces());
            if (!shared.is_feasible()) continue;
            std::vector<Vec> pts;
            try {
                pts = shared.vertices();
                for (int s = 0; s < boundary_samples; ++s) pts.push_back(random_point(shared, rng));
            } catch (const EmptyRegionError&) {
                continue;  // feasibility was marginal; treat as non-adjacent
            }
            for (const Vec& x : pts) {
                const double jump = std::fabs(segs[i].max_value(x) - segs[j].max_value(x));
                rep.max_jump = std::max(rep.max_jump, jump);
            }
        }
    }

    rep.valid = rep.coverage_gap_count == 0 && rep.max_jump <= rep.tol;
    return rep;
}

namespace {

nlohmann::json halfspaces_json(const std::vector<Halfspace>& hs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Halfspace& h : hs) arr.push_back({h.normal, h.offset});
    return arr;
}

std::vector<Halfspace> halfspaces_from(const nlohmann::json& arr, int* dim_hint) {
    if (!arr.is_array()) throw FormatError("halfspace list must be an array");
    std::vector<Halfspace> hs;
    for (const auto& row : arr) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_array() || !row[1].is_number())
            throw FormatError("halfspace rows must be [[normal...], offset]");
        Halfspace h;
        h.normal = row[0].get<Vec>();
        h.offset = row[1].get<double>();
        if (*dim_hint == 0) *dim_hint = static_cast<int>(h.normal.size());
        if (static_cast<int>(h.normal.size()) != *dim_hint)
            throw FormatError("inconsistent halfspace dimensions");
        hs.push_back(std::move(h));
    }
    return hs;
}

}  // namespace

nlohmann::json to_json(const MmpsFunction& f) {
    nlohmann::json j;
    j["format"] = "mmps-v1";
    j["domain"] = halfspaces_json(f.domain().halfspaces());
    nlohmann::json segs = nlohmann::json::array();
    for (const ConvexSegment& s : f.segments()) {
        nlohmann::json seg;
        nlohmann::json pieces = nlohmann::json::array();
        for (const AffineMap& p : s.pieces) pieces.push_back({{"a", p.a}, {"b", p.b}});
        seg["pieces"] = std::move(pieces);
        seg["region"] = halfspaces_json(s.region.halfspaces());
        segs.push_back(std::move(seg));
    }
    j["segments"] = std::move(segs);
    return j;
}

MmpsFunction mmps_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("format") || j["format"] != "mmps-v1")
        throw FormatError("expected an mmps-v1 document");
    if (!j.contains("domain") || !j.contains("segments"))
        throw FormatError("mmps-v1 document needs domain and segments");
    int dim = 0;
    std::vector<Halfspace> dom_hs = halfspaces_from(j["domain"], &dim);
    if (!j["segments"].is_array() || j["segments"].empty())
        throw FormatError("segments must be a nonempty array");

    std::vector<ConvexSegment> segs;
    for (const auto& sj : j["segments"]) {
        if (!sj.is_object() || !sj.contains("pieces") || !sj.contains("region"))
            throw FormatError("each segment needs pieces and region");
        ConvexSegment seg;
        if (!sj["pieces"].is_array() || sj["pieces"].empty())
            throw FormatError("pieces must be a nonempty array");
        for (const auto& pj : sj["pieces"]) {
            if (!pj.is_object() || !pj.contains("a") || !pj.contains("b") ||
                !pj["a"].is_array() || !pj["b"].is_number())
                throw FormatError("pieces must be objects with a and b");
            AffineMap p;
            p.a = pj["a"].get<Vec>();
            p.b = pj["b"].get<double>();
            if (dim == 0) dim = static_cast<int>(p.a.size());
            if (static_cast<int>(p.a.size()) != dim)
                throw FormatError("inconsistent piece dimensions");
            seg.pieces.push_back(std::move(p));
        }
        std::vector<Halfspace> reg_hs = halfspaces_from(sj["region"], &dim);
        seg.region = Polytope(dim, std::move(reg_hs));
        segs.push_back(std::move(seg));
    }
    if (dim == 0) throw FormatError("could not infer dimension");
    return MmpsFunction(std::move(segs), Polytope(dim, std::move(dom_hs)));
}

}  // namespace pwa
