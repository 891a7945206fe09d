#include "pwa/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pwa/bench.hpp"
#include "pwa/errors.hpp"

namespace pwa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void add_file(ReportBundle& bundle, std::string rel, std::string bytes) {
    bundle.files.emplace_back(std::move(rel), std::move(bytes));
}

void write_bundle(const ReportBundle& bundle, const std::string& output_dir) {
    namespace fs = std::filesystem;
    for (const auto& [rel, bytes] : bundle.files) {
        const fs::path target = fs::path(output_dir) / rel;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        if (!out) throw InputError("cannot write " + target.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
}

nlohmann::json provenance(const RunConfig& cfg) {
    return {{"seed", cfg.seed},
            {"grid_resolution", cfg.grid_resolution},
            {"gamma_steps", cfg.gamma_steps}};
}

nlohmann::json report_json(const SensitivityReport& rep, const RunConfig& cfg) {
    nlohmann::json j = to_json(rep);
    j["provenance"] = provenance(cfg);
    return j;
}

nlohmann::json curve_json(const ModulusCurve& curve, const RunConfig& cfg) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& [gamma, value] : curve.samples) samples.push_back({gamma, value});
    return {{"format", "pwa-curve-v1"},
            {"mode", curve.mode},
            {"diam", curve.diam},
            {"samples", samples},
            {"provenance", provenance(cfg)}};
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, int lineno) {
    const auto first = cell.find_first_not_of(" \t");
    if (first == std::string::npos)
        throw FormatError("function table line " + std::to_string(lineno) + ": empty cell");
    const auto last = cell.find_last_not_of(" \t");
    double value = 0.0;
    const char* begin = cell.data() + first;
    const char* end = cell.data() + last + 1;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw FormatError("function table line " + std::to_string(lineno) + ": bad number '" +
                          cell + "'");
    return value;
}

// Header plus two numeric columns; rows define a piecewise linear function
// on [min x, max x]. Queries are clamped to the tabulated range.
Benchmark table_function(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read function table " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("function table " + path + " is empty");
    if (split_csv(strip_cr(line)).size() != 2)
        throw FormatError("function table must have exactly two columns (x,value)");

    std::vector<std::pair<double, double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2)
            throw FormatError("function table line " + std::to_string(lineno) +
                              ": expected two columns, got " + std::to_string(cells.size()));
        const double x = parse_cell(cells[0], lineno);
        const double y = parse_cell(cells[1], lineno);
        rows.emplace_back(x, y);
    }
    if (rows.size() < 2) throw FormatError("function table needs at least two rows");
    std::sort(rows.begin(), rows.end());
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].first == rows[i - 1].first)
            throw FormatError("function table has duplicate x = " +
                              std::to_string(rows[i].first));

    auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(rows));
    ScalarField field = [table](const Vec& q) {
        const auto& t = *table;
        const double x = std::clamp(q[0], t.front().first, t.back().first);
        auto hi = std::upper_bound(t.begin(), t.end(), std::make_pair(x, kInf));
        if (hi == t.begin()) ++hi;
        if (hi == t.end()) --hi;
        const auto lo = hi - 1;
        const double w = (x - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    };
    const double lo = table->front().first;
    const double hi = table->back().first;
    return Benchmark{path, std::move(field), Polytope::interval(lo, hi)};
}

const ConvexSegment& segment_at(const MmpsFunction& mm, int index) {
    if (index < 0 || index >= static_cast<int>(mm.segments().size()))
        throw InputError("segment index " + std::to_string(index) + " out of range (surrogate has " +
                         std::to_string(mm.segments().size()) + " segments)");
    return mm.segments()[static_cast<std::size_t>(index)];
}

MmpsFunction require_surrogate(const RunConfig& cfg) {
    if (cfg.surrogate.empty()) throw InputError(cfg.command + " requires --surrogate");
    return load_surrogate(cfg.surrogate);
}

void run_fit(const RunConfig& cfg, ReportBundle& bundle) {
    const Benchmark bench = load_function(cfg.function);
    FitConfig fc;
    fc.pieces_per_segment = cfg.pieces;
    fc.resolution = cfg.grid_resolution;
    fc.objective = cfg.objective;
    fc.seed = cfg.seed;
    fc.reseed_dead = true;  // CLI default favors fit quality over the cheapest path
    auto [mm, delta] = fit_mmps(bench.field, bench.domain, fc);

    const ValidationReport vr = validate(mm);
    nlohmann::json dj;
    dj["delta"] = delta.delta;
    dj["argmax_point"] = delta.argmax_point;
    dj["resolution"] = delta.resolution;
    dj["continuity"] = {{"valid", vr.valid},
                        {"max_jump", vr.max_jump},
                        {"coverage_gap_count", vr.coverage_gap_count}};
    dj["provenance"] = provenance(cfg);

    bundle.sensitivity.delta = delta.delta;
    add_file(bundle, "surrogate.json", dump_json(to_json(mm)));
    add_file(bundle, "delta.json", dump_json(dj));
    bundle.surrogate = std::move(mm);
}

void run_modulus(const RunConfig& cfg, ReportBundle& bundle) {
    const MmpsFunction mm = require_surrogate(cfg);
    const ConvexSegment& seg = segment_at(mm, cfg.segment);
    ModulusConfig mc;
    mc.seed = cfg.seed;
    ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps, mc);
    add_file(bundle, "curve.json", dump_json(curve_json(curve, cfg)));
    add_file(bundle, "curve.csv", curve_csv(curve));
    bundle.curves.push_back(std::move(curve));
    bundle.surrogate = mm;
}

void run_radius(const RunConfig& cfg, ReportBundle& bundle) {
    if (!cfg.delta) throw InputError("radius requires --delta");
    const MmpsFunction mm = require_surrogate(cfg);
    const ConvexSegment& seg = segment_at(mm, cfg.segment);
    ModulusConfig mc;
    mc.seed = cfg.seed;
    ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps, mc);
    const LowerBoundModulus lb = lower_bound_modulus(seg);

    SensitivityReport rep;
    rep.delta = *cfg.delta;
    rep.c1 = lb.c1;
    rep.max_subregion_diam = lb.zero_radius;
    rep.chi_curve = confidence_radius(curve, *cfg.delta);
    std::optional<double> fallback;
    try {
        rep.chi_theorem = theorem_bound(lb, *cfg.delta);
    } catch (const DegenerateBoundError& e) {
        // Degenerate slope gaps are an analysis outcome: report the fallback.
        fallback = e.fallback_radius;
    }
    nlohmann::json rj = report_json(rep, cfg);
    if (fallback) {
        rj["theorem_degenerate"] = true;
        rj["theorem_fallback_radius"] = *fallback;
    }

    add_file(bundle, "report.json", dump_json(rj));
    add_file(bundle, "curve.csv", curve_csv(curve));
    bundle.sensitivity = rep;
    bundle.curves.push_back(std::move(curve));
    bundle.surrogate = mm;
}

void run_verify(const RunConfig& cfg, ReportBundle& bundle) {
    if (!cfg.target_chi) throw InputError("verify requires --target-chi");
    const Benchmark bench = load_function(cfg.function);
    const MmpsFunction mm = require_surrogate(cfg);
    const ConvexSegment& seg = segment_at(mm, cfg.segment);

    SensitivityReport rep = verify_bound(bench.field, seg, *cfg.target_chi, cfg.grid_resolution);
    const MmpsFunction piece({seg}, seg.region);
    rep.delta = estimate_delta(bench.field, piece, seg.region, cfg.grid_resolution).delta;

    nlohmann::json rj = report_json(rep, cfg);
    rj["target_chi"] = *cfg.target_chi;
    add_file(bundle, "report.json", dump_json(rj));
    bundle.sensitivity = rep;
    bundle.surrogate = mm;
}

ConvexSegment printed_three_piece(const Polytope& region) {
    const double slopes[] = {-7.8, -0.9, 6.1};
    const double offsets[] = {-2365.7, -501.2, 1176.1};
    ConvexSegment seg;
    for (int i = 0; i < 3; ++i) seg.pieces.push_back(AffineMap{Vec{slopes[i]}, offsets[i]});
    seg.region = region;
    seg.subregions = compute_subregions(seg);
    return seg;
}

// Evaluate both radius routes at a reference residual bound and verify the
// cheaper one against the grid oracle.
SensitivityReport reference_report(const ScalarField& F, const ConvexSegment& seg,
                                   const ModulusCurve& curve, const LowerBoundModulus& lb,
                                   double delta, int grid_resolution) {
    const double chi_curve = confidence_radius(curve, delta);
    double radius = chi_curve;
    std::optional<double> chi_theorem;
    try {
        chi_theorem = theorem_bound(lb, delta);
        radius = std::min(radius, *chi_theorem);
    } catch (const DegenerateBoundError& e) {
        radius = std::min(radius, e.fallback_radius);
    }
    SensitivityReport rep = verify_bound(F, seg, radius, grid_resolution);
    rep.delta = delta;
    rep.c1 = lb.c1;
    rep.max_subregion_diam = lb.zero_radius;
    rep.chi_theorem = chi_theorem;
    rep.chi_curve = chi_curve;
    return rep;
}

nlohmann::json summary_entry(const SensitivityReport& rep, double delta_measured) {
    nlohmann::json j;
    j["delta_reference"] = rep.delta;
    j["delta_measured"] = delta_measured;
    j["c1"] = rep.c1 ? nlohmann::json(*rep.c1) : nlohmann::json(nullptr);
    j["max_subregion_diam"] = rep.max_subregion_diam;
    j["chi_theorem"] = rep.chi_theorem ? nlohmann::json(*rep.chi_theorem) : nlohmann::json(nullptr);
    j["chi_curve"] = rep.chi_curve ? nlohmann::json(*rep.chi_curve) : nlohmann::json(nullptr);
    j["verified"] = rep.verified;
    return j;
}

void eggholder_case_study(const RunConfig& cfg, ReportBundle& bundle) {
    const Benchmark bench = *find_benchmark("eggholder1d");
    const ScalarField& F = bench.field;
    const Polytope C3 = Polytope::interval(-330.0, -180.0);
    nlohmann::json summary;

    // Three-piece surrogate from the published coefficients.
    {
        const ConvexSegment seg = printed_three_piece(C3);
        const MmpsFunction f31({seg}, C3);
        const double delta_measured = estimate_delta(F, f31, C3, cfg.grid_resolution).delta;
        const ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps);
        const LowerBoundModulus lb = lower_bound_modulus(seg);
        const SensitivityReport rep =
            reference_report(F, seg, curve, lb, 19.9, cfg.grid_resolution);
        add_file(bundle, "f31/report.json", dump_json(report_json(rep, cfg)));
        add_file(bundle, "f31/curve.csv", curve_csv(curve));
        add_file(bundle, "f31/surrogate.json", dump_json(to_json(f31)));
        summary["f31"] = summary_entry(rep, delta_measured);
    }

    // Eight-piece refit. The published radii for this stage are only
    // reachable through a fresh constrained fit, not through the printed
    // three-piece coefficients, so the recipe below is part of the result.
    {
        FitConfig fc;
        fc.pieces_per_segment = 8;
        fc.resolution = 3001;
        fc.restarts = 1;
        fc.reseed_dead = true;
        fc.seed = cfg.seed;
        const SampleSet samples = sample(F, C3, fc.resolution);
        ConvexSegment seg = fit_segment(samples, 8, fc);
        const MmpsFunction f32({seg}, C3);
        const double delta_measured = estimate_delta(F, f32, C3, cfg.grid_resolution).delta;
        const ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps);
        const LowerBoundModulus lb = lower_bound_modulus(seg);
        const SensitivityReport rep26 =
            reference_report(F, seg, curve, lb, 2.6, cfg.grid_resolution);
        const SensitivityReport rep125 =
            reference_report(F, seg, curve, lb, 12.5, cfg.grid_resolution);
        add_file(bundle, "f32/report.json", dump_json(report_json(rep26, cfg)));
        add_file(bundle, "f32/report_delta12p5.json", dump_json(report_json(rep125, cfg)));
        add_file(bundle, "f32/curve.csv", curve_csv(curve));
        add_file(bundle, "f32/surrogate.json", dump_json(to_json(f32)));
        summary["f32"] = summary_entry(rep26, delta_measured);
        summary["f32_delta12p5"] = summary_entry(rep125, delta_measured);
    }

    // Equal-width partition at the cell count the refinement target implies;
    // kept in the summary because it shows why the loop re-solves for slope
    // separation instead of subdividing uniformly.
    {
        FitConfig fc;
        fc.lock_equal_cells = true;
        fc.pieces_per_segment = 15;
        fc.resolution = 3001;
        fc.seed = cfg.seed;
        auto [mm, delta] = fit_mmps(F, C3, fc);
        const LowerBoundModulus lb = lower_bound_modulus(mm.segments().front());
        double chi = lb.diam;
        try {
            chi = theorem_bound(lb, delta.delta);
        } catch (const DegenerateBoundError& e) {
            chi = e.fallback_radius;
        }
        summary["lock15"] = {
            {"delta_measured", delta.delta},
            {"c1", lb.c1 ? nlohmann::json(*lb.c1) : nlohmann::json(nullptr)},
            {"max_subregion_diam", lb.zero_radius},
            {"chi_theorem", chi}};
    }

    // Criteria-driven refinement toward a 15-unit radius.
    {
        FitConfig fc;
        fc.seed = cfg.seed;
        auto [mm, rep] = refine_to_radius(F, C3, 15.0, fc);
        const ConvexSegment& seg = mm.segments().front();
        const ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps);
        add_file(bundle, "refine/report.json", dump_json(report_json(rep, cfg)));
        add_file(bundle, "refine/curve.csv", curve_csv(curve));
        add_file(bundle, "refine/surrogate.json", dump_json(to_json(mm)));
        summary["refine"] = summary_entry(rep, rep.delta);
        bundle.sensitivity = rep;
        bundle.curves.push_back(curve);
        bundle.surrogate = std::move(mm);
    }

    summary["partition_rule_note"] =
        "A target radius of 15 on a 150-wide region forces max subregion diameter below 15, "
        "hence at least 15 cells, not 10. With 15 equal-width cells the adjacent slopes nearly "
        "tie (c1 ~ 7e-3) and the theorem bound saturates at the region diameter, so the "
        "refinement loop re-solves for slope separation on the realized breakpoints instead of "
        "subdividing uniformly.";
    add_file(bundle, "summary.json", dump_json(summary));
}

void nmpc_case_study(const RunConfig& cfg, ReportBundle& bundle) {
    const Benchmark bench = *find_benchmark("nmpc-theta0");
    const ScalarField& F = bench.field;
    const Polytope& box = bench.domain;
    nlohmann::json summary;

    auto fit_cells = [&](int cells) {
        FitConfig fc;
        fc.pieces_per_segment = cells;
        fc.resolution = cfg.grid_resolution;
        fc.seed = cfg.seed;
        return fit_mmps(F, box, fc);
    };

    // Coarse stage: four Voronoi cells, theorem route only.
    {
        auto [mm, delta] = fit_cells(4);
        const ConvexSegment& seg = mm.segments().front();
        const LowerBoundModulus lb = lower_bound_modulus(seg);
        double radius = lb.diam;
        std::optional<double> chi_theorem;
        try {
            chi_theorem = theorem_bound(lb, delta.delta);
            radius = *chi_theorem;
        } catch (const DegenerateBoundError& e) {
            radius = e.fallback_radius;
        }
        SensitivityReport rep = verify_bound(F, seg, radius, cfg.grid_resolution);
        rep.delta = delta.delta;
        rep.c1 = lb.c1;
        rep.max_subregion_diam = lb.zero_radius;
        rep.chi_theorem = chi_theorem;
        add_file(bundle, "q4/report.json", dump_json(report_json(rep, cfg)));
        add_file(bundle, "q4/surrogate.json", dump_json(to_json(mm)));
        summary["q4"] = summary_entry(rep, delta.delta);
        summary["q4"]["saturated"] = chi_theorem && *chi_theorem >= lb.diam - 1e-9;
    }

    // Fine stage: 24 cells, both routes plus the reference-residual radius.
    {
        auto [mm, delta] = fit_cells(24);
        const ConvexSegment& seg = mm.segments().front();
        const LowerBoundModulus lb = lower_bound_modulus(seg);
        ModulusConfig mc;
        mc.seed = cfg.seed;
        const ModulusCurve curve = modulus_curve(seg, cfg.gamma_steps, mc);
        const SensitivityReport rep =
            reference_report(F, seg, curve, lb, delta.delta, cfg.grid_resolution);
        const double kReferenceDelta = 0.01;
        const double reference_radius = confidence_radius(curve, kReferenceDelta);
        add_file(bundle, "q24/report.json", dump_json(report_json(rep, cfg)));
        add_file(bundle, "q24/curve.csv", curve_csv(curve));
        add_file(bundle, "q24/surrogate.json", dump_json(to_json(mm)));
        add_file(bundle, "reference_radii.json",
                 dump_json(nlohmann::json{{"delta", kReferenceDelta},
                                          {"radius", reference_radius},
                                          {"provenance", provenance(cfg)}}));
        summary["q24"] = summary_entry(rep, delta.delta);
        summary["q24"]["radius_at_reference_delta"] = reference_radius;
        summary["q24"]["reference_delta"] = kReferenceDelta;
        summary["diameter"] = lb.diam;
        bundle.sensitivity = rep;
        bundle.curves.push_back(curve);
        bundle.surrogate = std::move(mm);
    }

    summary["note"] =
        "Activation rows pin each fitted piece to its own Voronoi cell, which bounds the "
        "subregion diameters at the cost of a larger residual; the certified radius is "
        "dominated by the largest cell, not by the fit error.";
    add_file(bundle, "summary.json", dump_json(summary));
}

void run_case_study(const RunConfig& cfg, ReportBundle& bundle) {
    if (cfg.function == "eggholder1d")
        eggholder_case_study(cfg, bundle);
    else if (cfg.function == "nmpc-theta0")
        nmpc_case_study(cfg, bundle);
    else
        throw InputError("no case study for function '" + cfg.function + "'");
}

}  // namespace

Benchmark load_function(const std::string& spec) {
    if (auto bench = find_benchmark(spec)) return *bench;
    if (std::filesystem::exists(spec)) return table_function(spec);
    throw InputError("unknown function '" + spec + "'");
}

MmpsFunction load_surrogate(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read surrogate " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("surrogate is not valid JSON: ") + e.what());
    }
    return mmps_from_json(doc);
}

nlohmann::json manifest_json(const RunConfig& cfg) {
    nlohmann::json config;
    config["command"] = cfg.command;
    config["function"] = cfg.function;
    config["surrogate"] = cfg.surrogate;
    config["grid_resolution"] = cfg.grid_resolution;
    config["gamma_steps"] = cfg.gamma_steps;
    config["target_chi"] =
        cfg.target_chi ? nlohmann::json(*cfg.target_chi) : nlohmann::json(nullptr);
    config["delta"] = cfg.delta ? nlohmann::json(*cfg.delta) : nlohmann::json(nullptr);
    config["pieces"] = cfg.pieces;
    config["segment"] = cfg.segment;
    config["objective"] = cfg.objective == FitObjective::L1 ? "l1" : "linf";
    config["seed"] = cfg.seed;
    return {{"tool", "pwa-sense"}, {"version", "0.1.0"}, {"config", config}};
}

RunConfig config_from_manifest(const nlohmann::json& manifest, const std::string& output_dir) {
    if (!manifest.is_object() || manifest.value("tool", std::string()) != "pwa-sense")
        throw FormatError("not a pwa-sense manifest");
    const auto it = manifest.find("config");
    if (it == manifest.end() || !it->is_object()) throw FormatError("manifest has no config object");
    const nlohmann::json& c = *it;

    RunConfig cfg;
    try {
        cfg.command = c.value("command", cfg.command);
        cfg.function = c.value("function", cfg.function);
        cfg.surrogate = c.value("surrogate", cfg.surrogate);
        cfg.grid_resolution = c.value("grid_resolution", cfg.grid_resolution);
        cfg.gamma_steps = c.value("gamma_steps", cfg.gamma_steps);
        if (c.contains("target_chi") && !c["target_chi"].is_null())
            cfg.target_chi = c["target_chi"].get<double>();
        if (c.contains("delta") && !c["delta"].is_null()) cfg.delta = c["delta"].get<double>();
        cfg.pieces = c.value("pieces", cfg.pieces);
        cfg.segment = c.value("segment", cfg.segment);
        const std::string objective = c.value("objective", std::string("linf"));
        if (objective == "linf")
            cfg.objective = FitObjective::Linf;
        else if (objective == "l1")
            cfg.objective = FitObjective::L1;
        else
            throw FormatError("unknown objective '" + objective + "'");
        cfg.seed = c.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed manifest config: ") + e.what());
    }
    cfg.output_dir = output_dir;
    return cfg;
}

ReportBundle run(const RunConfig& config) {
    RunConfig cfg = config;
    if (cfg.command == "case-study") {
        // The case studies fix their own grids so the published-number
        // comparisons are stable; only the seed stays caller controlled.
        if (cfg.function == "eggholder1d") {
            cfg.grid_resolution = 20001;
            cfg.gamma_steps = 3000;
        } else if (cfg.function == "nmpc-theta0") {
            cfg.grid_resolution = 201;
            cfg.gamma_steps = 142;
        }
    }
    if (cfg.grid_resolution < 2) throw InputError("grid resolution must be at least 2");
    if (cfg.gamma_steps < 2) throw InputError("gamma steps must be at least 2");

    ReportBundle bundle;
    if (cfg.command == "fit")
        run_fit(cfg, bundle);
    else if (cfg.command == "modulus")
        run_modulus(cfg, bundle);
    else if (cfg.command == "radius")
        run_radius(cfg, bundle);
    else if (cfg.command == "verify")
        run_verify(cfg, bundle);
    else if (cfg.command == "case-study")
        run_case_study(cfg, bundle);
    else
        throw InputError("unknown command '" + cfg.command + "'");

    bundle.manifest = manifest_json(cfg);
    bundle.files.insert(bundle.files.begin(), {"manifest.json", dump_json(bundle.manifest)});
    write_bundle(bundle, cfg.output_dir);
    return bundle;
}

ReportBundle run_from_manifest(const std::string& manifest_path, const std::string& output_dir) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw InputError("cannot read manifest " + manifest_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
    }
    return run(config_from_manifest(doc, output_dir));
}

}  // namespace pwa
