#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "pwa/errors.hpp"
#include "pwa/report.hpp"

namespace {

int fail(int code, const std::string& type, const std::string& message) {
    const nlohmann::json err{{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pwa-sense: fit continuous piecewise affine surrogates and certify "
        "how far a surrogate minimizer can sit from the true one"};

    std::string command;
    std::string manifest_path;
    std::string objective = "linf";
    double target_chi = 0.0;
    double delta = 0.0;

    pwa::RunConfig cfg;
    app.add_option("command", command, "fit | modulus | radius | verify | case-study");
    app.add_option("--manifest", manifest_path,
                   "re-run a bundle from its manifest.json instead of giving a command");
    app.add_option("--function", cfg.function,
                   "registered benchmark name or path to a two-column CSV table");
    app.add_option("--surrogate", cfg.surrogate, "mmps-v1 surrogate JSON path");
    app.add_option("--grid-resolution", cfg.grid_resolution,
                   "per-axis sample count for fitting, residual, and oracle grids")
        ->capture_default_str();
    app.add_option("--gamma-steps", cfg.gamma_steps, "modulus curve resolution")
        ->capture_default_str();
    auto* target_opt =
        app.add_option("--target-chi", target_chi, "verify: radius to check the oracle against");
    auto* delta_opt =
        app.add_option("--delta", delta, "radius: residual bound to certify at");
    app.add_option("--pieces", cfg.pieces, "fit: max-affine pieces per segment")
        ->capture_default_str();
    app.add_option("--segment", cfg.segment, "surrogate segment index to analyze")
        ->capture_default_str();
    app.add_option("--objective", objective, "fit norm")
        ->check(CLI::IsMember({"linf", "l1"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for anything randomized")->capture_default_str();
    app.add_option("--out", cfg.output_dir, "bundle output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    cfg.command = command;
    cfg.objective = objective == "l1" ? pwa::FitObjective::L1 : pwa::FitObjective::Linf;
    if (target_opt->count() > 0) cfg.target_chi = target_chi;
    if (delta_opt->count() > 0) cfg.delta = delta;

    try {
        if (!manifest_path.empty() && !command.empty())
            throw pwa::InputError("give either a command or --manifest, not both");
        if (manifest_path.empty() && command.empty())
            throw pwa::InputError("missing command (fit | modulus | radius | verify | case-study)");

        const pwa::ReportBundle bundle =
            manifest_path.empty() ? pwa::run(cfg)
                                  : pwa::run_from_manifest(manifest_path, cfg.output_dir);
        for (const auto& [rel, bytes] : bundle.files)
            std::cout << "wrote " << cfg.output_dir << "/" << rel << "\n";
        return 0;
    } catch (const pwa::FormatError& e) {
        return fail(3, "format", e.what());
    } catch (const pwa::InputError& e) {
        return fail(2, "usage", e.what());
    } catch (const std::exception& e) {
        return fail(4, "evaluation", e.what());
    }
}
