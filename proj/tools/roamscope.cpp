// roamscope: potential, orbits, field, extract and classify runs.

#include "roamscope/config.hpp"
#include "roamscope/formats.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace roamscope;

namespace {

constexpr int kOk = 0;
constexpr int kNumerical = 1;
constexpr int kConfig = 2;

using Results = std::vector<std::pair<std::string, std::string>>;

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) { return format_value(v); }

std::filesystem::path prepare_out(const RunConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
    return cfg.out_dir;
}

struct Expected {
    const char* label;
    double r, theta, energy, energy_tol;
};

// reference stationary points, in the order stationary_points returns them
constexpr Expected kTable[] = {
    {"q0+", 1.1, 0.0, -47.0, 0.1},
    {"q1+", 3.45, 1.5707963267948966, -0.63, 0.02},
    {"q~1+", 1.1, 1.5707963267948966, 8.0, 0.1},
    {"q2+", 1.63, 1.5707963267948966, 22.27, 0.05},
};

int cmd_potential(const RunConfig& cfg)
{
    const auto out = prepare_out(cfg);
    const auto points = stationary_points(cfg.model);

    std::ostringstream report;
    report << "label, r, theta, energy, kind, gradient_norm, dr, dtheta, denergy\n";
    bool ok = points.size() == std::size(kTable);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        report << p.label << ", " << num(p.r) << ", " << num(p.theta) << ", " << num(p.energy) << ", "
               << to_string(p.kind) << ", " << num(p.gradient_norm);
        if (k < std::size(kTable)) {
            const Expected& e = kTable[k];
            const double dr = p.r - e.r, dt = p.theta - e.theta, de = p.energy - e.energy;
            report << ", " << num(dr) << ", " << num(dt) << ", " << num(de);
            if (std::abs(dr) > 0.01 || std::abs(dt) > 0.01 || std::abs(de) > e.energy_tol)
                ok = false;
        }
        report << '\n';
    }
    std::ofstream(out / "stationary_points.txt") << report.str();
    std::cout << report.str();

    Results results{{"table_check", ok ? "pass" : "fail"}};
    if (cfg.potential.grid > 0) {
        write_grid(out / "potential.ldg", potential_grid(cfg.model, cfg.potential.grid, cfg.potential.r,
                                                         cfg.potential.theta));
        results.emplace_back("grid_file", "potential.ldg");
    }
    write_manifest(out / "manifest", cfg, results);
    if (!ok) {
        std::cerr << "stationary points disagree with the reference table (deltas above)\n";
        return kNumerical;
    }
    return kOk;
}

int cmd_orbits(const RunConfig& cfg)
{
    const auto out = prepare_out(cfg);
    const OrbitCurve outer = outer_orbit(cfg.model, cfg.orbits.branch);

    RefinedOrbit inner;
    try {
        inner = refine_orbit(cfg.model, tabulated_inner_orbit(cfg.orbits.branch), cfg.orbits.segments,
                             ShootingOptions{});
    } catch (const ShootingDivergence& e) {
        std::cerr << e.what() << "\nsegment residuals:\n";
        for (std::size_t k = 0; k < e.segment_residuals.size(); ++k)
            std::cerr << "  " << k << ' ' << num(e.segment_residuals[k]) << '\n';
        return kNumerical;
    }
    const FloquetSpectrum spec = floquet(cfg.model, inner);

    std::ofstream(out / "inner_orbit.txt") << serialize_orbit(inner.curve);
    std::ofstream(out / "outer_orbit.txt") << serialize_orbit(outer);

    std::ostringstream report;
    report << "r_out = " << num(outer.r_out) << '\n'
           << "outer_period = " << num(outer.period) << '\n'
           << "inner_period = " << num(inner.period) << '\n'
           << "inner_matching_norm = " << num(inner.matching_norm) << '\n'
           << "inner_newton_iterations = " << inner.iterations << '\n'
           << "log10_lambda_max = " << num(spec.log10_max) << '\n';
    for (std::size_t k = 0; k < spec.multipliers.size(); ++k)
        report << "multiplier_" << k << " = " << num(spec.multipliers[k].real()) << ' '
               << num(spec.multipliers[k].imag()) << '\n';
    std::ofstream(out / "stability.txt") << report.str();
    std::cout << report.str();

    write_manifest(out / "manifest", cfg,
                   {{"r_out", num(outer.r_out)},
                    {"inner_period", num(inner.period)},
                    {"outer_period", num(outer.period)},
                    {"log10_lambda_max", num(spec.log10_max)}});
    return kOk;
}

// >1% failed cells warns, >10% fails the run
int failure_verdict(double failed)
{
    if (failed > 0.10) {
        std::cerr << "error: " << failed * 100 << "% of cells failed\n";
        return kNumerical;
    }
    if (failed > 0.01)
        std::cerr << "warning: " << failed * 100 << "% of cells failed\n";
    return kOk;
}

int cmd_field(const RunConfig& cfg)
{
    const auto out = prepare_out(cfg);
    const LDField f = compute_field(cfg.model, cfg.section, cfg.descriptor, cfg.integrator, cfg.threads);
    write_grid(out / "field.ldg", to_grid(f));
    write_manifest(out / "manifest", cfg,
                   {{"field_file", "field.ldg"},
                    {"failed_fraction", num(f.failed_fraction())},
                    {"masked_fraction", num(f.masked_fraction())}});
    std::cout << "field.ldg: " << f.n() << "x" << f.n() << ", failed fraction " << f.failed_fraction() << '\n';
    return failure_verdict(f.failed_fraction());
}

LDField load_field(const std::filesystem::path& p)
{
    try {
        return field_from_grid(read_grid(p));
    } catch (const std::exception& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

int cmd_extract(const RunConfig& cfg)
{
    const auto out = prepare_out(cfg);
    const LDField inner_field = load_field(cfg.extract.inner_field);
    const LDField outer_field = load_field(cfg.extract.outer_field);

    const ManifoldTrace inner = extract_gradient_ridges(inner_field, cfg.extract.ridges);
    const ManifoldTrace outer = extract_minima(outer_field, cfg.extract.minima);
    write_trace(out / "inner_unstable.trace", inner);
    write_trace(out / "outer_stable.trace", outer);

    const long n_inner = static_cast<long>(inner.count(TraceLabel::inner_unstable));
    const long n_outer = static_cast<long>(outer.count(TraceLabel::outer_stable));
    if (n_inner == 0 || n_outer == 0) {
        write_manifest(out / "manifest", cfg, {{"error", "empty traces"}});
        std::cerr << "error: empty traces (" << n_inner << " unstable points, " << n_outer << " stable points)\n";
        return kNumerical;
    }

    const OverlayReport r = intersection_overlay(inner, outer, cfg.extract.anchor1, cfg.extract.anchor2);
    const Results results{{"roaming_present", r.roaming_present ? "true" : "false"},
                          {"inner_unstable_chains", std::to_string(r.n_inner_chains)},
                          {"outer_stable_chains", std::to_string(r.n_outer_chains)},
                          {"inner_region_cells", std::to_string(r.inner_region_cells)},
                          {"outer_band_cells", std::to_string(r.outer_band_cells)},
                          {"overlap_cells", std::to_string(r.overlap_cells)},
                          {"region_bounded", r.region_bounded ? "true" : "false"},
                          {"axis_asymptotic_points", std::to_string(inner.count(TraceLabel::axis_asymptotic))}};
    std::ostringstream report;
    for (const auto& [k, v] : results)
        report << k << " = " << v << '\n';
    std::ofstream(out / "overlay.txt") << report.str();
    std::cout << report.str();
    write_manifest(out / "manifest", cfg, results);
    return kOk;
}

int cmd_classify(const RunConfig& cfg)
{
    const auto out = prepare_out(cfg);
    const ClassGrid g = classify_grid(cfg.model, cfg.section, cfg.classify, cfg.integrator, cfg.threads);
    long live = 0, failed = 0;
    std::array<long, 5> counts{};
    for (std::size_t k = 0; k < g.codes.size(); ++k) {
        if (g.codes[k] < 0)
            continue;
        ++live;
        failed += g.failed[k];
        ++counts[static_cast<std::size_t>(g.codes[k])];
    }
    const double failed_fraction = live ? static_cast<double>(failed) / live : 0.0;
    write_grid(out / "classes.ldg", to_grid(g));

    Results results{{"class_file", "classes.ldg"},
                    {"resident_timeout_fraction", num(g.timeout_fraction())},
                    {"failed_fraction", num(failed_fraction)}};
    for (int c = 0; c < 5; ++c)
        results.emplace_back(to_string(static_cast<TrajectoryKind>(c)) + "_cells", std::to_string(counts[c]));
    write_manifest(out / "manifest", cfg, results);
    for (const auto& [k, v] : results)
        std::cout << k << " = " << v << '\n';
    return failure_verdict(failed_fraction);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Isokinetic CH4+ roaming survey with Lagrangian descriptors"};
    app.require_subcommand(1);

    std::optional<std::filesystem::path> config_path;
    Overrides ov;
    std::string branch;
    std::string out_str;
    double tau = 0.0;
    int grid = 0, threads = 0;

    const std::vector<std::string> names{"potential", "orbits", "field", "extract", "classify"};
    const std::vector<std::string> help{"stationary points and potential grid",
                                        "outer radius, inner orbit refinement and its multipliers",
                                        "Lagrangian-descriptor field over a section",
                                        "manifold traces and the intersection overlay",
                                        "trajectory classes over a section"};
    for (std::size_t k = 0; k < names.size(); ++k) {
        CLI::App* sub = app.add_subcommand(names[k], help[k]);
        sub->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_str, "output directory (default $ROAMSCOPE_OUT or .)");
        sub->add_option("--tau", tau, "descriptor integration time")->check(CLI::PositiveNumber);
        sub->add_option("--grid", grid, "grid resolution")->check(CLI::Range(2, 100000));
        sub->add_option("--threads", threads, "worker cap, 0 = all")->check(CLI::NonNegativeNumber);
        sub->add_option("--branch", branch, "inner orbit branch")->check(CLI::IsMember({"plus", "minus"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out"))
        ov.out_dir = out_str;
    if (sub->count("--tau"))
        ov.tau = tau;
    if (sub->count("--grid"))
        ov.grid = grid;
    if (sub->count("--threads"))
        ov.threads = threads;
    if (sub->count("--branch"))
        ov.branch = branch_from_string(branch);

    const char* env_out = std::getenv("ROAMSCOPE_OUT");
    const std::filesystem::path default_out = env_out && *env_out ? env_out : ".";

    try {
        const RunConfig cfg = load_config(sub->get_name(), config_path, ov, default_out);
        if (cfg.command == "potential")
            return cmd_potential(cfg);
        if (cfg.command == "orbits")
            return cmd_orbits(cfg);
        if (cfg.command == "field")
            return cmd_field(cfg);
        if (cfg.command == "extract")
            return cmd_extract(cfg);
        return cmd_classify(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
