// One PASS/FAIL line per acceptance criterion.
//
// Exit status is 0 when the set of failing criteria equals the set given
// with --expect-red (empty by default), so a known red criterion stays
// visible without hiding regressions elsewhere.

#include "oracles.hpp"
#include "slices.hpp"

#include <chrono>
#include <cstdio>
#include <set>
#include <string>

using namespace roamscope;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict table_points()
{
    const auto t0 = Clock::now();
    const ModelParams p;
    const auto pts = stationary_points(p);
    const double hp = std::numbers::pi / 2;
    const double ref[4][4] = {{1.1, 0, -47, 0.1}, {3.45, hp, -0.63, 0.02}, {1.1, hp, 8, 0.1}, {1.63, hp, 22.27, 0.05}};
    bool ok = pts.size() == 4;
    double worst_dr = 0, worst_dt = 0;
    std::string energies;
    for (std::size_t k = 0; ok && k < 4; ++k) {
        const double dr = std::abs(pts[k].r - ref[k][0]), dt = std::abs(pts[k].theta - ref[k][1]);
        worst_dr = std::max(worst_dr, dr);
        worst_dt = std::max(worst_dt, dt);
        ok = ok && dr <= 0.01 && dt <= 0.01 && std::abs(pts[k].energy - ref[k][2]) <= ref[k][3];
        energies += fmt(" %.4f", pts[k].energy);
    }
    const double t = seconds_since(t0);
    return {ok && t < 1.0, fmt("max|dr|=%.4f max|dtheta|=%.4f energies%s; %.3fs", worst_dr, worst_dt, energies.c_str(), t)};
}

Verdict outer_orbit_check()
{
    const auto t0 = Clock::now();
    const ModelParams p;
    const OrbitCurve o = outer_orbit(p);
    const double rel = std::abs(o.r_out - 13.4309241401910709) / 13.4309241401910709;
    IntegratorSettings set = IntegratorSettings::precise();
    set.t_max = 20.0;
    const Trajectory tr = advance(p, o.state_at(p, 0.0), set);
    double worst = tr.ok() ? 0.0 : 1.0;
    for (int k = 0; tr.ok() && k <= 2000; ++k)
        worst = std::max(worst, std::abs(tr.at(0.01 * k)[0] - o.r_out));
    const double t = seconds_since(t0);
    return {rel <= 1e-12 && worst < 1e-6 && t < 1.0,
            fmt("r_out=%.17g rel.err=%.2e max|r-r_out|=%.2e; %.3fs", o.r_out, rel, worst, t)};
}

const RefinedOrbit& inner_orbit()
{
    static const RefinedOrbit o = refine_orbit(ModelParams{}, tabulated_inner_orbit(), 80);
    return o;
}

Verdict periods()
{
    const auto t0 = Clock::now();
    const double inner = inner_orbit().period;
    const double outer = outer_orbit(ModelParams{}).period;
    const double t = seconds_since(t0);
    return {std::abs(inner - 11.84) <= 0.05 && std::abs(outer - 9.61) <= 0.05 && t < 60.0,
            fmt("inner=%.6f outer=%.6f; %.2fs", inner, outer, t)};
}

Verdict instability()
{
    const FloquetSpectrum s = floquet(ModelParams{}, inner_orbit());
    const double lmax = std::abs(s.multipliers[0]), lmin = std::abs(s.multipliers[3]);
    const double product = lmax * lmin;
    const double m1 = std::abs(s.multipliers[1]), m2 = std::abs(s.multipliers[2]);
    const bool magnitude = std::abs(s.log10_max - 21.0) <= 2.0;
    const bool reciprocal = std::abs(product - 1.0) <= 0.1;
    const bool unit = std::abs(m1 - 1.0) <= 0.1 && std::abs(m2 - 1.0) <= 0.1;
    return {magnitude && reciprocal && unit,
            fmt("log10|lambda_max|=%.3f (target 21+-2: %s) lambda*lambda_min=%.4f unit pair=%.6f,%.6f",
                s.log10_max, magnitude ? "ok" : "off", product, m1, m2)};
}

Verdict conservation()
{
    const ModelParams p;
    const FieldContext ctx(p);
    std::mt19937_64 rng(20200101);
    double worst = 0.0;
    int failed = 0;
    for (int k = 0; k < 1000; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng, 2.0, 14.0);
        for (Direction d : {Direction::forward, Direction::backward}) {
            const FlowResult f = flow(ctx, s.packed(), 20.0, d, {1e-12, 1e-12});
            if (!f.ok()) {
                ++failed;
                continue;
            }
            worst = std::max(worst, std::abs(kinetic_energy(p, PhaseState::from(f.state)) - 0.5));
        }
    }
    return {failed == 0 && worst < 1e-9, fmt("max|KE-1/2|=%.2e over 1000 seeds, %d failed runs", worst, failed)};
}

Verdict ld_structure()
{
    const auto t0 = Clock::now();
    const ModelParams p;
    const int n = 100;

    const SectionSpec th = SectionSpec::theta_section(p, n);
    const LDProfile prof = compute_profile(p, th, DescriptorSpec::outer(8), 6.0);
    const auto raw = interior_minima(prof.values, 0.0);
    const auto minima = interior_minima(prof.values, 0.2);
    const bool a = minima.size() == 2;

    const SectionSpec rad = SectionSpec::radial_section(p, n);
    const LDField ldo = compute_field(p, rad, DescriptorSpec::outer(20));
    const ManifoldTrace ws = extract_minima(ldo);
    bool signs = ws.n_chains == 2;
    for (const auto& q : ws.points)
        signs = signs && ((q.chain == 0) == (q.a2 > 0.0));
    const bool b = signs && ws.count(TraceLabel::outer_stable) > 0;

    const LDField ldi = compute_field(p, rad, DescriptorSpec::inner(6));
    const ManifoldTrace wu = extract_gradient_ridges(ldi);
    int s_chains = 0;
    for (int k = 0; k < wu.n_chains; ++k) {
        bool unstable = false;
        for (const auto& q : wu.points)
            if (q.chain == k && q.label == TraceLabel::inner_unstable)
                unstable = true;
        s_chains += unstable;
    }
    const bool c = s_chains == 4;

    const OverlayReport r = intersection_overlay(wu, ws);
    const bool d = r.roaming_present;
    const double t = seconds_since(t0);
    return {a && b && c && d && t < 600.0,
            fmt("(a) %zu minima above 0.2 prominence (%zu raw) (b) %d chains, sign-separated=%s (c) %d W_i^u chains "
                "(d) roaming=%s overlap=%ld bounded=%s; %.1fs",
                minima.size(), raw.size(), ws.n_chains, signs ? "yes" : "no", s_chains,
                d ? "true" : "false", r.overlap_cells, r.region_bounded ? "yes" : "no", t)};
}

Verdict property_suite()
{
    const ModelParams p;
    std::mt19937_64 rng(7);
    std::vector<std::string> broken;

    std::uniform_real_distribution<double> ur(0.8, 15.0), ut(0.0, 2 * std::numbers::pi);
    bool sym = true, grad = true;
    for (int k = 0; k < 1000; ++k) {
        const double r = ur(rng), th = ut(rng), u = eval_U(p, r, th);
        const double tol = 1e-12 * std::max(1.0, std::abs(u));
        sym = sym && std::abs(eval_U(p, r, -th) - u) <= tol && std::abs(eval_U(p, r, std::numbers::pi - th) - u) <= tol
           && std::abs(eval_U(p, r, std::numbers::pi + th) - u) <= tol;
        const double h = 1e-6;
        const auto g = grad_U(p, r, th);
        const double fr = (eval_U(p, r + h, th) - eval_U(p, r - h, th)) / (2 * h);
        const double ft = (eval_U(p, r, th + h) - eval_U(p, r, th - h)) / (2 * h);
        const double scale = std::max({std::abs(fr), std::abs(ft), 1e-3});
        grad = grad && std::abs(g.dr - fr) <= 1e-5 * scale && std::abs(g.dtheta - ft) <= 1e-5 * scale;
    }
    if (!sym)
        broken.push_back("symmetry");
    if (!grad)
        broken.push_back("gradient");

    bool mono = true;
    for (int k = 0; k < 50; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng);
        for (DescriptorSpec d : {DescriptorSpec::inner(1), DescriptorSpec::outer(1)}) {
            double prev = 0.0;
            for (double tau : {1.0, 2.0, 4.0, 8.0}) {
                d.tau = tau;
                const double v = ld_value(p, s, d);
                if (std::isinf(v))
                    break;
                mono = mono && v >= 0.0 && v >= prev;
                prev = v;
            }
        }
    }
    if (!mono)
        broken.push_back("non-negativity/monotonicity");

    const int n = 24;
    const SectionSpec rad = SectionSpec::radial_section(p, n);
    bool shift = true, bytes = true;
    for (const DescriptorSpec& d : {DescriptorSpec::inner(4), DescriptorSpec::outer(8)}) {
        const LDField f = compute_field(p, rad, d, IntegratorSettings::sweep(), 4);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n / 2; ++i)
                if (!f.masked(i, j))
                    shift = shift && std::abs(f.at(i, j) - f.at(i + n / 2, j)) <= 1e-4 * std::max(1.0, f.at(i, j));
        bytes = bytes && oracle::ldg_text(to_grid(f)) == oracle::ldg_text(to_grid(compute_field_serial(p, rad, d)));
    }
    if (!shift)
        broken.push_back("theta+pi invariance");
    if (!bytes)
        broken.push_back("serial/parallel bytes");

    const RefinedOrbit& o = inner_orbit();
    const Eigen::Vector4d u = slices::unstable_direction(p, o);
    int worst = 0;
    for (double s : {-1e-2, -3e-3, 1e-3, 3e-3, 1e-2}) {
        const auto m = slices::slice_minima(p, o, u, s, 1e-3, 41, 2.0);
        worst = (m.f1 < 0 || m.f2 < 0) ? 99 : std::max(worst, std::abs(m.f1 - m.f2));
    }
    if (worst > 1)
        broken.push_back("f1/f2 minima");

    std::string detail = broken.empty() ? "all six properties hold" : "broken:";
    for (const auto& b : broken)
        detail += " " + b;
    detail += fmt("; f1/f2 minima offset <= %d cell", worst);
    return {broken.empty(), detail};
}

Verdict negative_control()
{
    const SectionSpec s = SectionSpec::radial_section(ModelParams{}, 100);
    ManifoldTrace inner, outer;
    inner.section = outer.section = s;
    inner.n_chains = outer.n_chains = 2;
    for (int j = 0; j < s.n; ++j) {
        inner.points.push_back({TraceLabel::inner_unstable, s.coord1(15), s.coord2(j), 0, 15, j});
        inner.points.push_back({TraceLabel::inner_unstable, s.coord1(35), s.coord2(j), 1, 35, j});
    }
    for (int i = 50; i < 100; ++i) {
        outer.points.push_back({TraceLabel::outer_stable, s.coord1(i), s.coord2(80), 0, i, 80});
        outer.points.push_back({TraceLabel::outer_stable, s.coord1(i), s.coord2(20), 1, i, 20});
    }
    const OverlayReport r = intersection_overlay(inner, outer);
    return {!r.roaming_present, fmt("roaming=%s overlap=%ld", r.roaming_present ? "true" : "false", r.overlap_cells)};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expected_red;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--expect-red" && k + 1 < argc)
            expected_red.insert(std::stoi(argv[++k]));
        else {
            std::fprintf(stderr, "usage: %s [--expect-red N]...\n", argv[0]);
            return 2;
        }
    }

    struct Criterion {
        const char* name;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {"stationary points", table_points},   {"outer orbit", outer_orbit_check},
        {"periods", periods},                   {"instability magnitude", instability},
        {"conservation", conservation},         {"LD structure", ld_structure},
        {"property suite", property_suite},     {"negative control", negative_control},
    };

    std::set<int> red;
    int k = 0;
    for (const auto& c : criteria) {
        ++k;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass)
            red.insert(k);
        std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", k, c.name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %d criteria pass\n", std::size(criteria) - red.size(), k);
    if (red != expected_red) {
        std::printf("failing set differs from the expected red set\n");
        return 1;
    }
    return 0;
}
