#include "roamscope/survey.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace roamscope {

namespace {

enum class End { well, dissociated, open };

struct HalfHistory {
    End end = End::open;
    int crossings = 0;
    bool failed = false;
};

// Follows one time direction until the well boundary r = rbar(theta) is
// crossed inwards or the state passes r_out moving outwards; counts
// crossings of the radial section (either sense) on the way.
HalfHistory follow(const FieldContext& ctx, const State4& y0, Direction dir, const ClassificationRules& rules,
                   const IntegratorSettings& integrator, const OrbitCurve& inner, double r_out)
{
    IntegratorSettings s = integrator;
    s.direction = dir;
    s.t_max = rules.t_max;
    const double sign = dir == Direction::forward ? 1.0 : -1.0;
    HalfHistory h;
    auto observer = [&](const StepView& v) {
        const double a = v.y0[0] - rules.section_radius, b = v.y1[0] - rules.section_radius;
        // leaving a seed that lies on the section is not a crossing
        const bool from_seed = v.t0 == 0.0 && std::abs(a) < 1e-12;
        if ((a < 0.0) != (b < 0.0) && !from_seed)
            ++h.crossings;
        if (v.y1[0] < inner.rbar(v.y1[2])) {
            h.end = End::well;
            return false;
        }
        if (v.y1[0] > r_out && sign * v.y1[1] > 0.0) {
            h.end = End::dissociated;
            return false;
        }
        return true;
    };
    const TrajectoryStatus st = walk(ctx, y0, s, observer);
    h.failed = st != TrajectoryStatus::ok;
    return h;
}

}  // namespace

std::string to_string(TrajectoryKind k)
{
    switch (k) {
    case TrajectoryKind::direct_dissociation: return "direct-dissociation";
    case TrajectoryKind::roaming: return "roaming";
    case TrajectoryKind::isomerising: return "isomerising";
    case TrajectoryKind::nonreactive: return "nonreactive";
    case TrajectoryKind::resident_timeout: return "resident-timeout";
    }
    return "unknown";
}

TrajectoryClass classify_trajectory(const ModelParams& params, const PhaseState& state,
                                    const ClassificationRules& rules, const IntegratorSettings& integrator)
{
    if (!(rules.t_max > 0.0) || !(rules.section_radius > 0.0) || rules.roaming_crossings < 2)
        throw std::invalid_argument("classification rules need t_max > 0, section radius > 0, roaming crossings >= 2");
    integrator.validate();
    const FieldContext ctx(params);
    const OrbitCurve inner = tabulated_inner_orbit();
    const double r_out = outer_radius(params);
    const State4 y0 = state.packed();

    const HalfHistory past = follow(ctx, y0, Direction::backward, rules, integrator, inner, r_out);
    const HalfHistory future = follow(ctx, y0, Direction::forward, rules, integrator, inner, r_out);

    TrajectoryClass out;
    out.failed = past.failed || future.failed;
    // the seed itself counts when it sits on the section
    const bool on_section = std::abs(state.r - rules.section_radius) < 1e-12;
    out.section_crossings = past.crossings + future.crossings + (on_section ? 1 : 0);
    if (out.failed || past.end == End::open || future.end == End::open) {
        out.kind = TrajectoryKind::resident_timeout;
        return out;
    }
    if (past.end == End::well && future.end == End::well)
        out.kind = TrajectoryKind::isomerising;
    else if (past.end == End::dissociated && future.end == End::dissociated)
        out.kind = TrajectoryKind::nonreactive;
    else
        out.kind = out.section_crossings >= rules.roaming_crossings ? TrajectoryKind::roaming
                                                                    : TrajectoryKind::direct_dissociation;
    return out;
}

double ClassGrid::timeout_fraction() const
{
    long live = 0, timeouts = 0;
    for (int c : codes) {
        if (c < 0)
            continue;
        ++live;
        timeouts += c == static_cast<int>(TrajectoryKind::resident_timeout) ? 1 : 0;
    }
    return live ? static_cast<double>(timeouts) / live : 0.0;
}

ClassGrid classify_grid(const ModelParams& params, const SectionSpec& section, const ClassificationRules& rules,
                        const IntegratorSettings& integrator, int threads)
{
    const SeedGrid seeds = seed_grid(params, section);
    ClassGrid g;
    g.section = section;
    g.rules = rules;
    g.codes.assign(seeds.states.size(), -1);
    g.failed.assign(seeds.states.size(), 0);
    const long cells = static_cast<long>(seeds.states.size());
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (long k = 0; k < cells; ++k) {
        if (seeds.mask[k])
            continue;
        const TrajectoryClass c = classify_trajectory(params, PhaseState::from(seeds.states[k]), rules, integrator);
        g.codes[k] = c.code();
        g.failed[k] = c.failed ? 1 : 0;
    }
    return g;
}

}  // namespace roamscope
