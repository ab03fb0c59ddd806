#include "roamscope/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roamscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TrajectoryStatus from_stepper(StepperStatus s)
{
    switch (s) {
    case StepperStatus::finished:
    case StepperStatus::stopped_by_observer: return TrajectoryStatus::ok;
    case StepperStatus::step_underflow: return TrajectoryStatus::step_underflow;
    case StepperStatus::non_finite: return TrajectoryStatus::non_finite;
    case StepperStatus::too_many_steps: return TrajectoryStatus::too_many_steps;
    }
    return TrajectoryStatus::non_finite;
}

double ke_of(const FieldContext& ctx, const State4& y)
{
    const double r = y[0];
    return 0.5 * y[1] * y[1] / ctx.mu + 0.5 * y[3] * y[3] * (1.0 / (ctx.mu * r * r) + ctx.inv_I);
}

/// Per-step health check shared by the integrators.
struct StepMonitor {
    const FieldContext& ctx;
    TrajectoryStatus status = TrajectoryStatus::ok;
    double max_drift = 0.0;

    bool accept(const double* y)
    {
        if (!(y[0] > 0.0)) {
            status = TrajectoryStatus::collision;
            return false;
        }
        const State4 s{y[0], y[1], y[2], y[3]};
        const double drift = std::abs(ke_of(ctx, s) - kIsokineticEnergy);
        max_drift = std::max(max_drift, drift);
        if (drift > kConstraintDriftLimit) {
            status = TrajectoryStatus::constraint_drift;
            return false;
        }
        return true;
    }
};

struct DirectedField {
    const FieldContext& ctx;
    double sign;

    State4 operator()(double, const State4& y) const
    {
        State4 d = isokinetic_rate(ctx, y);
        for (double& v : d)
            v *= sign;
        return d;
    }
};

double direction_sign(Direction d) { return d == Direction::forward ? 1.0 : -1.0; }

}  // namespace

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

Direction direction_from_string(const std::string& s)
{
    if (s == "forward")
        return Direction::forward;
    if (s == "backward")
        return Direction::backward;
    throw std::invalid_argument("direction must be 'forward' or 'backward', got '" + s + "'");
}

void IntegratorSettings::validate() const
{
    auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-3; };
    if (!tol_ok(rel_tol))
        throw std::invalid_argument("rel_tol must lie in (0, 1e-3]");
    if (!tol_ok(abs_tol))
        throw std::invalid_argument("abs_tol must lie in (0, 1e-3]");
    if (!(t_max > 0.0))
        throw std::invalid_argument("t_max must be positive");
    if (!(max_step > 0.0))
        throw std::invalid_argument("max_step must be positive");
}

IntegratorSettings IntegratorSettings::precise() { return {}; }

IntegratorSettings IntegratorSettings::sweep()
{
    IntegratorSettings s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-10;
    return s;
}

std::string to_string(TrajectoryStatus s)
{
    switch (s) {
    case TrajectoryStatus::ok: return "ok";
    case TrajectoryStatus::step_underflow: return "step_underflow";
    case TrajectoryStatus::collision: return "collision";
    case TrajectoryStatus::constraint_drift: return "constraint_drift";
    case TrajectoryStatus::non_finite: return "non_finite";
    case TrajectoryStatus::too_many_steps: return "too_many_steps";
    }
    return "unknown";
}

std::string to_string(SectionKind k) { return k == SectionKind::theta ? "theta" : "radial"; }

State4 Trajectory::at(double t) const
{
    if (segments.empty())
        return initial;
    if (t <= segments.front().t0)
        return segments.front()(segments.front().t0);
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const DenseSegment<4>& s) { return v < s.t0; });
    const DenseSegment<4>& seg = *std::prev(it);
    return seg(std::min(t, seg.t1()));
}

Trajectory advance(const ModelParams& params, const PhaseState& start, const IntegratorSettings& settings)
{
    settings.validate();
    if (!(start.r > 0.0))
        throw DomainError("advance: initial r must be positive");
    const FieldContext ctx(params);
    Trajectory traj;
    traj.direction = settings.direction;
    traj.initial = start.packed();

    DirectedField rhs{ctx, direction_sign(settings.direction)};
    StepMonitor monitor{ctx};
    auto observer = [&](auto& step) {
        traj.segments.push_back(step.dense());
        return monitor.accept(step.y_new().data());
    };
    const auto res = dop853_integrate<4>(rhs, traj.initial, settings.t_max, settings.control(), observer);
    traj.status = monitor.status != TrajectoryStatus::ok ? monitor.status : from_stepper(res.status);
    traj.t_end = res.t;
    traj.final = res.y;
    traj.max_constraint_drift = monitor.max_drift;
    return traj;
}

FlowResult flow(const FieldContext& ctx, const State4& y0, double t, Direction dir, const StepControl& ctl)
{
    DirectedField rhs{ctx, direction_sign(dir)};
    StepMonitor monitor{ctx};
    auto observer = [&](auto& step) { return monitor.accept(step.y_new().data()); };
    const auto res = dop853_integrate<4>(rhs, y0, t, ctl, observer);
    FlowResult out;
    out.status = monitor.status != TrajectoryStatus::ok ? monitor.status : from_stepper(res.status);
    out.state = res.y;
    return out;
}

SensitivityFlow flow_with_sensitivity(const FieldContext& ctx, const State4& y0, double t, const StepControl& ctl)
{
    using Vec20 = VecN<20>;
    auto rhs = [&ctx](double, const Vec20& z) {
        const State4 y{z[0], z[1], z[2], z[3]};
        const State4 d = isokinetic_rate(ctx, y);
        const Matrix4 J = isokinetic_jacobian(ctx, y);
        Vec20 out;
        out[0] = d[0];
        out[1] = d[1];
        out[2] = d[2];
        out[3] = d[3];
        // Phi stored row-major after the state
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    acc += J(i, k) * z[4 + 4 * k + j];
                out[4 + 4 * i + j] = acc;
            }
        return out;
    };
    Vec20 z0{};
    for (int i = 0; i < 4; ++i)
        z0[i] = y0[i];
    for (int i = 0; i < 4; ++i)
        z0[4 + 5 * i] = 1.0;
    StepMonitor monitor{ctx};
    auto observer = [&](auto& step) { return monitor.accept(step.y_new().data()); };
    const auto res = dop853_integrate<20>(rhs, z0, t, ctl, observer);
    SensitivityFlow out;
    out.status = monitor.status != TrajectoryStatus::ok ? monitor.status : from_stepper(res.status);
    for (int i = 0; i < 4; ++i)
        out.state[i] = res.y[i];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.stm(i, j) = res.y[4 + 4 * i + j];
    return out;
}

QuadratureResult ld_quadrature(const FieldContext& ctx, const State4& y0, double tau, Direction dir,
                               const RateIntegrand& integrand, const StepControl& ctl)
{
    if (tau < 0.0)
        throw std::invalid_argument("ld_quadrature: tau must be non-negative");
    QuadratureResult out;
    if (tau == 0.0)
        return out;
    using Vec5 = VecN<5>;
    const double sign = direction_sign(dir);
    auto rhs = [&](double, const Vec5& z) {
        const State4 y{z[0], z[1], z[2], z[3]};
        const State4 d = isokinetic_rate(ctx, y);
        return Vec5{sign * d[0], sign * d[1], sign * d[2], sign * d[3], std::abs(integrand(y, d))};
    };
    const Vec5 z0{y0[0], y0[1], y0[2], y0[3], 0.0};
    StepMonitor monitor{ctx};
    auto observer = [&](auto& step) { return monitor.accept(step.y_new().data()); };
    const auto res = dop853_integrate<5>(rhs, z0, tau, ctl, observer);
    out.status = monitor.status != TrajectoryStatus::ok ? monitor.status : from_stepper(res.status);
    out.value = out.status == TrajectoryStatus::ok ? res.y[4] : kFailedDescriptor;
    return out;
}

TrajectoryStatus walk(const FieldContext& ctx, const State4& y0, const IntegratorSettings& settings,
                      const std::function<bool(const StepView&)>& observer)
{
    settings.validate();
    DirectedField rhs{ctx, direction_sign(settings.direction)};
    StepMonitor monitor{ctx};
    bool stopped = false;
    auto on_step = [&](auto& step) {
        if (!monitor.accept(step.y_new().data()))
            return false;
        const StepView view{step.t_old(), step.t_new(), step.y_old(), step.y_new(), [&step] { return step.dense(); }};
        stopped = !observer(view);
        return !stopped;
    };
    const auto res = dop853_integrate<4>(rhs, y0, settings.t_max, settings.control(), on_step);
    if (monitor.status != TrajectoryStatus::ok)
        return monitor.status;
    return from_stepper(res.status);
}

double SectionCondition::residual(const State4& y) const
{
    if (kind == SectionKind::radial)
        return y[0] - level;
    const double w = y[2] - level;
    return w - kTwoPi * std::floor(w / kTwoPi);
}

double refine_crossing(const DenseSegment<4>& seg, const std::function<double(const State4&)>& g, double ta,
                       double ga, double tb, double gb, double tol)
{
    // Illinois variant of regula falsi; falls back to bisection when stalled.
    int side = 0;
    double tc = ta;
    for (int it = 0; it < 200; ++it) {
        tc = (ta * gb - tb * ga) / (gb - ga);
        if (!(tc > ta && tc < tb))
            tc = 0.5 * (ta + tb);
        const double gc = g(seg(tc));
        if (std::abs(gc) < tol || (tb - ta) < 1e-15 * std::max(1.0, std::abs(tb)))
            return tc;
        if ((gc > 0.0) == (gb > 0.0)) {
            tb = tc;
            gb = gc;
            if (side == -1)
                ga *= 0.5;
            side = -1;
        } else {
            ta = tc;
            ga = gc;
            if (side == 1)
                gb *= 0.5;
            side = 1;
        }
    }
    return tc;
}

CrossingReport section_crossings(const ModelParams& params, const PhaseState& start, const SectionCondition& section,
                                 const IntegratorSettings& settings)
{
    settings.validate();
    const FieldContext ctx(params);
    const double sign = direction_sign(settings.direction);
    DirectedField rhs{ctx, sign};
    StepMonitor monitor{ctx};
    CrossingReport report;
    const std::size_t coord = section.kind == SectionKind::radial ? 0 : 2;

    auto observer = [&](auto& step) {
        const State4& ya = step.y_old();
        const State4& yb = step.y_new();
        // Radial sections cross at most once per monotone piece; theta
        // sections once per 2 pi winding, and a long step may hold several.
        std::vector<double> targets;
        if (section.kind == SectionKind::radial) {
            const double ga = ya[0] - section.level, gb = yb[0] - section.level;
            // physical r' > 0: increasing in elapsed time forward, decreasing backward
            if (sign > 0 ? (ga < 0.0 && gb >= 0.0) : (ga > 0.0 && gb <= 0.0))
                targets.push_back(section.level);
        } else {
            const double wa = std::floor((ya[2] - section.level) / kTwoPi);
            const double wb = std::floor((yb[2] - section.level) / kTwoPi);
            if (sign > 0)
                for (double w = wa + 1; w <= wb; ++w)
                    targets.push_back(section.level + kTwoPi * w);
            else
                for (double w = wa; w > wb; --w)
                    targets.push_back(section.level + kTwoPi * w);
            // theta exactly on the level at step start: not a new crossing
            if (!targets.empty() && ya[2] == targets.front())
                targets.erase(targets.begin());
        }
        for (const double target : targets) {
            const auto& seg = step.dense();
            auto g = [&](const State4& y) { return y[coord] - target; };
            const double tc = refine_crossing(seg, g, step.t_old(), g(ya), step.t_new(), g(yb));
            const State4 yc = seg(tc);
            const State4 rate = isokinetic_rate(ctx, yc);
            SectionEvent ev;
            ev.state = PhaseState::from(yc, sign * tc);
            ev.index = static_cast<int>(report.events.size());
            ev.residual = g(yc);
            ev.grazing = std::abs(rate[coord]) < 1e-8;
            // direction must hold strictly in physical time
            if (rate[coord] > 0.0 || ev.grazing)
                report.events.push_back(ev);
        }
        return monitor.accept(yb.data());
    };
    const auto res = dop853_integrate<4>(rhs, start.packed(), settings.t_max, settings.control(), observer);
    report.status = monitor.status != TrajectoryStatus::ok ? monitor.status : from_stepper(res.status);
    return report;
}

}  // namespace roamscope
