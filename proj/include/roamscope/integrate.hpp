#pragma once

// Trajectory integration of the isokinetic flow: dense trajectories,
// final-state flows with sensitivities, Lagrangian-descriptor quadrature and
// surface-of-section crossings.

#include "roamscope/dop853.hpp"
#include "roamscope/dynamics.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace roamscope {

enum class Direction { forward, backward };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct IntegratorSettings {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double t_max = 30.0;
    Direction direction = Direction::forward;

    /// Tolerances must lie in (0, 1e-3], t_max > 0, max_step > 0.
    void validate() const;
    StepControl control() const { return {rel_tol, abs_tol, max_step, 5'000'000}; }

    /// Orbit and monodromy work: 1e-12.
    static IntegratorSettings precise();
    /// Grid sweeps: 1e-10.
    static IntegratorSettings sweep();
};

enum class TrajectoryStatus { ok, step_underflow, collision, constraint_drift, non_finite, too_many_steps };

std::string to_string(TrajectoryStatus s);

/// Dense trajectory over elapsed time [0, t_end]. For backward trajectories
/// elapsed time runs into the past: at(t) is the state at physical time -t.
struct Trajectory {
    Direction direction = Direction::forward;
    TrajectoryStatus status = TrajectoryStatus::ok;
    double t_end = 0.0;
    State4 initial{};
    State4 final{};
    double max_constraint_drift = 0.0;
    std::vector<DenseSegment<4>> segments;

    bool ok() const { return status == TrajectoryStatus::ok; }
    State4 at(double t) const;
};

/// Error-controlled solution from `start` over settings.t_max in
/// settings.direction, with dense output.
Trajectory advance(const ModelParams& params, const PhaseState& start, const IntegratorSettings& settings);

struct FlowResult {
    TrajectoryStatus status = TrajectoryStatus::ok;
    State4 state{};
    bool ok() const { return status == TrajectoryStatus::ok; }
};

/// Final state after time t (>= 0) along the isokinetic flow.
FlowResult flow(const FieldContext& ctx, const State4& y0, double t, Direction dir, const StepControl& ctl);

struct SensitivityFlow {
    TrajectoryStatus status = TrajectoryStatus::ok;
    State4 state{};
    Matrix4 stm = Matrix4::Identity();
    bool ok() const { return status == TrajectoryStatus::ok; }
};

/// Final state and fundamental matrix d(state)/d(y0) after forward time t,
/// integrating the variational equations with the analytic Jacobian.
SensitivityFlow flow_with_sensitivity(const FieldContext& ctx, const State4& y0, double t, const StepControl& ctl);

/// Non-negative rate integrand |df/dt| evaluated from the state and its
/// (physical, forward-time) rate of change.
using RateIntegrand = std::function<double(const State4& y, const State4& rate)>;

/// Sentinel returned for cells whose trajectory failed.
inline constexpr double kFailedDescriptor = std::numeric_limits<double>::infinity();

struct QuadratureResult {
    double value = 0.0;
    TrajectoryStatus status = TrajectoryStatus::ok;
};

/// Integrates the flow augmented with y5' = integrand over elapsed time tau
/// in `dir`; returns y5(tau). Failed trajectories give kFailedDescriptor.
QuadratureResult ld_quadrature(const FieldContext& ctx, const State4& y0, double tau, Direction dir,
                               const RateIntegrand& integrand, const StepControl& ctl);

enum class SectionKind {
    theta,   // theta = level (mod 2 pi), crossed with theta' > 0
    radial,  // r = level, crossed with r' > 0
};

std::string to_string(SectionKind k);

struct SectionCondition {
    SectionKind kind = SectionKind::radial;
    double level = 3.6;

    /// Signed distance to the section; for theta sections relative to the
    /// nearest branch level + 2 pi k at or below theta.
    double residual(const State4& y) const;
};

struct SectionEvent {
    PhaseState state;
    int index = 0;
    double residual = 0.0;
    bool grazing = false;
};

struct CrossingReport {
    std::vector<SectionEvent> events;
    TrajectoryStatus status = TrajectoryStatus::ok;
};

/// All crossings in (0, t_max] in the section's direction, refined on the
/// dense output to |g| < 1e-10. A start point lying on the section is not an event.
CrossingReport section_crossings(const ModelParams& params, const PhaseState& start, const SectionCondition& section,
                                 const IntegratorSettings& settings);

/// One accepted step of a walk; dense() builds the interpolant on demand.
struct StepView {
    double t0 = 0.0;  // elapsed time
    double t1 = 0.0;
    State4 y0{};
    State4 y1{};
    std::function<DenseSegment<4>()> dense;
};

/// Integrates from y0 in settings.direction, calling `observer` after every
/// accepted step until it returns false or t_max is reached.
TrajectoryStatus walk(const FieldContext& ctx, const State4& y0, const IntegratorSettings& settings,
                      const std::function<bool(const StepView&)>& observer);

/// Locates t in [seg.t0, seg.t1] with g(seg(t)) = 0 given a sign change at
/// the ends; Illinois false position with bisection safeguard.
double refine_crossing(const DenseSegment<4>& seg, const std::function<double(const State4&)>& g, double ta,
                       double ga, double tb, double gb, double tol = 1e-10);

}  // namespace roamscope
