#pragma once

// Lagrangian descriptors built from the rate of change of a function that
// vanishes on a periodic orbit: LD = integral over tau of |df/dt|.

#include "roamscope/integrate.hpp"
#include "roamscope/orbits.hpp"

#include <string>
#include <utility>

namespace roamscope {

enum class Integrand {
    inner_f1_rate,  // |r' - rbar'(theta) theta'|, unstable manifold of the inner orbit (backward)
    inner_f2_rate,  // |p_r' - pbar_r'(theta) theta'|, same manifold
    radial_rate,    // |r'|, stable manifold of the outer orbit (forward)
    user,
};

std::string to_string(Integrand i);
Integrand integrand_from_string(const std::string& s);

struct DescriptorSpec {
    Integrand integrand = Integrand::radial_rate;
    Direction direction = Direction::forward;
    double tau = 8.0;
    /// Curve for the inner-f*-rate integrands; the tabulated plus branch by default.
    OrbitCurve curve = tabulated_inner_orbit();
    /// Only used with Integrand::user; must return a non-negative value.
    RateIntegrand user_rate;

    void validate() const;

    static DescriptorSpec inner(double tau);
    static DescriptorSpec outer(double tau);
};

RateIntegrand make_integrand(const DescriptorSpec& spec);

/// Descriptor value; +inf when the trajectory fails.
double ld_value(const ModelParams& params, const PhaseState& state, const DescriptorSpec& spec,
                const StepControl& ctl = IntegratorSettings::sweep().control());

/// Same, for sweeps that share one field context and integrand.
double ld_value(const FieldContext& ctx, const State4& y, double tau, Direction dir, const RateIntegrand& integrand,
                const StepControl& ctl);

/// Backward f1-rate and f2-rate descriptors from the same state.
std::pair<double, double> equivalent_integrands_check(const ModelParams& params, const PhaseState& state, double tau,
                                                      const StepControl& ctl = IntegratorSettings::sweep().control());

}  // namespace roamscope
