#include "roamscope/ld.hpp"

#include <cmath>
#include <stdexcept>

namespace roamscope {

std::string to_string(Integrand i)
{
    switch (i) {
    case Integrand::inner_f1_rate: return "inner-f1-rate";
    case Integrand::inner_f2_rate: return "inner-f2-rate";
    case Integrand::radial_rate: return "radial-rate";
    case Integrand::user: return "user";
    }
    return "unknown";
}

Integrand integrand_from_string(const std::string& s)
{
    if (s == "inner-f1-rate")
        return Integrand::inner_f1_rate;
    if (s == "inner-f2-rate")
        return Integrand::inner_f2_rate;
    if (s == "radial-rate")
        return Integrand::radial_rate;
    if (s == "user")
        return Integrand::user;
    throw std::invalid_argument("unknown integrand '" + s + "'");
}

void DescriptorSpec::validate() const
{
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("descriptor tau must be finite and non-negative");
    if (integrand == Integrand::user && !user_rate)
        throw std::invalid_argument("user integrand requested without a rate function");
}

DescriptorSpec DescriptorSpec::inner(double tau)
{
    DescriptorSpec s;
    s.integrand = Integrand::inner_f1_rate;
    s.direction = Direction::backward;
    s.tau = tau;
    return s;
}

DescriptorSpec DescriptorSpec::outer(double tau)
{
    DescriptorSpec s;
    s.integrand = Integrand::radial_rate;
    s.direction = Direction::forward;
    s.tau = tau;
    return s;
}

RateIntegrand make_integrand(const DescriptorSpec& spec)
{
    switch (spec.integrand) {
    case Integrand::inner_f1_rate: {
        const OrbitCurve c = spec.curve;
        return [c](const State4& y, const State4& d) { return std::abs(d[0] - c.rbar_prime(y[2]) * d[2]); };
    }
    case Integrand::inner_f2_rate: {
        const OrbitCurve c = spec.curve;
        return [c](const State4& y, const State4& d) { return std::abs(d[1] - c.pbar_r_prime(y[2]) * d[2]); };
    }
    case Integrand::radial_rate:
        return [](const State4&, const State4& d) { return std::abs(d[0]); };
    case Integrand::user:
        return spec.user_rate;
    }
    throw std::invalid_argument("make_integrand: bad integrand");
}

double ld_value(const FieldContext& ctx, const State4& y, double tau, Direction dir, const RateIntegrand& integrand,
                const StepControl& ctl)
{
    return ld_quadrature(ctx, y, tau, dir, integrand, ctl).value;
}

double ld_value(const ModelParams& params, const PhaseState& state, const DescriptorSpec& spec, const StepControl& ctl)
{
    spec.validate();
    if (!(state.r > 0.0))
        throw DomainError("ld_value: r must be positive");
    const FieldContext ctx(params);
    return ld_value(ctx, state.packed(), spec.tau, spec.direction, make_integrand(spec), ctl);
}

std::pair<double, double> equivalent_integrands_check(const ModelParams& params, const PhaseState& state, double tau,
                                                      const StepControl& ctl)
{
    DescriptorSpec f1 = DescriptorSpec::inner(tau);
    DescriptorSpec f2 = f1;
    f2.integrand = Integrand::inner_f2_rate;
    return {ld_value(params, state, f1, ctl), ld_value(params, state, f2, ctl)};
}

}  // namespace roamscope
