#include "roamscope/dynamics.hpp"

#include <cmath>
#include <string>

namespace roamscope {

namespace {

void require_radius(double r)
{
    if (!(r > 0.0))
        throw DomainError("phase state with non-positive r = " + std::to_string(r));
}

double guarded_potential(const ModelParams& params, double r, double theta)
{
    const double u = eval_U(params, r, theta);
    if (std::abs(u) > 700.0)
        throw DomainError("|U| = " + std::to_string(std::abs(u)) + " puts e^U outside double range");
    return u;
}

}  // namespace

double kinetic_energy(const ModelParams& params, const PhaseState& s)
{
    require_radius(s.r);
    const double mu = reduced_mass(params);
    return 0.5 * s.p_r * s.p_r / mu + 0.5 * s.p_theta * s.p_theta * angular_inertia_factor(params, mu, s.r);
}

double hamiltonian_micro(const ModelParams& params, const PhaseState& s)
{
    return kinetic_energy(params, s) + eval_U(params, s.r, s.theta);
}

double isokinetic_K(const ModelParams& params, double r, double pi_r, double theta, double pi_theta)
{
    require_radius(r);
    const double u = guarded_potential(params, r, theta);
    const double mu = reduced_mass(params);
    const double quad = pi_r * pi_r / mu + pi_theta * pi_theta * angular_inertia_factor(params, mu, r);
    return 0.5 * std::exp(u) * quad - 0.5 * std::exp(-u);
}

ScaledMomenta momenta_to_pi(const ModelParams& params, const PhaseState& s)
{
    require_radius(s.r);
    const double w = std::exp(-guarded_potential(params, s.r, s.theta));
    return {w * s.p_r, w * s.p_theta};
}

PhaseState pi_to_momenta(const ModelParams& params, double r, double pi_r, double theta, double pi_theta)
{
    require_radius(r);
    const double w = std::exp(guarded_potential(params, r, theta));
    return {r, w * pi_r, theta, w * pi_theta, 0.0};
}

State4 isokinetic_rate(const FieldContext& ctx, const State4& y) noexcept
{
    const double r = y[0], pr = y[1], th = y[2], pt = y[3];
    double u, ur, ut;
    potential_and_gradient_unchecked(ctx.params, r, th, u, ur, ut);
    const double mur2 = ctx.mu * r * r;
    const double rdot = pr / ctx.mu;
    const double thdot = pt * (1.0 / mur2 + ctx.inv_I);
    // dU/dt over 2 KE: equals dU/dt on the shell and keeps KE a first
    // integral off it, so integration error is not amplified by e^{2 dU}
    const double ke2 = pr * rdot + pt * thdot;
    const double friction = (ur * rdot + ut * thdot) / ke2;
    return {rdot,
            pr * friction + pt * pt / (mur2 * r) - ur,
            thdot,
            pt * friction - ut};
}

Matrix4 isokinetic_jacobian(const FieldContext& ctx, const State4& y) noexcept
{
    const double r = y[0], pr = y[1], th = y[2], pt = y[3];
    const double mu = ctx.mu;
    const PotentialJet j = potential_jet_unchecked(ctx.params, r, th);

    const double G = 1.0 / (mu * r * r) + ctx.inv_I;
    const double G_r = -2.0 / (mu * r * r * r);
    const double rdot = pr / mu;
    const double thdot = pt * G;
    const double s = j.dr * rdot + j.dtheta * thdot;

    // partials of s = U_r rdot + U_theta thdot
    const double s_r = j.drr * rdot + j.drtheta * thdot + j.dtheta * pt * G_r;
    const double s_pr = j.dr / mu;
    const double s_th = j.drtheta * rdot + j.dthetatheta * thdot;
    const double s_pt = j.dtheta * G;

    // friction f = s / (2 KE), 2 KE = pr^2/mu + pt^2 G
    const double k2 = pr * rdot + pt * thdot;
    const double f = s / k2;
    const double f_r = (s_r - f * pt * pt * G_r) / k2;
    const double f_pr = (s_pr - f * 2.0 * pr / mu) / k2;
    const double f_th = s_th / k2;
    const double f_pt = (s_pt - f * 2.0 * pt * G) / k2;

    const double mur3 = mu * r * r * r;

    Matrix4 J;
    J(0, 0) = 0.0;
    J(0, 1) = 1.0 / mu;
    J(0, 2) = 0.0;
    J(0, 3) = 0.0;

    J(1, 0) = pr * f_r - 3.0 * pt * pt / (mur3 * r) - j.drr;
    J(1, 1) = f + pr * f_pr;
    J(1, 2) = pr * f_th - j.drtheta;
    J(1, 3) = pr * f_pt + 2.0 * pt / mur3;

    J(2, 0) = pt * G_r;
    J(2, 1) = 0.0;
    J(2, 2) = 0.0;
    J(2, 3) = G;

    J(3, 0) = pt * f_r - j.drtheta;
    J(3, 1) = pt * f_pr;
    J(3, 2) = pt * f_th - j.dthetatheta;
    J(3, 3) = f + pt * f_pt;
    return J;
}

FieldSample vector_field_isokinetic(const ModelParams& params, const PhaseState& s)
{
    require_radius(s.r);
    const FieldContext ctx(params);
    FieldSample out;
    out.rate = isokinetic_rate(ctx, s.packed());
    out.constraint_residual = kinetic_energy(params, s) - kIsokineticEnergy;
    out.off_constraint = std::abs(out.constraint_residual) > kConstraintDriftLimit;
    return out;
}

Matrix4 jacobian_isokinetic(const ModelParams& params, const PhaseState& s)
{
    require_radius(s.r);
    const FieldContext ctx(params);
    return isokinetic_jacobian(ctx, s.packed());
}

double max_angular_momentum(const ModelParams& params, double r)
{
    require_radius(r);
    const double mu = reduced_mass(params);
    return 1.0 / std::sqrt(angular_inertia_factor(params, mu, r));
}

std::optional<PhaseState> try_resolve_momentum(const ModelParams& params, double r, double theta,
                                               FixedMomentum fixed, double value, int sign) noexcept
{
    if (!(r > 0.0) || !std::isfinite(value))
        return std::nullopt;
    const double mu = reduced_mass(params);
    const double G = angular_inertia_factor(params, mu, r);
    const double dir = sign < 0 ? -1.0 : 1.0;
    PhaseState s{r, 0.0, theta, 0.0, 0.0};
    if (fixed == FixedMomentum::p_r) {
        const double budget = 1.0 - value * value / mu;  // = p_theta^2 G
        if (budget < 0.0)
            return std::nullopt;
        s.p_r = value;
        s.p_theta = dir * std::sqrt(budget / G);
    } else {
        const double budget = 1.0 - value * value * G;  // = p_r^2 / mu
        if (budget < 0.0)
            return std::nullopt;
        s.p_theta = value;
        s.p_r = dir * std::sqrt(budget * mu);
    }
    return s;
}

PhaseState resolve_momentum_on_constraint(const ModelParams& params, double r, double theta,
                                          FixedMomentum fixed, double value, int sign)
{
    require_radius(r);
    if (auto s = try_resolve_momentum(params, r, theta, fixed, value, sign))
        return *s;
    throw OutsideEnergyShell(std::string("fixed ") + (fixed == FixedMomentum::p_r ? "p_r" : "p_theta") + " = "
                             + std::to_string(value) + " lies outside the KE = 1/2 energy shell at r = "
                             + std::to_string(r));
}

}  // namespace roamscope
