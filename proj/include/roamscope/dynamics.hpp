#pragma once

// Microcanonical and isokinetic Hamiltonians for the Chesnavich model, the
// constant-kinetic-energy constraint and the isokinetic equations of motion
// written in the physical momenta (r, p_r, theta, p_theta).

#include "roamscope/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>

namespace roamscope {

/// Packed phase-space vector in the order (r, p_r, theta, p_theta).
using State4 = std::array<double, 4>;
using Matrix4 = Eigen::Matrix4d;

struct PhaseState {
    double r = 1.0;
    double p_r = 0.0;
    double theta = 0.0;
    double p_theta = 0.0;
    double t = 0.0;

    State4 packed() const { return {r, p_r, theta, p_theta}; }
    static PhaseState from(const State4& y, double t = 0.0) { return {y[0], y[1], y[2], y[3], t}; }
};

/// Kinetic energy fixed by the thermostat.
inline constexpr double kIsokineticEnergy = 0.5;
/// Trajectories whose |KE - 1/2| exceeds this are flagged invalid.
inline constexpr double kConstraintDriftLimit = 1e-6;

/// Inverse effective moment 1/(mu r^2) + 1/I_CH3 multiplying p_theta^2.
inline double angular_inertia_factor(const ModelParams& p, double mu, double r)
{
    return 1.0 / (mu * r * r) + 1.0 / p.I_CH3;
}

double hamiltonian_micro(const ModelParams& params, const PhaseState& s);
double kinetic_energy(const ModelParams& params, const PhaseState& s);

/// Isokinetic Hamiltonian in the scaled momenta pi = e^{-U} p.
/// Throws DomainError if |U| > 700 (e^U leaves double range).
double isokinetic_K(const ModelParams& params, double r, double pi_r, double theta, double pi_theta);

struct ScaledMomenta {
    double pi_r = 0.0;
    double pi_theta = 0.0;
};

ScaledMomenta momenta_to_pi(const ModelParams& params, const PhaseState& s);
PhaseState pi_to_momenta(const ModelParams& params, double r, double pi_r, double theta, double pi_theta);

/// Cached model constants for the inner loops.
struct FieldContext {
    ModelParams params;
    double mu = 0.0;
    double inv_I = 0.0;

    explicit FieldContext(const ModelParams& p) : params(p), mu(reduced_mass(p)), inv_I(1.0 / p.I_CH3) {}
};

/// Isokinetic equations of motion. Off the KE = 1/2 surface the friction
/// dU/dt is divided by 2 KE (Gaussian isokinetic form), which leaves the
/// shell dynamics unchanged and makes KE conserved everywhere.
/// No domain checks (r > 0 is the caller's responsibility).
State4 isokinetic_rate(const FieldContext& ctx, const State4& y) noexcept;

/// Analytic partial derivatives of isokinetic_rate.
Matrix4 isokinetic_jacobian(const FieldContext& ctx, const State4& y) noexcept;

struct FieldSample {
    State4 rate{};
    /// KE - 1/2 at the evaluated state.
    double constraint_residual = 0.0;
    /// True when |KE - 1/2| > kConstraintDriftLimit.
    bool off_constraint = false;
};

/// Checked entry point: throws DomainError for r <= 0, reports constraint violation.
FieldSample vector_field_isokinetic(const ModelParams& params, const PhaseState& s);
Matrix4 jacobian_isokinetic(const ModelParams& params, const PhaseState& s);

enum class FixedMomentum { p_r, p_theta };

class OutsideEnergyShell : public DomainError {
public:
    using DomainError::DomainError;
};

/// Fixes one momentum and solves KE = 1/2 for the other; `sign` (+1/-1)
/// selects the root. Throws OutsideEnergyShell when the fixed momentum alone
/// exceeds the kinetic budget.
PhaseState resolve_momentum_on_constraint(const ModelParams& params, double r, double theta,
                                          FixedMomentum fixed, double value, int sign);

/// Non-throwing variant for grid seeding.
std::optional<PhaseState> try_resolve_momentum(const ModelParams& params, double r, double theta,
                                               FixedMomentum fixed, double value, int sign) noexcept;

/// Largest |p_theta| allowed at radius r (p_r = 0).
double max_angular_momentum(const ModelParams& params, double r);

}  // namespace roamscope
