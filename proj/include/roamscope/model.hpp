#pragma once

// Chesnavich's CH4+ potential energy surface: a rigid CH3+ core and a mobile
// H atom in body-fixed polar coordinates (r, theta).
//
// Units are native throughout: kcal/mol, u, Angstrom, rad. No conversion
// constant is applied, so time is the derived unit of this system.

#include <stdexcept>
#include <string>
#include <vector>

namespace roamscope {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ModelParams {
    double m_H = 1.007825;           // u
    double m_CH3 = 3.0 * 1.007825 + 12.0;
    double I_CH3 = 2.373409;         // u A^2
    double D_e = 47.0;               // kcal/mol
    double c1 = 7.37;
    double c2 = 1.61;
    double r_e = 1.1;                // A
    double U_e = 55.0;               // kcal/mol
    double a = 1.0;                  // A^-2

    /// Throws DomainError naming the first offending field.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// mu = m_CH3 m_H / (m_CH3 + m_H)
double reduced_mass(const ModelParams& params);

/// Value and first/second partials of U at one point.
struct PotentialJet {
    double u = 0.0;
    double dr = 0.0;
    double dtheta = 0.0;
    double drr = 0.0;
    double drtheta = 0.0;
    double dthetatheta = 0.0;
};

struct PotentialGradient {
    double dr = 0.0;
    double dtheta = 0.0;
};

/// U(r, theta) = U_CH(r) + U_coup(r, theta). Throws DomainError for r <= 0.
double eval_U(const ModelParams& params, double r, double theta);
PotentialGradient grad_U(const ModelParams& params, double r, double theta);
PotentialJet potential_jet(const ModelParams& params, double r, double theta);

// Unchecked kernels used by the integrators. Caller guarantees r > 0.
PotentialJet potential_jet_unchecked(const ModelParams& params, double r, double theta) noexcept;
void potential_and_gradient_unchecked(const ModelParams& params, double r, double theta,
                                      double& u, double& dr, double& dtheta) noexcept;

enum class StationaryKind { well, saddle, maximum, degenerate };

std::string to_string(StationaryKind kind);

struct StationaryPoint {
    std::string label;  // q0+, q1+, q~1+, q2+
    double r = 0.0;
    double theta = 0.0;  // representative in [0, pi/2]
    double energy = 0.0;
    double gradient_norm = 0.0;
    StationaryKind kind = StationaryKind::degenerate;
};

/// Hessian eigenvalues with magnitude below this are reported as degenerate.
inline constexpr double kHessianDegeneracyThreshold = 1e-8;

/// Newton iteration on grad U from a seed grid, reduced modulo the four-fold
/// symmetry. Returns the well, the outer and inner isomerisation saddles and
/// the local maximum, in that order. Throws std::runtime_error (with the
/// residuals of every seed) if Newton fails everywhere.
std::vector<StationaryPoint> stationary_points(const ModelParams& params);

}  // namespace roamscope
