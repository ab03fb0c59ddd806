#pragma once

// The two isokinetic periodic orbits: the inner orbit bounding the wells
// (parametrised by a cosine series for r and an odd polynomial for p_r) and
// the outer, nearly circular orbit on the centrifugal barrier.

#include "roamscope/dynamics.hpp"
#include "roamscope/integrate.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace roamscope {

enum class OrbitKind { inner_parametrised, outer_circular };
enum class Branch { plus, minus };

std::string to_string(OrbitKind k);
std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct OrbitCurve {
    OrbitKind kind = OrbitKind::inner_parametrised;
    std::array<double, 6> c{};  // r(theta) = sum c_k cos(2 k theta)
    std::array<double, 6> d{};  // p_r(theta) = sum d_k theta^(2k+1) on (-pi/2, pi/2], period pi
    double r_out = 0.0;
    double period = 0.0;        // 0 when not yet known
    Branch branch = Branch::plus;

    int branch_sign() const { return branch == Branch::plus ? 1 : -1; }

    double rbar(double theta) const;
    double rbar_prime(double theta) const;
    double pbar_r(double theta) const;
    /// Derivative on the open interval; the slope jump at theta = pi/2 + k pi is ignored.
    double pbar_r_prime(double theta) const;

    /// On-curve state with p_theta recovered from KE = 1/2 and the branch sign.
    PhaseState state_at(const ModelParams& params, double theta) const;
};

/// Reduces theta into (-pi/2, pi/2] by multiples of pi.
double reduce_half_period(double theta);

/// The tabulated inner-orbit fit (8-digit coefficients). For Branch::minus
/// the p_r polynomial is mirrored (d -> -d), as forced by theta -> -theta.
OrbitCurve tabulated_inner_orbit(Branch branch = Branch::plus);

double inner_rbar(double theta);
double inner_rbar_prime(double theta);
double inner_pbar_r(double theta);

class NoCentrifugalBarrier : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Radius of the rotationally symmetric orbit: root of
/// p_theta^2 / (mu r^3) - dU/dr = 0 with p_theta^2 = 1 / (1/(mu r^2) + 1/I).
double outer_radius(const ModelParams& params);

/// Circular orbit at outer_radius with its period 2 pi / theta'.
OrbitCurve outer_orbit(const ModelParams& params, Branch branch = Branch::plus);

struct ShootingOptions {
    int max_iterations = 40;
    double tolerance = 1e-10;
    StepControl control{1e-13, 1e-13};
};

struct RefinedOrbit {
    OrbitCurve curve;            // refit coefficients, converged period
    std::vector<State4> nodes;   // segment start states, node 0 on theta = theta_0
    double period = 0.0;
    double matching_norm = 0.0;
    double condition_number = 0.0;
    int iterations = 0;
    std::vector<double> segment_residuals;

    int n_segments() const { return static_cast<int>(nodes.size()); }
};

class ShootingDivergence : public std::runtime_error {
public:
    ShootingDivergence(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), segment_residuals(std::move(residuals))
    {
    }
    std::vector<double> segment_residuals;
};

/// Multiple-shooting Newton on segment endpoints and period, closing the
/// orbit after one full turn in theta. Converged orbits are refit by least
/// squares (inner kind only). n_segments >= 20 is required for the inner orbit.
RefinedOrbit refine_orbit(const ModelParams& params, const OrbitCurve& initial, int n_segments,
                          const ShootingOptions& options = {});

struct FloquetSpectrum {
    std::vector<std::complex<double>> multipliers;  // sorted by decreasing modulus
    std::vector<double> log10_moduli;
    double log10_max = 0.0;
    /// Change of the orthogonal basis over the final period of the periodic
    /// QR iteration; small when the triangular form has settled.
    double basis_drift = 0.0;
    Matrix4 monodromy = Matrix4::Identity();  // plain product, for inspection only
};

enum class MomentumChart { physical, scaled };

/// Monodromy spectrum from the ordered product of per-segment fundamental
/// matrices. Each factor is split into its action on the tangent space of
/// KE = 1/2 and the normal direction; the tangent part goes through a
/// periodic QR iteration so the large and small moduli survive rounding.
/// The scaled chart uses pi = e^{-U} p.
FloquetSpectrum floquet(const ModelParams& params, const RefinedOrbit& orbit,
                        MomentumChart chart = MomentumChart::physical, const StepControl& ctl = {1e-13, 1e-13});

/// Plain-text block: kind, period, branch, then c0..c5 and d0..d5 or r_out.
std::string serialize_orbit(const OrbitCurve& curve);
OrbitCurve parse_orbit(const std::string& text);

}  // namespace roamscope
