#include "roamscope/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace roamscope {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(std::string("model parameter ") + name + " must be positive and finite");
}

void require_radius(double r)
{
    if (!(r > 0.0))
        throw DomainError("potential evaluated at non-positive r = " + std::to_string(r));
}

}  // namespace

void ModelParams::validate() const
{
    require_positive(m_H, "m_H");
    require_positive(m_CH3, "m_CH3");
    require_positive(I_CH3, "I_CH3");
    require_positive(D_e, "D_e");
    require_positive(r_e, "r_e");
    require_positive(U_e, "U_e");
    require_positive(a, "a");
    if (!(c1 > 6.0) || !std::isfinite(c1))
        throw DomainError("model parameter c1 must exceed 6");
    if (!std::isfinite(c2))
        throw DomainError("model parameter c2 must be finite");
}

double reduced_mass(const ModelParams& params)
{
    return params.m_CH3 * params.m_H / (params.m_CH3 + params.m_H);
}

PotentialJet potential_jet_unchecked(const ModelParams& p, double r, double theta) noexcept
{
    const double pref = p.D_e / (p.c1 - 6.0);
    const double rep = 2.0 * (3.0 - p.c2);
    const double b6 = 4.0 * p.c2 - p.c1 * p.c2 + p.c1;
    const double b4 = (p.c1 - 6.0) * p.c2;

    const double x = r / p.r_e;
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    const double ix4 = ix2 * ix2;
    const double ix6 = ix4 * ix2;
    const double ex = std::exp(p.c1 * (1.0 - x));

    const double uch = pref * (rep * ex - b6 * ix6 - b4 * ix4);
    const double uch_r = pref / p.r_e * (-rep * p.c1 * ex + 6.0 * b6 * ix6 * ix + 4.0 * b4 * ix4 * ix);
    const double uch_rr = pref / (p.r_e * p.r_e)
                        * (rep * p.c1 * p.c1 * ex - 42.0 * b6 * ix6 * ix2 - 20.0 * b4 * ix6);

    const double dr = r - p.r_e;
    const double g = std::exp(-p.a * dr * dr);
    const double g_r = -2.0 * p.a * dr * g;
    const double g_rr = (4.0 * p.a * p.a * dr * dr - 2.0 * p.a) * g;
    const double s2 = std::sin(2.0 * theta);
    const double c2t = std::cos(2.0 * theta);
    const double half = 0.5 * p.U_e;

    PotentialJet jet;
    jet.u = uch + half * g * (1.0 - c2t);
    jet.dr = uch_r + half * g_r * (1.0 - c2t);
    jet.dtheta = p.U_e * g * s2;
    jet.drr = uch_rr + half * g_rr * (1.0 - c2t);
    jet.drtheta = p.U_e * g_r * s2;
    jet.dthetatheta = 2.0 * p.U_e * g * c2t;
    return jet;
}

void potential_and_gradient_unchecked(const ModelParams& p, double r, double theta,
                                      double& u, double& dr_out, double& dtheta_out) noexcept
{
    const double pref = p.D_e / (p.c1 - 6.0);
    const double rep = 2.0 * (3.0 - p.c2);
    const double b6 = 4.0 * p.c2 - p.c1 * p.c2 + p.c1;
    const double b4 = (p.c1 - 6.0) * p.c2;

    const double x = r / p.r_e;
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    const double ix4 = ix2 * ix2;
    const double ix6 = ix4 * ix2;
    const double ex = std::exp(p.c1 * (1.0 - x));

    const double dr = r - p.r_e;
    const double g = std::exp(-p.a * dr * dr);
    const double s2 = std::sin(2.0 * theta);
    const double c2t = std::cos(2.0 * theta);
    const double half = 0.5 * p.U_e;

    u = pref * (rep * ex - b6 * ix6 - b4 * ix4) + half * g * (1.0 - c2t);
    dr_out = pref / p.r_e * (-rep * p.c1 * ex + 6.0 * b6 * ix6 * ix + 4.0 * b4 * ix4 * ix)
           - p.U_e * p.a * dr * g * (1.0 - c2t);
    dtheta_out = p.U_e * g * s2;
}

double eval_U(const ModelParams& params, double r, double theta)
{
    require_radius(r);
    double u, dr, dth;
    potential_and_gradient_unchecked(params, r, theta, u, dr, dth);
    return u;
}

PotentialGradient grad_U(const ModelParams& params, double r, double theta)
{
    require_radius(r);
    double u, dr, dth;
    potential_and_gradient_unchecked(params, r, theta, u, dr, dth);
    return {dr, dth};
}

PotentialJet potential_jet(const ModelParams& params, double r, double theta)
{
    require_radius(r);
    return potential_jet_unchecked(params, r, theta);
}

std::string to_string(StationaryKind kind)
{
    switch (kind) {
    case StationaryKind::well: return "well";
    case StationaryKind::saddle: return "saddle";
    case StationaryKind::maximum: return "maximum";
    case StationaryKind::degenerate: return "degenerate";
    }
    return "unknown";
}

namespace {

// Representative of theta modulo U(r,t) = U(r,-t) = U(r,pi-t) = U(r,pi+t).
double fold_angle(double theta)
{
    double t = std::fmod(theta, kPi);
    if (t < 0.0)
        t += kPi;
    if (t > 0.5 * kPi)
        t = kPi - t;
    return t;
}

StationaryKind classify(const PotentialJet& jet)
{
    const double tr = jet.drr + jet.dthetatheta;
    const double det = jet.drr * jet.dthetatheta - jet.drtheta * jet.drtheta;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double lo = 0.5 * tr - disc;
    const double hi = 0.5 * tr + disc;
    if (std::abs(lo) < kHessianDegeneracyThreshold || std::abs(hi) < kHessianDegeneracyThreshold)
        return StationaryKind::degenerate;
    if (lo > 0.0)
        return StationaryKind::well;
    if (hi < 0.0)
        return StationaryKind::maximum;
    return StationaryKind::saddle;
}

struct NewtonOutcome {
    bool converged = false;
    double r = 0.0;
    double theta = 0.0;
    double residual = 0.0;
};

NewtonOutcome newton_on_gradient(const ModelParams& params, double r, double theta)
{
    NewtonOutcome out;
    for (int it = 0; it < 100; ++it) {
        if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(theta))
            break;
        const PotentialJet jet = potential_jet_unchecked(params, r, theta);
        out.residual = std::hypot(jet.dr, jet.dtheta);
        // Relative floor: |grad| cannot drop much below eps times the curvature scale.
        if (out.residual < 1e-11) {
            out.converged = true;
            break;
        }
        const double det = jet.drr * jet.dthetatheta - jet.drtheta * jet.drtheta;
        if (det == 0.0)
            break;
        double step_r = (jet.dthetatheta * jet.dr - jet.drtheta * jet.dtheta) / det;
        double step_t = (jet.drr * jet.dtheta - jet.drtheta * jet.dr) / det;
        const double len = std::hypot(step_r, step_t);
        if (len > 0.25) {
            step_r *= 0.25 / len;
            step_t *= 0.25 / len;
        }
        r -= step_r;
        theta -= step_t;
    }
    out.r = r;
    out.theta = theta;
    return out;
}

}  // namespace

std::vector<StationaryPoint> stationary_points(const ModelParams& params)
{
    params.validate();

    // Below r_e the x^-6 term drives U to -infinity; the physical surface
    // starts at the well, so the search is confined to r >= r_e.
    const double r_lo = params.r_e * (1.0 - 1e-6);
    const double r_hi = 12.0 * params.r_e;

    std::vector<StationaryPoint> found;
    std::ostringstream failures;
    constexpr std::array<double, 5> seed_angles = {0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};

    for (double r0 = params.r_e; r0 <= r_hi; r0 += 0.1 * params.r_e) {
        for (double t0 : seed_angles) {
            const NewtonOutcome res = newton_on_gradient(params, r0, t0);
            if (!res.converged) {
                failures << "  seed (" << r0 << ", " << t0 << "): |grad U| = " << res.residual << '\n';
                continue;
            }
            if (res.r < r_lo || res.r > r_hi)
                continue;
            const double th = fold_angle(res.theta);
            const bool dup = std::any_of(found.begin(), found.end(), [&](const StationaryPoint& s) {
                return std::abs(s.r - res.r) < 1e-6 && std::abs(s.theta - th) < 1e-6;
            });
            if (dup)
                continue;
            const PotentialJet jet = potential_jet_unchecked(params, res.r, th);
            StationaryPoint sp;
            sp.r = res.r;
            sp.theta = th;
            sp.energy = jet.u;
            sp.gradient_norm = std::hypot(jet.dr, jet.dtheta);
            sp.kind = classify(jet);
            found.push_back(sp);
        }
    }

    if (found.empty())
        throw std::runtime_error("stationary_points: Newton failed from every seed\n" + failures.str());

    auto rank = [](StationaryKind k) {
        switch (k) {
        case StationaryKind::well: return 0;
        case StationaryKind::saddle: return 1;
        case StationaryKind::maximum: return 2;
        default: return 3;
        }
    };
    std::sort(found.begin(), found.end(), [&](const StationaryPoint& x, const StationaryPoint& y) {
        if (rank(x.kind) != rank(y.kind))
            return rank(x.kind) < rank(y.kind);
        // saddles: outer (q1+) before inner (q~1+)
        return x.r > y.r;
    });

    int wells = 0, saddles = 0, maxima = 0;
    for (auto& s : found) {
        switch (s.kind) {
        case StationaryKind::well: s.label = wells++ == 0 ? "q0+" : "well" + std::to_string(wells); break;
        case StationaryKind::saddle:
            s.label = saddles == 0 ? "q1+" : saddles == 1 ? "q~1+" : "saddle" + std::to_string(saddles + 1);
            ++saddles;
            break;
        case StationaryKind::maximum: s.label = maxima++ == 0 ? "q2+" : "max" + std::to_string(maxima); break;
        default: s.label = "degenerate"; break;
        }
    }
    return found;
}

}  // namespace roamscope
