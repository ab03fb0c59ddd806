#pragma once

// Transverse slices across the unstable manifold of the refined inner orbit.

#include "roamscope/survey.hpp"

#include <Eigen/Dense>

#include <vector>

namespace slices {

using namespace roamscope;

// Unstable direction at node 0 by power iteration through the segment
// fundamental matrices.
inline Eigen::Vector4d unstable_direction(const ModelParams& p, const RefinedOrbit& o)
{
    const FieldContext ctx(p);
    const double dt = o.period / o.n_segments();
    std::vector<Matrix4> F;
    for (const auto& node : o.nodes)
        F.push_back(flow_with_sensitivity(ctx, node, dt, {1e-13, 1e-13}).stm);
    Eigen::Vector4d v(0.3, -0.7, 0.2, 0.5);
    for (int it = 0; it < 3; ++it)
        for (const auto& f : F)
            v = (f * v).normalized();
    return v;
}

struct SliceMinima {
    int f1 = -1;  // cell of the lowest interior minimum
    int f2 = -1;
    int centre = 0;
};

// Cells along x0 + s u + sigma e_pr, sigma in [-half, half], momenta
// rescaled onto KE = 1/2; the slice crosses the manifold at the centre cell.
inline SliceMinima slice_minima(const ModelParams& p, const RefinedOrbit& o, const Eigen::Vector4d& u, double s,
                                double half, int n, double tau)
{
    const State4 x0 = o.nodes[0];
    DescriptorSpec d1 = DescriptorSpec::inner(tau), d2 = d1;
    d2.integrand = Integrand::inner_f2_rate;
    d1.curve = d2.curve = o.curve;
    std::vector<double> a(n), b(n);
    const double h = 2.0 * half / n;
    for (int i = 0; i < n; ++i) {
        const double sg = -half + (i + 0.5) * h;
        State4 y{x0[0] + s * u[0], x0[1] + s * u[1] + sg, x0[2] + s * u[2], x0[3] + s * u[3]};
        const double k = std::sqrt(0.5 / kinetic_energy(p, PhaseState::from(y)));
        y[1] *= k;
        y[3] *= k;
        a[i] = ld_value(p, PhaseState::from(y), d1, {1e-13, 1e-13});
        b[i] = ld_value(p, PhaseState::from(y), d2, {1e-13, 1e-13});
    }
    auto lowest = [](const std::vector<double>& v) {
        int best = -1;
        for (int i : interior_minima(v, 0.05))
            if (best < 0 || v[i] < v[best])
                best = i;
        return best;
    };
    return {lowest(a), lowest(b), n / 2};
}

}  // namespace slices
