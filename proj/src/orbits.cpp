#include "roamscope/orbits.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace roamscope {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

constexpr std::array<double, 6> kInnerCosine = {2.78147867, 0.98235111, -0.17161848,
                                                -0.00486657, 0.01628185, -0.00393858};
constexpr std::array<double, 6> kInnerOdd = {-1.06278495, -0.42089795, 1.38849679,
                                             -1.11654771, 0.40789372, -0.05122644};

double centrifugal_balance(const ModelParams& p, double mu, double r)
{
    // p_theta^2 / (mu r^3) with p_theta^2 = 1/G(r) equals 1 / (r + mu r^3 / I)
    const double u_r = grad_U(p, r, 0.0).dr;
    return 1.0 / (r + mu * r * r * r / p.I_CH3) - u_r;
}

double centrifugal_balance_slope(const ModelParams& p, double mu, double r)
{
    const double den = r + mu * r * r * r / p.I_CH3;
    const double dden = 1.0 + 3.0 * mu * r * r / p.I_CH3;
    return -dden / (den * den) - potential_jet(p, r, 0.0).drr;
}

}  // namespace

std::string to_string(OrbitKind k) { return k == OrbitKind::inner_parametrised ? "inner" : "outer"; }
std::string to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

Branch branch_from_string(const std::string& s)
{
    if (s == "plus" || s == "+")
        return Branch::plus;
    if (s == "minus" || s == "-")
        return Branch::minus;
    throw std::invalid_argument("branch must be 'plus' or 'minus', got '" + s + "'");
}

double reduce_half_period(double theta)
{
    double t = theta - kPi * std::round(theta / kPi);  // [-pi/2, pi/2]
    if (t <= -0.5 * kPi)
        t += kPi;
    return t;
}

double OrbitCurve::rbar(double theta) const
{
    if (kind == OrbitKind::outer_circular)
        return r_out;
    double r = 0.0;
    for (int k = 0; k < 6; ++k)
        r += c[k] * std::cos(2.0 * k * theta);
    return r;
}

double OrbitCurve::rbar_prime(double theta) const
{
    if (kind == OrbitKind::outer_circular)
        return 0.0;
    double dr = 0.0;
    for (int k = 1; k < 6; ++k)
        dr -= 2.0 * k * c[k] * std::sin(2.0 * k * theta);
    return dr;
}

double OrbitCurve::pbar_r(double theta) const
{
    if (kind == OrbitKind::outer_circular)
        return 0.0;
    const double t = reduce_half_period(theta);
    const double t2 = t * t;
    double acc = 0.0;
    for (int k = 5; k >= 0; --k)
        acc = acc * t2 + d[k];
    return acc * t;
}

double OrbitCurve::pbar_r_prime(double theta) const
{
    if (kind == OrbitKind::outer_circular)
        return 0.0;
    const double t = reduce_half_period(theta);
    const double t2 = t * t;
    double acc = 0.0;
    for (int k = 5; k >= 0; --k)
        acc = acc * t2 + (2.0 * k + 1.0) * d[k];
    return acc;
}

PhaseState OrbitCurve::state_at(const ModelParams& params, double theta) const
{
    return resolve_momentum_on_constraint(params, rbar(theta), theta, FixedMomentum::p_r, pbar_r(theta),
                                          branch_sign());
}

OrbitCurve tabulated_inner_orbit(Branch branch)
{
    OrbitCurve curve;
    curve.kind = OrbitKind::inner_parametrised;
    curve.c = kInnerCosine;
    curve.d = kInnerOdd;
    curve.branch = branch;
    if (branch == Branch::minus)
        for (double& v : curve.d)
            v = -v;
    return curve;
}

double inner_rbar(double theta) { return tabulated_inner_orbit().rbar(theta); }
double inner_rbar_prime(double theta) { return tabulated_inner_orbit().rbar_prime(theta); }
double inner_pbar_r(double theta) { return tabulated_inner_orbit().pbar_r(theta); }

double outer_radius(const ModelParams& params)
{
    params.validate();
    const double mu = reduced_mass(params);
    double lo = 5.0, hi = 50.0;
    double f_lo = centrifugal_balance(params, mu, lo);
    const double f_hi = centrifugal_balance(params, mu, hi);
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw NoCentrifugalBarrier("outer_radius: no sign change of the centrifugal balance on [5, 50]");

    for (int it = 0; it < 200 && (hi - lo) > 1e-6 * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = centrifugal_balance(params, mu, mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double step = centrifugal_balance(params, mu, r) / centrifugal_balance_slope(params, mu, r);
        r -= step;
        if (std::abs(step) <= 1e-15 * r)
            break;
    }
    return r;
}

OrbitCurve outer_orbit(const ModelParams& params, Branch branch)
{
    OrbitCurve curve;
    curve.kind = OrbitKind::outer_circular;
    curve.branch = branch;
    curve.r_out = outer_radius(params);
    const double mu = reduced_mass(params);
    curve.period = kTwoPi / std::sqrt(angular_inertia_factor(params, mu, curve.r_out));
    return curve;
}

namespace {

// Places n nodes equally spaced in time along a seed curve by tabulating
// t(theta) = integral dtheta / theta'.
std::vector<State4> seed_nodes(const ModelParams& params, const OrbitCurve& curve, int n, double& period)
{
    const int sign = curve.branch_sign();
    const int m = 8192;
    std::vector<double> times(m + 1, 0.0);
    const double mu = reduced_mass(params);
    auto inv_rate = [&](double theta) {
        const PhaseState s = curve.state_at(params, theta);
        return 1.0 / std::abs(s.p_theta * angular_inertia_factor(params, mu, s.r));
    };
    const double dth = kTwoPi / m;
    double prev = inv_rate(0.0);
    for (int i = 1; i <= m; ++i) {
        // Simpson on each sub-interval
        const double th = sign * i * dth;
        const double mid = inv_rate(th - sign * 0.5 * dth);
        const double cur = inv_rate(th);
        times[i] = times[i - 1] + dth * (prev + 4.0 * mid + cur) / 6.0;
        prev = cur;
    }
    period = times[m];
    std::vector<State4> nodes(n);
    for (int k = 0; k < n; ++k) {
        const double target = period * k / n;
        const auto it = std::lower_bound(times.begin(), times.end(), target);
        const int i = std::clamp(static_cast<int>(it - times.begin()), 1, m);
        const double w = (target - times[i - 1]) / (times[i] - times[i - 1]);
        const double theta = sign * (i - 1 + w) * dth;
        nodes[k] = curve.state_at(params, theta).packed();
    }
    return nodes;
}

// Rescales both momenta so that KE = 1/2; Newton updates leave the
// constraint surface at second order only.
double node_ke(const FieldContext& ctx, const State4& y)
{
    const double r = y[0];
    return 0.5 * y[1] * y[1] / ctx.mu + 0.5 * y[3] * y[3] * (1.0 / (ctx.mu * r * r) + ctx.inv_I);
}

void project_to_constraint(const FieldContext& ctx, State4& y)
{
    const double r = y[0];
    const double ke = node_ke(ctx, y);
    if (!(ke > 0.0) || !(r > 0.0))
        return;
    const double scale = std::sqrt(kIsokineticEnergy / ke);
    y[1] *= scale;
    y[3] *= scale;
}

struct SegmentSolution {
    SensitivityFlow flow;
    State4 rate_end{};
};

std::vector<SegmentSolution> propagate_segments(const FieldContext& ctx, const std::vector<State4>& nodes, double dt,
                                                const StepControl& ctl)
{
    const int n = static_cast<int>(nodes.size());
    std::vector<SegmentSolution> out(n);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
        out[k].flow = flow_with_sensitivity(ctx, nodes[k], dt, ctl);
        out[k].rate_end = isokinetic_rate(ctx, out[k].flow.state);
    }
    return out;
}

void refit_coefficients(const ModelParams& params, RefinedOrbit& orbit, const StepControl& ctl)
{
    const FieldContext ctx(params);
    const int n = orbit.n_segments();
    const int per_segment = 40;
    const double dt = orbit.period / n;
    std::vector<State4> samples;
    samples.reserve(static_cast<std::size_t>(n) * per_segment);
    for (int k = 0; k < n; ++k) {
        State4 y = orbit.nodes[k];
        samples.push_back(y);
        for (int j = 1; j < per_segment; ++j) {
            const FlowResult f = flow(ctx, y, dt / per_segment, Direction::forward, ctl);
            y = f.state;
            samples.push_back(y);
        }
    }
    const int m = static_cast<int>(samples.size());
    Eigen::MatrixXd A(m, 6), B(m, 6);
    Eigen::VectorXd rv(m), pv(m);
    for (int i = 0; i < m; ++i) {
        const double th = samples[i][2];
        const double tr = reduce_half_period(th);
        double pw = tr;
        for (int k = 0; k < 6; ++k) {
            A(i, k) = std::cos(2.0 * k * th);
            B(i, k) = pw;
            pw *= tr * tr;
        }
        rv(i) = samples[i][0];
        pv(i) = samples[i][1];
    }
    const Eigen::VectorXd cfit = A.colPivHouseholderQr().solve(rv);
    const Eigen::VectorXd dfit = B.colPivHouseholderQr().solve(pv);
    for (int k = 0; k < 6; ++k) {
        orbit.curve.c[k] = cfit(k);
        orbit.curve.d[k] = dfit(k);
    }
}

}  // namespace

RefinedOrbit refine_orbit(const ModelParams& params, const OrbitCurve& initial, int n_segments,
                          const ShootingOptions& options)
{
    params.validate();
    if (initial.kind == OrbitKind::inner_parametrised && n_segments < 20)
        throw std::invalid_argument("refine_orbit: the inner orbit needs at least 20 segments");
    if (n_segments < 1)
        throw std::invalid_argument("refine_orbit: n_segments must be positive");

    const FieldContext ctx(params);
    const int n = n_segments;
    const int sign = initial.branch_sign();

    std::vector<State4> nodes;
    double period = 0.0;
    if (initial.kind == OrbitKind::outer_circular) {
        const double r = initial.r_out > 0.0 ? initial.r_out : outer_radius(params);
        const double pt = max_angular_momentum(params, r);
        const double omega = pt * angular_inertia_factor(params, ctx.mu, r);
        period = kTwoPi / omega;
        for (int k = 0; k < n; ++k)
            nodes.push_back({r, 0.0, sign * omega * period * k / n, sign * pt});
    } else {
        nodes = seed_nodes(params, initial, n, period);
    }
    if (initial.period > 0.0)
        period = initial.period;
    const double theta_anchor = nodes[0][2];

    const int unknowns = 4 * n + 1;
    const int equations = 5 * n + 1;

    auto residual_vector = [&](const std::vector<State4>& xs, double T, std::vector<SegmentSolution>& segs) {
        segs = propagate_segments(ctx, xs, T / n, options.control);
        Eigen::VectorXd F(equations);
        for (int k = 0; k < n; ++k) {
            State4 next = xs[(k + 1) % n];
            if (k == n - 1)
                next[2] += sign * kTwoPi;
            for (int i = 0; i < 4; ++i)
                F(4 * k + i) = segs[k].flow.state[i] - next[i];
        }
        F(4 * n) = xs[0][2] - theta_anchor;
        // every node on KE = 1/2: off-shell errors grow like e^{2 dU}
        for (int k = 0; k < n; ++k)
            F(4 * n + 1 + k) = node_ke(ctx, xs[k]) - kIsokineticEnergy;
        bool ok = true;
        for (const auto& s : segs)
            ok = ok && s.flow.ok();
        if (!ok)
            F.setConstant(std::numeric_limits<double>::infinity());
        return F;
    };

    auto per_segment = [&](const Eigen::VectorXd& F) {
        std::vector<double> r(n);
        for (int k = 0; k < n; ++k)
            r[k] = F.segment<4>(4 * k).norm();
        return r;
    };

    std::vector<SegmentSolution> segs;
    Eigen::VectorXd F = residual_vector(nodes, period, segs);
    double norm = F.norm();
    RefinedOrbit out;
    double cond = 0.0;
    int it = 0;
    for (; it < options.max_iterations && !(norm < options.tolerance); ++it) {
        if (!std::isfinite(norm))
            throw ShootingDivergence("refine_orbit: segment integration failed", per_segment(F));
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(equations, unknowns);
        for (int k = 0; k < n; ++k) {
            J.block<4, 4>(4 * k, 4 * k) = segs[k].flow.stm;
            J.block<4, 4>(4 * k, 4 * ((k + 1) % n)) -= Matrix4::Identity();
            for (int i = 0; i < 4; ++i)
                J(4 * k + i, 4 * n) = segs[k].rate_end[i] / n;
        }
        J(4 * n, 2) = 1.0;
        for (int k = 0; k < n; ++k) {
            const State4& x = nodes[k];
            const double r = x[0];
            J(4 * n + 1 + k, 4 * k + 0) = -x[3] * x[3] / (ctx.mu * r * r * r);
            J(4 * n + 1 + k, 4 * k + 1) = x[1] / ctx.mu;
            J(4 * n + 1 + k, 4 * k + 3) = x[3] * (1.0 / (ctx.mu * r * r) + ctx.inv_I);
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
        const Eigen::VectorXd dx = qr.solve(-F);

        // Backtracking on the residual norm.
        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 12; ++ls, lambda *= 0.5) {
            std::vector<State4> trial = nodes;
            for (int k = 0; k < n; ++k) {
                for (int i = 0; i < 4; ++i)
                    trial[k][i] += lambda * dx(4 * k + i);
                project_to_constraint(ctx, trial[k]);
            }
            const double T_trial = period + lambda * dx(4 * n);
            bool valid = T_trial > 0.0;
            for (const auto& x : trial)
                valid = valid && x[0] > 0.0;
            if (!valid)
                continue;
            std::vector<SegmentSolution> trial_segs;
            const Eigen::VectorXd F_trial = residual_vector(trial, T_trial, trial_segs);
            const double trial_norm = F_trial.norm();
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                nodes = std::move(trial);
                period = T_trial;
                segs = std::move(trial_segs);
                F = F_trial;
                norm = trial_norm;
                improved = true;
                break;
            }
        }
        if (!improved) {
            std::ostringstream msg;
            msg << "refine_orbit: Newton stalled at matching norm " << norm << " after " << it << " iterations";
            throw ShootingDivergence(msg.str(), per_segment(F));
        }
    }
    if (!(norm < options.tolerance)) {
        std::ostringstream msg;
        msg << "refine_orbit: no convergence in " << options.max_iterations << " iterations, matching norm " << norm;
        throw ShootingDivergence(msg.str(), per_segment(F));
    }

    {
        // conditioning of the converged shooting system
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(equations, unknowns);
        for (int k = 0; k < n; ++k) {
            J.block<4, 4>(4 * k, 4 * k) = segs[k].flow.stm;
            J.block<4, 4>(4 * k, 4 * ((k + 1) % n)) -= Matrix4::Identity();
            for (int i = 0; i < 4; ++i)
                J(4 * k + i, 4 * n) = segs[k].rate_end[i] / n;
        }
        J(4 * n, 2) = 1.0;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& sv = svd.singularValues();
        cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    }

    out.nodes = nodes;
    out.period = period;
    out.matching_norm = norm;
    out.condition_number = cond;
    out.iterations = it;
    out.segment_residuals = per_segment(F);
    out.curve = initial;
    out.curve.period = period;
    if (initial.kind == OrbitKind::outer_circular) {
        double r_mean = 0.0;
        for (const auto& x : nodes)
            r_mean += x[0];
        out.curve.r_out = r_mean / n;
    } else {
        refit_coefficients(params, out, options.control);
    }
    return out;
}

namespace {

// Jacobian of (r, p_r, theta, p_theta) -> (r, pi_r, theta, pi_theta).
Matrix4 scaled_chart_jacobian(const ModelParams& params, const State4& y)
{
    const PotentialJet j = potential_jet(params, y[0], y[2]);
    const double w = std::exp(-j.u);
    Matrix4 D = Matrix4::Identity();
    D(1, 0) = -j.dr * w * y[1];
    D(1, 1) = w;
    D(1, 2) = -j.dtheta * w * y[1];
    D(3, 0) = -j.dr * w * y[3];
    D(3, 2) = -j.dtheta * w * y[3];
    D(3, 3) = w;
    return D;
}

}  // namespace

FloquetSpectrum floquet(const ModelParams& params, const RefinedOrbit& orbit, MomentumChart chart,
                        const StepControl& ctl)
{
    const int n = orbit.n_segments();
    if (n == 0 || !(orbit.period > 0.0))
        throw std::invalid_argument("floquet: orbit is not converged");
    const FieldContext ctx(params);
    const auto segs = propagate_segments(ctx, orbit.nodes, orbit.period / n, ctl);
    std::vector<Matrix4> factors(n);
    for (int k = 0; k < n; ++k) {
        if (!segs[k].flow.ok())
            throw std::runtime_error("floquet: fundamental-matrix integration failed on segment " + std::to_string(k)
                                     + " (" + to_string(segs[k].flow.status) + ")");
        factors[k] = segs[k].flow.stm;
        if (chart == MomentumChart::scaled) {
            const State4& a = orbit.nodes[k];
            const State4& b = orbit.nodes[(k + 1) % n];
            factors[k] = scaled_chart_jacobian(params, b) * factors[k] * scaled_chart_jacobian(params, a).inverse();
        }
    }

    FloquetSpectrum spec;
    spec.monodromy = Matrix4::Identity();
    for (const auto& f : factors)
        spec.monodromy = f * spec.monodromy;

    // Off-shell errors grow transiently like e^{2 dU} along the orbit, which
    // swamps the unit multipliers of the full product. The flow maps the
    // KE = 1/2 surface onto itself, so each factor is block triangular in a
    // (tangent, normal) basis: the spectrum is that of the restricted 3x3
    // product plus the scalar normal multiplier.
    std::vector<Eigen::Vector4d> normals(n);
    std::vector<Eigen::Matrix<double, 4, 3>> tangents(n);
    for (int k = 0; k < n; ++k) {
        const State4& x = orbit.nodes[k];
        const double r = x[0];
        Eigen::Vector4d g(-x[3] * x[3] / (ctx.mu * r * r * r), x[1] / ctx.mu, 0.0,
                          x[3] * (1.0 / (ctx.mu * r * r) + ctx.inv_I));
        g.normalize();
        Eigen::HouseholderQR<Eigen::Matrix<double, 4, 1>> qr(g);
        const Matrix4 Q = qr.householderQ();
        normals[k] = g;
        tangents[k] = Q.rightCols<3>();
        if (chart == MomentumChart::scaled) {
            const Matrix4 D = scaled_chart_jacobian(params, x);
            Eigen::HouseholderQR<Eigen::Matrix<double, 4, 3>> tq(D * tangents[k]);
            tangents[k] = tq.householderQ() * Eigen::Matrix<double, 4, 3>::Identity();
            normals[k] = (D.transpose().inverse() * g).normalized();
        }
    }
    std::vector<Eigen::Matrix3d> reduced(n);
    double log_normal = 0.0;
    double normal_sign = 1.0;
    for (int k = 0; k < n; ++k) {
        const int next = (k + 1) % n;
        reduced[k] = tangents[next].transpose() * factors[k] * tangents[k];
        const double alpha = normals[next].dot(factors[k] * normals[k]);
        log_normal += std::log10(std::abs(alpha));
        normal_sign *= alpha < 0.0 ? -1.0 : 1.0;
    }

    // Periodic QR: Q_{k+1} R_k = A_k Q_k, iterated over several periods
    // until Q returns to itself; moduli are the products of diag(R_k).
    constexpr int kPeriods = 60;
    Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d Q_start = Q;
    std::array<double, 3> log_mod{};
    for (int p = 0; p < kPeriods; ++p) {
        const bool last = p == kPeriods - 1;
        if (last) {
            Q_start = Q;
            log_mod.fill(0.0);
        }
        for (int k = 0; k < n; ++k) {
            Eigen::HouseholderQR<Eigen::Matrix3d> qr(reduced[k] * Q);
            Eigen::Matrix3d R = qr.matrixQR().triangularView<Eigen::Upper>();
            Eigen::Matrix3d Qn = qr.householderQ();
            // normalise to a positive diagonal in R
            for (int i = 0; i < 3; ++i) {
                if (R(i, i) < 0.0) {
                    R.row(i) *= -1.0;
                    Qn.col(i) *= -1.0;
                }
            }
            if (last)
                for (int i = 0; i < 3; ++i)
                    log_mod[i] += std::log10(std::abs(R(i, i)));
            Q = Qn;
        }
    }
    // Q_end^T Q_start is diagonal +-1 at convergence; its signs are the multiplier signs.
    const Eigen::Matrix3d C = Q.transpose() * Q_start;
    double drift = 0.0;
    std::vector<std::pair<double, double>> entries;
    for (int i = 0; i < 3; ++i) {
        drift = std::max(drift, 1.0 - std::abs(C(i, i)));
        entries.emplace_back(log_mod[i], C(i, i) < 0.0 ? -1.0 : 1.0);
    }
    entries.emplace_back(log_normal, normal_sign);
    spec.basis_drift = drift;

    std::sort(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (auto& [lm, s] : entries) {
        spec.log10_moduli.push_back(lm);
        spec.multipliers.emplace_back(s * std::pow(10.0, lm), 0.0);
    }
    spec.log10_max = entries.front().first;
    return spec;
}

std::string serialize_orbit(const OrbitCurve& curve)
{
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "kind = " << to_string(curve.kind) << '\n';
    os << "period = " << num(curve.period) << '\n';
    os << "branch = " << to_string(curve.branch) << '\n';
    if (curve.kind == OrbitKind::inner_parametrised) {
        for (int k = 0; k < 6; ++k)
            os << 'c' << k << " = " << num(curve.c[k]) << '\n';
        for (int k = 0; k < 6; ++k)
            os << 'd' << k << " = " << num(curve.d[k]) << '\n';
    } else {
        os << "r_out = " << num(curve.r_out) << '\n';
    }
    return os.str();
}

OrbitCurve parse_orbit(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("orbit block: missing key '" + key + "'");
        return it->second;
    };
    OrbitCurve curve;
    const std::string kind = need("kind");
    if (kind == "inner")
        curve.kind = OrbitKind::inner_parametrised;
    else if (kind == "outer")
        curve.kind = OrbitKind::outer_circular;
    else
        throw std::invalid_argument("orbit block: unknown kind '" + kind + "'");
    curve.period = std::stod(need("period"));
    curve.branch = branch_from_string(need("branch"));
    if (curve.kind == OrbitKind::inner_parametrised) {
        for (int k = 0; k < 6; ++k) {
            curve.c[k] = std::stod(need("c" + std::to_string(k)));
            curve.d[k] = std::stod(need("d" + std::to_string(k)));
        }
    } else {
        curve.r_out = std::stod(need("r_out"));
    }
    return curve;
}

}  // namespace roamscope
