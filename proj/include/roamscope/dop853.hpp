#pragma once

// Adaptive Dormand-Prince 8(5,3) integrator with 7th-order dense output,
// templated on the system dimension. Integration always runs forward in the
// independent variable from 0 to t_end; callers integrate backward by
// negating their right-hand side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>

#include "roamscope/dop853_tableau.hpp"

namespace roamscope {

template <std::size_t N>
using VecN = std::array<double, N>;

struct StepControl {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 5'000'000;
};

enum class StepperStatus { finished, stopped_by_observer, step_underflow, non_finite, too_many_steps };

/// One accepted step's continuous extension, valid on [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    VecN<N> y0{};
    std::array<VecN<N>, 7> F{};

    double t1() const { return t0 + h; }

    VecN<N> operator()(double t) const
    {
        const double x = (t - t0) / h;
        VecN<N> y{};
        for (int i = 6; i >= 0; --i) {
            const double mult = ((6 - i) % 2 == 0) ? x : 1.0 - x;
            for (std::size_t k = 0; k < N; ++k)
                y[k] = (y[k] + F[i][k]) * mult;
        }
        for (std::size_t k = 0; k < N; ++k)
            y[k] += y0[k];
        return y;
    }

    double component(double t, std::size_t k) const
    {
        const double x = (t - t0) / h;
        double y = 0.0;
        for (int i = 6; i >= 0; --i)
            y = (y + F[i][k]) * (((6 - i) % 2 == 0) ? x : 1.0 - x);
        return y + y0[k];
    }
};

template <std::size_t N>
struct StepperResult {
    StepperStatus status = StepperStatus::finished;
    double t = 0.0;
    VecN<N> y{};
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
};

/// Accepted-step view handed to observers; dense output is built on demand
/// (three extra right-hand-side evaluations).
template <std::size_t N, class Rhs>
class AcceptedStep {
public:
    AcceptedStep(Rhs& rhs, double t_old, double h, const VecN<N>& y_old, const VecN<N>& y_new,
                 const VecN<N>& f_new, std::array<VecN<N>, 16>& K, long& evals)
        : rhs_(rhs), t_old_(t_old), h_(h), y_old_(y_old), y_new_(y_new), f_new_(f_new), K_(K), evals_(evals)
    {
    }

    double t_old() const { return t_old_; }
    double t_new() const { return t_old_ + h_; }
    const VecN<N>& y_old() const { return y_old_; }
    const VecN<N>& y_new() const { return y_new_; }
    const VecN<N>& f_old() const { return K_[0]; }
    const VecN<N>& f_new() const { return f_new_; }

    const DenseSegment<N>& dense()
    {
        if (!built_)
            build();
        return seg_;
    }

private:
    void build()
    {
        namespace tab = ::roamscope::dop853;
        using tab::kA;
        for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
            VecN<N> ys = y_old_;
            for (int j = 0; j < s; ++j) {
                const double a = kA[s][j];
                if (a == 0.0)
                    continue;
                for (std::size_t k = 0; k < N; ++k)
                    ys[k] += h_ * a * K_[j][k];
            }
            K_[s] = rhs_(t_old_ + tab::kC[s] * h_, ys);
            ++evals_;
        }
        seg_.t0 = t_old_;
        seg_.h = h_;
        seg_.y0 = y_old_;
        for (std::size_t k = 0; k < N; ++k) {
            const double dy = y_new_[k] - y_old_[k];
            seg_.F[0][k] = dy;
            seg_.F[1][k] = h_ * K_[0][k] - dy;
            seg_.F[2][k] = 2.0 * dy - h_ * (f_new_[k] + K_[0][k]);
        }
        for (int i = 0; i < 4; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                double acc = 0.0;
                for (int j = 0; j < tab::kStagesExtended; ++j)
                    acc += tab::kD[i][j] * K_[j][k];
                seg_.F[3 + i][k] = h_ * acc;
            }
        }
        built_ = true;
    }

    Rhs& rhs_;
    double t_old_;
    double h_;
    const VecN<N>& y_old_;
    const VecN<N>& y_new_;
    const VecN<N>& f_new_;
    std::array<VecN<N>, 16>& K_;
    long& evals_;
    DenseSegment<N> seg_{};
    bool built_ = false;
};

/// Integrates dy/dt = rhs(t, y) on [0, t_end]. `observe(AcceptedStep&)` is
/// called after every accepted step and returns false to stop early.
template <std::size_t N, class Rhs, class Observer>
StepperResult<N> dop853_integrate(Rhs&& rhs, const VecN<N>& y0, double t_end, const StepControl& ctl,
                                  Observer&& observe)
{
    namespace tab = ::roamscope::dop853;
    using tab::kA;
    using tab::kB;
    using tab::kC;
    using tab::kE3;
    using tab::kE5;

    constexpr double kSafety = 0.9;
    constexpr double kMinFactor = 0.2;
    constexpr double kMaxFactor = 10.0;
    constexpr double kErrorExponent = -1.0 / 8.0;

    StepperResult<N> res;
    res.y = y0;
    res.t = 0.0;
    if (!(t_end > 0.0))
        return res;

    std::array<VecN<N>, 16> K{};
    VecN<N> y = y0;
    VecN<N> f = rhs(0.0, y);
    res.evaluations = 1;

    auto scale_of = [&](const VecN<N>& a, const VecN<N>& b, std::size_t k) {
        return ctl.abs_tol + ctl.rel_tol * std::max(std::abs(a[k]), std::abs(b[k]));
    };
    auto finite = [](const VecN<N>& v) {
        for (double x : v)
            if (!std::isfinite(x))
                return false;
        return true;
    };
    if (!finite(f)) {
        res.status = StepperStatus::non_finite;
        return res;
    }

    // Initial step (Hairer, Norsett & Wanner, II.4).
    double h_abs;
    {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[k]);
            d0 += (y[k] / sc) * (y[k] / sc);
            d1 += (f[k] / sc) * (f[k] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_end);
        VecN<N> y1;
        for (std::size_t k = 0; k < N; ++k)
            y1[k] = y[k] + h0 * f[k];
        const VecN<N> f1 = rhs(h0, y1);
        ++res.evaluations;
        double d2 = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[k]);
            d2 += ((f1[k] - f[k]) / sc) * ((f1[k] - f[k]) / sc);
        }
        d2 = std::sqrt(d2 / N) / h0;
        double h1;
        if (!std::isfinite(d2))
            h1 = h0 * 1e-3;
        else if (d1 <= 1e-15 && d2 <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
        h_abs = std::min({100.0 * h0, h1, ctl.max_step});
    }

    double t = 0.0;
    VecN<N> y_new, f_new;
    while (t < t_end) {
        if (res.steps >= ctl.max_steps) {
            res.status = StepperStatus::too_many_steps;
            break;
        }
        const double min_step = 10.0 * std::abs(std::nextafter(t, t_end + 1.0) - t);
        h_abs = std::min(h_abs, ctl.max_step);
        bool rejected = false;
        bool accepted = false;
        double h = 0.0;
        while (!accepted) {
            if (h_abs < min_step) {
                res.status = StepperStatus::step_underflow;
                res.t = t;
                res.y = y;
                return res;
            }
            double t_new = t + h_abs;
            if (t_new > t_end)
                t_new = t_end;
            h = t_new - t;
            h_abs = h;

            K[0] = f;
            for (int s = 1; s < tab::kStages; ++s) {
                VecN<N> ys = y;
                for (int j = 0; j < s; ++j) {
                    const double a = kA[s][j];
                    if (a == 0.0)
                        continue;
                    for (std::size_t k = 0; k < N; ++k)
                        ys[k] += h * a * K[j][k];
                }
                K[s] = rhs(t + kC[s] * h, ys);
            }
            res.evaluations += tab::kStages - 1;
            for (std::size_t k = 0; k < N; ++k) {
                double acc = 0.0;
                for (int j = 0; j < tab::kStages; ++j)
                    acc += kB[j] * K[j][k];
                y_new[k] = y[k] + h * acc;
            }
            f_new = rhs(t + h, y_new);
            ++res.evaluations;
            K[tab::kStages] = f_new;

            double err_norm;
            if (!finite(y_new) || !finite(f_new)) {
                err_norm = std::numeric_limits<double>::infinity();
            } else {
                double e5 = 0.0, e3 = 0.0;
                for (std::size_t k = 0; k < N; ++k) {
                    double a5 = 0.0, a3 = 0.0;
                    for (int j = 0; j <= tab::kStages; ++j) {
                        a5 += kE5[j] * K[j][k];
                        a3 += kE3[j] * K[j][k];
                    }
                    const double sc = scale_of(y, y_new, k);
                    e5 += (a5 / sc) * (a5 / sc);
                    e3 += (a3 / sc) * (a3 / sc);
                }
                if (e5 == 0.0 && e3 == 0.0)
                    err_norm = 0.0;
                else
                    err_norm = h * e5 / std::sqrt((e5 + 0.01 * e3) * N);
                if (!std::isfinite(err_norm))
                    err_norm = std::numeric_limits<double>::infinity();
            }

            if (err_norm < 1.0) {
                double factor = err_norm == 0.0 ? kMaxFactor
                                                : std::min(kMaxFactor, kSafety * std::pow(err_norm, kErrorExponent));
                if (rejected)
                    factor = std::min(1.0, factor);
                h_abs *= factor;
                accepted = true;
            } else {
                const double factor = std::isfinite(err_norm)
                                          ? std::max(kMinFactor, kSafety * std::pow(err_norm, kErrorExponent))
                                          : kMinFactor;
                h_abs *= factor;
                rejected = true;
                ++res.rejected;
            }
        }

        ++res.steps;
        AcceptedStep<N, std::remove_reference_t<Rhs>> view(rhs, t, h, y, y_new, f_new, K, res.evaluations);
        const bool keep_going = observe(view);
        t = (t + h >= t_end) ? t_end : t + h;
        y = y_new;
        f = f_new;
        if (!keep_going) {
            res.status = StepperStatus::stopped_by_observer;
            break;
        }
    }
    res.t = t;
    res.y = y;
    return res;
}

}  // namespace roamscope
