#include "oracles.hpp"

#include <doctest.h>

using namespace roamscope;

TEST_CASE("reduced mass")
{
    const ModelParams p;
    CHECK(reduced_mass(p) == doctest::Approx(0.9444669921887183).epsilon(1e-15));
    CHECK(reduced_mass(p) == doctest::Approx(0.944465).epsilon(1e-5));

    ModelParams heavy;
    heavy.m_CH3 = 1e12;
    CHECK(reduced_mass(heavy) == doctest::Approx(heavy.m_H).epsilon(1e-11));

    ModelParams equal;
    equal.m_CH3 = equal.m_H;
    CHECK(reduced_mass(equal) == doctest::Approx(0.5 * equal.m_H).epsilon(1e-15));
}

TEST_CASE("potential matches the closed form")
{
    const ModelParams p;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(0.5, 30.0), ut(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double r = ur(rng), th = ut(rng);
        const double ref = oracle::U(p, r, th);
        CHECK(std::abs(eval_U(p, r, th) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
    CHECK(eval_U(p, 1.1, 0.0) == doctest::Approx(-47.0).epsilon(1e-13));
    CHECK(eval_U(p, 1.1, std::numbers::pi / 2) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("four-fold symmetry")
{
    const ModelParams p;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ur(0.6, 20.0), ut(0.0, 2 * std::numbers::pi);
    for (int k = 0; k < 1000; ++k) {
        const double r = ur(rng), th = ut(rng);
        const double u = eval_U(p, r, th);
        const double tol = 1e-12 * std::max(1.0, std::abs(u));
        CHECK(std::abs(eval_U(p, r, -th) - u) <= tol);
        CHECK(std::abs(eval_U(p, r, std::numbers::pi - th) - u) <= tol);
        CHECK(std::abs(eval_U(p, r, std::numbers::pi + th) - u) <= tol);
    }
}

TEST_CASE("gradient against central differences")
{
    const ModelParams p;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ur(0.8, 15.0), ut(0.0, 2 * std::numbers::pi);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
        const double r = ur(rng), th = ut(rng), h = 1e-6;
        const auto g = grad_U(p, r, th);
        const double fr = (eval_U(p, r + h, th) - eval_U(p, r - h, th)) / (2 * h);
        const double ft = (eval_U(p, r, th + h) - eval_U(p, r, th - h)) / (2 * h);
        const double scale = std::max({std::abs(fr), std::abs(ft), 1e-3});
        CHECK(std::abs(g.dr - fr) <= 1e-5 * scale);
        CHECK(std::abs(g.dtheta - ft) <= 1e-5 * scale);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("second derivatives against differences of the gradient")
{
    const ModelParams p;
    const double h = 1e-6;
    for (double r : {1.0, 1.7, 3.2, 7.5})
        for (double th : {0.1, 0.9, 2.3}) {
            const auto j = potential_jet(p, r, th);
            const auto gp = grad_U(p, r + h, th), gm = grad_U(p, r - h, th);
            const auto tp = grad_U(p, r, th + h), tm = grad_U(p, r, th - h);
            CHECK(j.drr == doctest::Approx((gp.dr - gm.dr) / (2 * h)).epsilon(1e-5));
            CHECK(j.drtheta == doctest::Approx((tp.dr - tm.dr) / (2 * h)).epsilon(1e-5).scale(1.0));
            CHECK(j.dthetatheta == doctest::Approx((tp.dtheta - tm.dtheta) / (2 * h)).epsilon(1e-5).scale(1.0));
        }
}

TEST_CASE("potential decays at large r")
{
    const ModelParams p;
    for (int k = 0; k < 64; ++k)
        CHECK(std::abs(eval_U(p, 100.0, k * std::numbers::pi / 32)) < 1e-3);
}

TEST_CASE("stationary points")
{
    const ModelParams p;
    const auto pts = stationary_points(p);
    REQUIRE(pts.size() == 4);
    struct Row {
        double r, th, e, etol;
        StationaryKind kind;
    };
    const double half_pi = std::numbers::pi / 2;
    const Row rows[] = {{1.1, 0.0, -47.0, 0.1, StationaryKind::well},
                        {3.45, half_pi, -0.63, 0.02, StationaryKind::saddle},
                        {1.1, half_pi, 8.0, 0.1, StationaryKind::saddle},
                        {1.63, half_pi, 22.27, 0.05, StationaryKind::maximum}};
    for (int k = 0; k < 4; ++k) {
        CAPTURE(k);
        CHECK(std::abs(pts[k].r - rows[k].r) <= 0.01);
        CHECK(std::abs(pts[k].theta - rows[k].th) <= 0.01);
        CHECK(std::abs(pts[k].energy - rows[k].e) <= rows[k].etol);
        CHECK(pts[k].kind == rows[k].kind);
        CHECK(pts[k].gradient_norm < 1e-8);
    }
    CHECK(std::abs(pts[1].energy + 0.63) <= 0.01);
}

TEST_CASE("parameter validation")
{
    ModelParams p;
    p.m_H = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(eval_U(ModelParams{}, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(eval_U(ModelParams{}, -1.0, 0.0), DomainError);
}
