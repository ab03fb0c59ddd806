#include "oracles.hpp"
#include "slices.hpp"

#include <doctest.h>

using namespace roamscope;

TEST_CASE("descriptors are non-negative and grow with tau")
{
    const ModelParams p;
    std::mt19937_64 rng(41);
    const std::vector<DescriptorSpec> specs{DescriptorSpec::inner(1), DescriptorSpec::outer(1),
                                            [] {
                                                auto d = DescriptorSpec::inner(1);
                                                d.integrand = Integrand::inner_f2_rate;
                                                return d;
                                            }()};
    for (int k = 0; k < 40; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng, 2.0, 14.0);
        for (DescriptorSpec d : specs) {
            double prev = 0.0;
            for (double tau : {0.5, 1.0, 2.0, 4.0, 8.0}) {
                d.tau = tau;
                const double v = ld_value(p, s, d);
                if (std::isinf(v))
                    break;
                CHECK(v >= 0.0);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("radial descriptor vanishes on the circular orbit")
{
    const ModelParams p;
    const PhaseState s = outer_orbit(p).state_at(p, 0.7);
    CHECK(ld_value(p, s, DescriptorSpec::outer(20), IntegratorSettings::precise().control()) < 1e-6);
}

TEST_CASE("user integrand")
{
    const ModelParams p;
    DescriptorSpec d;
    d.integrand = Integrand::user;
    d.tau = 2.0;
    CHECK_THROWS(d.validate());
    d.user_rate = [](const State4& y, const State4&) { return y[0] * 0.0 + 2.0; };
    const PhaseState s = resolve_momentum_on_constraint(p, 6.0, 0.0, FixedMomentum::p_r, 0.0, 1);
    CHECK(ld_value(p, s, d) == doctest::Approx(4.0).epsilon(1e-12));
    DescriptorSpec bad = DescriptorSpec::outer(-1.0);
    CHECK_THROWS(bad.validate());
}

TEST_CASE("integrand names")
{
    for (Integrand i : {Integrand::inner_f1_rate, Integrand::inner_f2_rate, Integrand::radial_rate, Integrand::user})
        CHECK(integrand_from_string(to_string(i)) == i);
    CHECK_THROWS(integrand_from_string("nope"));
}

TEST_CASE("fields are invariant under theta -> theta + pi")
{
    const ModelParams p;
    const int n = 24;
    const SectionSpec s = SectionSpec::radial_section(p, n);
    for (const DescriptorSpec& d : {DescriptorSpec::inner(4), DescriptorSpec::outer(8)}) {
        const LDField f = compute_field(p, s, d);
        int compared = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n / 2; ++i) {
                const double a = f.at(i, j), b = f.at(i + n / 2, j);
                if (f.masked(i, j)) {
                    CHECK(f.masked(i + n / 2, j));
                    continue;
                }
                // rounding differences between theta and theta + pi grow along the flow
                CHECK(std::abs(a - b) <= 1e-4 * std::max(1.0, std::abs(a)));
                ++compared;
            }
        CHECK(compared > 0);
    }
}

TEST_CASE("f1-rate and f2-rate minima coincide across the unstable manifold")
{
    const ModelParams p;
    const RefinedOrbit o = refine_orbit(p, tabulated_inner_orbit(), 80);
    const Eigen::Vector4d u = slices::unstable_direction(p, o);
    for (double s : {-1e-2, -3e-3, 1e-3, 3e-3, 1e-2}) {
        CAPTURE(s);
        const auto m = slices::slice_minima(p, o, u, s, 1e-3, 41, 2.0);
        REQUIRE(m.f1 >= 0);
        REQUIRE(m.f2 >= 0);
        CHECK(std::abs(m.f1 - m.f2) <= 1);
        CHECK(std::abs(m.f1 - m.centre) <= 1);
    }
}
