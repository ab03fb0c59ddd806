#include "oracles.hpp"

#include <doctest.h>

using namespace roamscope;

TEST_CASE("hamiltonian and kinetic energy closed forms")
{
    const ModelParams p;
    const double m = reduced_mass(p);
    CHECK(hamiltonian_micro(p, {1.1, 0.0, 0.0, 0.0}) == doctest::Approx(-47.0).epsilon(1e-13));
    CHECK(kinetic_energy(p, {2.0, 0.0, 0.3, 0.0}) == 0.0);
    CHECK(kinetic_energy(p, {2.0, std::sqrt(m), 0.3, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));

    const PhaseState s{2.7, 0.31, 1.2, -0.44};
    const PhaseState d{2.7, 0.62, 1.2, -0.88};
    CHECK(hamiltonian_micro(p, d) - eval_U(p, 2.7, 1.2)
          == doctest::Approx(4.0 * (hamiltonian_micro(p, s) - eval_U(p, 2.7, 1.2))));
    CHECK(hamiltonian_micro(p, s) == doctest::Approx(kinetic_energy(p, s) + eval_U(p, 2.7, 1.2)));
    CHECK(kinetic_energy(p, s) == doctest::Approx(oracle::kinetic(p, 2.7, 0.31, -0.44)).epsilon(1e-15));
    CHECK_THROWS_AS(hamiltonian_micro(p, {0.0, 0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("momentum resolution on the shell")
{
    const ModelParams p;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ur(1.5, 14.0), ut(0.0, 6.28), uf(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double r = ur(rng), th = ut(rng);
        const double pr = uf(rng) * std::sqrt(reduced_mass(p));
        const auto s = resolve_momentum_on_constraint(p, r, th, FixedMomentum::p_r, pr, +1);
        CHECK(std::abs(kinetic_energy(p, s) - 0.5) < 1e-12);
        CHECK(s.p_theta >= 0.0);
        const double pt = uf(rng) * max_angular_momentum(p, r);
        const auto q = resolve_momentum_on_constraint(p, r, th, FixedMomentum::p_theta, pt, -1);
        CHECK(std::abs(kinetic_energy(p, q) - 0.5) < 1e-12);
        CHECK(q.p_r <= 0.0);
    }
    CHECK(max_angular_momentum(p, 3.6) == doctest::Approx(1.0 / std::sqrt(oracle::G(p, 3.6))).epsilon(1e-15));
    CHECK_THROWS_AS(resolve_momentum_on_constraint(p, 2.0, 0.0, FixedMomentum::p_r, 2.0, 1), OutsideEnergyShell);
    CHECK_FALSE(try_resolve_momentum(p, 2.0, 0.0, FixedMomentum::p_r, 2.0, 1).has_value());
}

TEST_CASE("scaled momenta and the isokinetic hamiltonian")
{
    const ModelParams p;
    std::mt19937_64 rng(22);
    for (int k = 0; k < 300; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng, 1.2, 14.0);
        const auto pi = momenta_to_pi(p, s);
        // K = e^{-U} (KE - 1/2)
        CHECK(std::abs(isokinetic_K(p, s.r, pi.pi_r, s.theta, pi.pi_theta)) * std::exp(eval_U(p, s.r, s.theta)) < 1e-12);
        const PhaseState back = pi_to_momenta(p, s.r, pi.pi_r, s.theta, pi.pi_theta);
        CHECK(back.p_r == doctest::Approx(s.p_r).epsilon(1e-14));
        CHECK(back.p_theta == doctest::Approx(s.p_theta).epsilon(1e-14));
    }
    CHECK(isokinetic_K(p, 500.0, 0.0, 0.3, 0.0) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(isokinetic_K(p, 2.5, 0.1, 0.4, 0.2) == doctest::Approx(isokinetic_K(p, 2.5, 0.1, 0.4 + std::numbers::pi, 0.2)));
}

TEST_CASE("field on the shell equals the literal isokinetic field")
{
    const ModelParams p;
    const FieldContext ctx(p);
    std::mt19937_64 rng(23);
    for (int k = 0; k < 300; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng, 1.2, 14.0);
        const State4 a = isokinetic_rate(ctx, s.packed());
        const State4 b = oracle::literal_rate(p, s.packed());
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(a[i] - b[i]) <= 1e-6 * std::max(1.0, std::abs(b[i])));
    }
}

TEST_CASE("kinetic energy is a first integral, on and off the shell")
{
    const ModelParams p;
    const FieldContext ctx(p);
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    for (int k = 0; k < 300; ++k) {
        PhaseState s = oracle::random_shell_state(p, rng, 1.2, 14.0);
        const double c = scale(rng);
        s.p_r *= c;
        s.p_theta *= c;
        const State4 f = isokinetic_rate(ctx, s.packed());
        const double m = reduced_mass(p), G = oracle::G(p, s.r);
        // dKE = p_r/m dp_r + p_theta G dp_theta - p_theta^2/(m r^3) dr
        const double dke = s.p_r / m * f[1] + s.p_theta * G * f[3] - s.p_theta * s.p_theta / (m * s.r * s.r * s.r) * f[0];
        CHECK(std::abs(dke) < 1e-10 * std::max(1.0, std::abs(f[1]) + std::abs(f[3])));
    }
}

TEST_CASE("jacobian against central differences")
{
    const ModelParams p;
    const FieldContext ctx(p);
    std::mt19937_64 rng(25);
    for (int k = 0; k < 100; ++k) {
        const PhaseState s = oracle::random_shell_state(p, rng, 1.2, 10.0);
        const State4 y = s.packed();
        const Matrix4 J = isokinetic_jacobian(ctx, y);
        for (int c = 0; c < 4; ++c) {
            State4 yp = y, ym = y;
            const double h = 1e-6;
            yp[c] += h;
            ym[c] -= h;
            const State4 fp = isokinetic_rate(ctx, yp), fm = isokinetic_rate(ctx, ym);
            for (int r = 0; r < 4; ++r) {
                const double fd = (fp[r] - fm[r]) / (2 * h);
                CHECK(std::abs(J(r, c) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("checked field entry point")
{
    const ModelParams p;
    const auto on = vector_field_isokinetic(p, resolve_momentum_on_constraint(p, 3.0, 0.2, FixedMomentum::p_r, 0.1, 1));
    CHECK_FALSE(on.off_constraint);
    CHECK(std::abs(on.constraint_residual) < 1e-12);
    const auto off = vector_field_isokinetic(p, {3.0, 2.0, 0.2, 0.5});
    CHECK(off.off_constraint);
    CHECK_THROWS_AS(vector_field_isokinetic(p, {0.0, 0.1, 0.0, 0.1}), DomainError);
}
