#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "prony/random.hpp"

using namespace prony;

TEST_CASE("seed zero reproduces the reference SplitMix64 stream")
{
    // published first outputs of SplitMix64 started from state 0
    CounterRng rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
    CHECK(rng.counter() == 3);
}

TEST_CASE("uniform and normal are built from the raw stream")
{
    CounterRng a(17), b(17);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == static_cast<double>(b.next() >> 11) / 9007199254740992.0);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CounterRng c(5), d(5);
    for (int i = 0; i < 100; ++i) {
        const double u1 = 1.0 - d.uniform();
        const double u2 = d.uniform();
        CHECK(c.normal() == std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2));
    }
    CHECK(c.counter() == 200);
}

TEST_CASE("normal samples have the right moments")
{
    CounterRng rng(99);
    double s = 0.0, s2 = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / count) < 0.01);
    CHECK(std::abs(s2 / count - 1.0) < 0.02);
}

TEST_CASE("simulation is deterministic in the seed")
{
    CounterRng a(123), b(123), c(124);
    const auto ea = simulate_torus(a, 2, 6, 0.1);
    const auto eb = simulate_torus(b, 2, 6, 0.1);
    const auto ec = simulate_torus(c, 2, 6, 0.1);
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(ea.points()[j] == eb.points()[j]);
        CHECK(ea.coefficients()[j] == eb.coefficients()[j]);
    }
    CHECK(ea.points()[0] != ec.points()[0]);

    CounterRng s1(7), s2(7);
    const auto sa = simulate_sphere(s1, 10, 0.2);
    const auto sb = simulate_sphere(s2, 10, 0.2);
    CHECK(sa.points() == sb.points());
    CHECK(sa.coefficients() == sb.coefficients());
}

TEST_CASE("simulated ensembles meet their targets")
{
    CounterRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto e = simulate_torus(rng, 1 + trial % 3, 5, 0.1);
        CHECK(torus_separation(e.points()) > 0.1);
        for (const auto& c : e.coefficients()) {
            CHECK(std::abs(c) >= 0.5);
            CHECK(std::abs(c) < 1.5);
        }
        const auto r = simulate_torus(rng, 2, 3, 0.2, true);
        CHECK(r.has_real_coefficients());

        const auto s = simulate_sphere(rng, 8, 0.4);
        CHECK(sphere_separation(s.points()) > 0.4);
        for (const auto& x : s.points()) CHECK(std::abs(x.norm() - 1.0) < 1e-14);
        for (double c : s.coefficients()) {
            CHECK(std::abs(c) >= 0.5);
            CHECK(std::abs(c) < 1.5);
        }
    }
}

TEST_CASE("unreachable separations report the best attempt")
{
    CounterRng rng(1);
    // ten points on the circle cannot all be 0.1 apart with margin
    try {
        simulate_torus(rng, 1, 10, 0.1);
        FAIL("expected SeparationUnreachable");
    } catch (const SeparationUnreachable& e) {
        CHECK(e.best_separation > 0.0);
        CHECK(e.best_separation <= 0.1);
        CHECK(std::string(e.what()).find("largest achieved separation") != std::string::npos);
    }
    CHECK_THROWS_AS(simulate_torus(rng, 1, 3, 0.5), Error);
    CHECK_THROWS_AS(simulate_sphere(rng, 0, 0.1), Error);
}
