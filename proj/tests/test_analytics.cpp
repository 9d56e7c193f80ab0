#include <doctest.h>

#include <cmath>

#include "cbh/analytics.hpp"
#include "cbh/liouvillian.hpp"
#include "cbh/observables.hpp"
#include "cbh/solvers.hpp"

using namespace cbh;

TEST_CASE("drift and diffusion") {
    const DriftDiffusion z = fp_drift_diffusion({0.0}, 2e-4, 5.0, 0.01);
    CHECK(std::abs(z.drift[0]) == 0.0);
    CHECK(std::abs(z.drift[1]) == 0.0);
    CHECK(std::abs(z.diffusion(0, 0)) == 0.0);
    CHECK(std::abs(z.diffusion(1, 1)) == 0.0);
    CHECK(z.diffusion(0, 1).real() == doctest::Approx(-1e-3));
    CHECK(z.diffusion(1, 0) == z.diffusion(0, 1));

    const std::complex<double> mu(0.3, -0.4);
    const DriftDiffusion lin = fp_drift_diffusion({mu}, 2e-4, 5.0, 0.0);
    CHECK(std::abs(lin.drift[0] - (-1e-4 * mu)) < 1e-18);
    CHECK(std::abs(lin.drift[1] - (-1e-4 * std::conj(mu))) < 1e-18);

    const DriftDiffusion one = fp_drift_diffusion({1.0}, 2e-4, 5.0, 0.01);
    CHECK(one.drift[0].real() == doctest::Approx(-0.0001 - 0.01).epsilon(1e-14));
    CHECK(one.drift[0].imag() == 0.0);
    CHECK(one.diffusion(0, 0).real() == doctest::Approx(-0.01));

    const DriftDiffusion c = fp_drift_diffusion({mu}, 2e-4, 5.0, 0.01);
    CHECK(std::abs(c.drift[0] - (-1e-4 * mu - 0.01 * mu * mu * std::conj(mu))) < 1e-16);
    CHECK(std::abs(c.diffusion(0, 0) - (-0.01 * mu * mu)) < 1e-16);
    CHECK(std::abs(c.diffusion(1, 1) - (-0.01 * std::conj(mu) * std::conj(mu))) < 1e-16);
    CHECK(c.diffusion(0, 1) == c.diffusion(1, 0));
}

TEST_CASE("limit populations") {
    const LimitPopulations z = fp_limit_populations(0.0);
    CHECK(z.p0 == 1.0);
    CHECK(z.p1 == 0.0);
    const LimitPopulations f = fp_limit_populations(5.0);
    CHECK(f.p0 == doctest::Approx(16.0 / 21.0).epsilon(1e-15));
    CHECK(f.p1 == doctest::Approx(5.0 / 21.0).epsilon(1e-15));
    const LimitPopulations inf = fp_limit_populations(INFINITY);
    CHECK(inf.p0 == 0.75);
    CHECK(inf.p1 == 0.25);
    CHECK(fp_limit_populations(1e12).p0 == doctest::Approx(0.75));
    CHECK_THROWS(fp_limit_populations(-1.0));

    double prev0 = 2.0, prev1 = -1.0;
    for (double nb = 0.0; nb <= 100.0; nb += 0.5) {
        const LimitPopulations l = fp_limit_populations(nb);
        CHECK(std::abs(l.p0 + l.p1 - 1.0) < 1e-15);
        CHECK(l.p0 < prev0);
        CHECK(l.p1 > prev1);
        prev0 = l.p0;
        prev1 = l.p1;
    }
}

TEST_CASE("reduced model reproduces the limit populations") {
    const double kappa = 1e-7, g2down = 1e-3;
    for (double nb : {1.0, 5.0, 10.0, 20.0}) {
        REQUIRE(kappa * nb / g2down < 0.01);
        const ReducedRates r{g2down, 0.0, kappa * (1 + nb), kappa * nb, 0.0, {}};
        const auto p = number_distribution(steady_state(build_reduced_me(r, 40)));
        const LimitPopulations lim = fp_limit_populations(nb);
        CHECK(std::abs(p[0] / lim.p0 - 1.0) < 0.05);
        CHECK(std::abs(p[1] / lim.p1 - 1.0) < 0.05);
    }
}
