#include <doctest.h>

#include <cmath>
#include <random>

#include "cbh/config.hpp"
#include "cbh/liouvillian.hpp"
#include "cbh/observables.hpp"
#include "cbh/solvers.hpp"
#include "helpers.hpp"

using namespace cbh;
using namespace cbh::testing;

namespace {

const ModelParams kRef{1.0, 0.05, 0.01, Variant::TlsResonator};

Liouvillian thermal_damping(double kappa, double nbar, int n_max) {
    return build_reduced_me(ReducedRates{0, 0, kappa * (1 + nbar), kappa * nbar, 0, {}}, n_max);
}

double geometric(double nbar, int n) { return std::pow(nbar, n) / std::pow(1 + nbar, n + 1); }

std::vector<double> linear_grid(double t1, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(t1 * i / (points - 1));
    return g;
}

double parity(const DensityMatrix& rho, int which) {
    const auto p = number_distribution(rho);
    double s = 0.0;
    for (std::size_t n = which; n < p.size(); n += 2) s += p[n];
    return s;
}

}  // namespace

TEST_CASE("thermal steady state under linear damping") {
    const double nbar = 5.0;
    const SteadyStateResult r = solve_steady_state(thermal_damping(1e-3, nbar, 60));
    CHECK(r.relative_residual < 1e-10);
    const auto p = number_distribution(r.rho);
    const double norm = 1.0 - std::pow(nbar / (1 + nbar), 61);
    double dev_trunc = 0.0;
    for (int n = 0; n <= 60; ++n) dev_trunc = std::max(dev_trunc, std::abs(p[n] - geometric(nbar, n) / norm));
    CHECK(dev_trunc < 1e-10);

    const auto p80 = number_distribution(steady_state(thermal_damping(1e-3, nbar, 80)));
    double dev = 0.0;
    for (int n = 0; n <= 80; ++n) dev = std::max(dev, std::abs(p80[n] - geometric(nbar, n)));
    CHECK(dev < 1e-6);
}

TEST_CASE("linear damping fixed point occupation") {
    const double down = 3e-3, up = 1e-3;
    const DensityMatrix rho = steady_state(build_reduced_me(ReducedRates{0, 0, down, up, 0, {}}, 80));
    CHECK(mean_occupation(rho) == doctest::Approx(up / (down - up)).epsilon(1e-10));
}

TEST_CASE("zero-temperature two-photon cascade reaches vacuum") {
    const DensityMatrix rho = steady_state(build_reduced_me(ReducedRates{1e-2, 0, 1e-8, 0, 0, {}}, 20));
    CHECK(number_distribution(rho)[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate and invalid generators are reported") {
    CHECK_THROWS_AS(solve_steady_state(build_reduced_me(ReducedRates{1e-2, 0, 0, 0, 0, {}}, 10)),
                    DegenerateSteadyStateError);
    CHECK_THROWS_AS(solve_steady_state(build_reduced_me(ReducedRates{}, 10)), DegenerateSteadyStateError);
    SparseMatrix leaky(4, 4);
    leaky.insert(0, 0) = -1.0;
    const Liouvillian bad(SpaceSignature({2}), leaky, MeVariant::Reduced, {}, false);
    CHECK_THROWS_AS(solve_steady_state(bad), SolverError);
}

TEST_CASE("reference steady state is two-photon cooled") {
    const DensityMatrix rho = steady_state(build_filtered_me(kRef, default_config().baths, 30));
    const auto p = number_distribution(rho);
    CHECK(p[0] + p[1] > 0.95);
    CHECK(mean_occupation(rho) < 5.0);
    CHECK(rho.min_eigenvalue() > -1e-8);
}

TEST_CASE("propagation with a zero generator is constant") {
    std::mt19937 rng(2);
    const DensityMatrix rho = random_state(SpaceSignature({7}), rng);
    const Liouvillian zero = build_reduced_me(ReducedRates{}, 6);
    for (Integrator m : {Integrator::Implicit, Integrator::Explicit}) {
        PropagateOptions o;
        o.method = m;
        const Trajectory tr = propagate(zero, rho, {0.0, 1.0, 10.0}, o);
        for (const auto& s : tr.states) CHECK(max_abs(s.matrix() - rho.matrix()) < 1e-14);
    }
}

TEST_CASE("single-quantum decay matches the exponential law") {
    const double kappa = 0.7;
    const Liouvillian L = build_reduced_me(ReducedRates{0, 0, kappa, 0, 0, {}}, 4);
    const auto grid = linear_grid(6.0, 31);
    for (Integrator m : {Integrator::Implicit, Integrator::Explicit}) {
        PropagateOptions o;
        o.method = m;
        PropagationStats stats;
        const Trajectory tr = propagate(L, fock_state(4, 1), grid, o, &stats);
        CHECK(stats.accepted > 0);
        double err = 0.0, drift = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            err = std::max(err, std::abs(number_distribution(tr.states[k])[1] - std::exp(-kappa * grid[k])));
            drift = std::max(drift, std::abs(tr.states[k].matrix().trace() - 1.0));
        }
        CHECK(err < 1e-6);
        CHECK(drift < 1e-8);
    }
}

TEST_CASE("two-photon decay conserves parity and collapses to {0, 1}") {
    const Liouvillian L = build_reduced_me(ReducedRates{1.0, 0, 0, 0, 0, {}}, 12);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(13);
    p(3) = 0.5;
    p(4) = 0.3;
    p(7) = 0.2;
    const DensityMatrix rho0 = DensityMatrix::from_diagonal(SpaceSignature({13}), p);
    std::vector<double> grid{0.0};
    for (double t : log_grid(1e-3, 1e3, 25)) grid.push_back(t);
    const Trajectory tr = propagate(L, rho0, grid);
    for (const auto& s : tr.states) {
        CHECK(std::abs(parity(s, 1) - 0.7) < 1e-8);
        CHECK(std::abs(parity(s, 0) - 0.3) < 1e-8);
        CHECK(s.min_eigenvalue() > -1e-6);
    }
    const auto last = number_distribution(tr.states.back());
    CHECK(last[0] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(last[1] == doctest::Approx(0.7).epsilon(1e-8));

    const Trajectory cascade = propagate(L, fock_state(12, 3), {0.0, 1e4});
    CHECK(number_distribution(cascade.states.back())[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("steady state is a fixed point of propagation") {
    const Liouvillian L = build_filtered_me(kRef, default_config().baths, 20);
    const DensityMatrix ss = steady_state(L);
    const Trajectory tr = propagate(L, ss, {0.0, 1e2, 1e5, 1e8});
    const auto p0 = number_distribution(ss);
    for (const auto& s : tr.states) {
        const auto p = number_distribution(s);
        for (std::size_t n = 0; n < p.size(); ++n) CHECK(std::abs(p[n] - p0[n]) < 1e-7);
    }
}

TEST_CASE("grid validation") {
    const Liouvillian L = thermal_damping(1.0, 1.0, 5);
    CHECK_THROWS_AS(propagate(L, fock_state(5, 0), {1.0, 0.5}), SolverError);
    CHECK_THROWS_AS(propagate(L, fock_state(5, 0), {}), SolverError);
    CHECK_THROWS_AS(propagate(L, fock_state(6, 0), {0.0, 1.0}), DimensionError);
    PropagateOptions o;
    o.method = Integrator::Explicit;
    o.max_steps = 3;
    CHECK_THROWS_AS(propagate(thermal_damping(1e3, 1.0, 5), fock_state(5, 0), {0.0, 100.0}, o), StiffnessError);
}

TEST_CASE("correlation of a thermal state") {
    const double kappa = 0.1;
    const Liouvillian L = thermal_damping(kappa, 2.0, 80);
    const DensityMatrix ss = steady_state(L);
    const auto taus = default_tau_grid(kappa, 16);
    const CorrelationSeries c = two_time_correlation(L, ss, taus);
    CHECK(c.values.size() == taus.size());
    CHECK(std::abs(c.values.front() - g2_zero(ss)) < 1e-10);
    CHECK(c.values.front() == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(c.values.back() - 1.0) < 0.02);
    CHECK(c.normalization == doctest::Approx(mean_occupation(ss) * mean_occupation(ss)).epsilon(1e-12));
    for (double v : c.values) CHECK(v > -1e-8);

    const Liouvillian cold = thermal_damping(kappa, 0.0, 10);
    CHECK_THROWS_AS(two_time_correlation(cold, steady_state(cold), taus), UndefinedObservableError);
}

TEST_CASE("grids") {
    const auto g = log_grid(1.0, 100.0, 3);
    CHECK(g.size() == 3);
    CHECK(g[1] == doctest::Approx(10.0));
    CHECK(g.back() == 100.0);
    const auto t = default_tau_grid(1e-7);
    CHECK(t.size() == 32);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == doctest::Approx(1e6));
    CHECK(t.back() == doctest::Approx(1e9));
    CHECK_THROWS(log_grid(0.0, 1.0, 3));
    CHECK_THROWS(default_tau_grid(0.0));
}
