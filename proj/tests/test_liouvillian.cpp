#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "cbh/config.hpp"
#include "cbh/liouvillian.hpp"
#include "cbh/observables.hpp"
#include "cbh/solvers.hpp"
#include "helpers.hpp"

using namespace cbh;
using namespace cbh::testing;

namespace {

const ModelParams kRef{1.0, 0.05, 0.01, Variant::TlsResonator};

Baths ref_baths(double t_hot = 2.0) {
    RunConfig c = default_config();
    c.baths.hot.temperature = t_hot;
    return c.baths;
}

std::set<std::string> labels(const Liouvillian& L) {
    std::set<std::string> out;
    for (const auto& t : L.terms()) out.insert(t.label);
    return out;
}

double rate(const Liouvillian& L, const std::string& label) {
    for (const auto& t : L.terms()) {
        if (t.label == label) return t.rate;
    }
    return 0.0;
}

void check_trace_preserving(const Liouvillian& L) { CHECK(L.trace_residual() < 1e-10); }

void check_spectrum(const Liouvillian& L) {
    Eigen::ComplexEigenSolver<Matrix> es(L.dense());
    const auto& ev = es.eigenvalues();
    double max_re = -INFINITY, min_abs = INFINITY;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        max_re = std::max(max_re, ev(i).real());
        min_abs = std::min(min_abs, std::abs(ev(i)));
    }
    CHECK(min_abs < 1e-10);
    CHECK(max_re < 1e-10);
}

}  // namespace

TEST_CASE("me variant names") {
    for (MeVariant v : {MeVariant::Full, MeVariant::Filtered, MeVariant::Reduced}) {
        CHECK(parse_me_variant(to_string(v)) == v);
    }
    CHECK_THROWS(parse_me_variant("bogus"));
    CHECK(parse_sigma_z_interpretation(to_string(SigmaZInterpretation::ExcitedPopulation)) ==
          SigmaZInterpretation::ExcitedPopulation);
}

TEST_CASE("bath list validation") {
    const Baths b = ref_baths();
    std::vector<BathSpec> ok{b.resonator, b.hot, b.cold};
    CHECK(Baths::from_list(ok).hot.temperature == 2.0);
    std::vector<BathSpec> dup{b.hot, b.hot, b.resonator};
    CHECK_THROWS_AS(Baths::from_list(dup), ModelError);
    std::vector<BathSpec> missing{b.hot, b.cold};
    CHECK_THROWS_AS(Baths::from_list(missing), ModelError);
}

TEST_CASE("every builder conserves trace") {
    for (double t : {0.0, 0.3, 2.0}) {
        const Baths b = ref_baths(t);
        check_trace_preserving(build_filtered_me(kRef, b, 12));
        check_trace_preserving(build_full_me(kRef, b, 12));
        Baths open = b;
        open.hot.filter.reset();
        open.cold.filter.reset();
        open.hot.temperature = t;
        open.cold.temperature = 0.5 * t;
        check_trace_preserving(build_full_me(kRef, open, 12));
        BuildOptions with_h;
        with_h.include_hamiltonian = true;
        const Liouvillian lh = build_full_me(kRef, open, 12, with_h);
        CHECK(lh.has_hamiltonian());
        check_trace_preserving(lh);
    }
    check_trace_preserving(build_reduced_me(ReducedRates{1e-3, 1e-5, 2e-7, 1e-7, 3e-6, {}}, 20));
}

TEST_CASE("liouvillian spectra are dissipative") {
    Baths open = ref_baths(1.0);
    open.hot.filter.reset();
    open.cold.filter.reset();
    open.cold.temperature = 0.4;
    open.resonator.kappa = 1e-3;
    check_spectrum(build_full_me(kRef, open, 6));
    check_spectrum(build_filtered_me(kRef, ref_baths(2.0), 6));
    BuildOptions with_h;
    with_h.include_hamiltonian = true;
    check_spectrum(build_filtered_me(kRef, ref_baths(0.5), 5, with_h));
    check_spectrum(build_reduced_me(ReducedRates{1e-3, 1e-5, 2e-4, 1e-4, 3e-5, {}}, 10));
}

TEST_CASE("uncoupled full model keeps only bare terms") {
    Baths b = ref_baths(0.0);
    b.hot.filter.reset();
    b.cold.filter.reset();
    const Liouvillian L = build_full_me(ModelParams{1.0, 0.05, 0.0}, b, 8);
    CHECK(labels(L) == std::set<std::string>{"C:D[s-]", "H:D[s-]", "R:D[b]", "R:D[b+]"});
    CHECK(rate(L, "R:D[b]") / rate(L, "R:D[b+]") ==
          doctest::Approx(std::exp(0.05 / b.resonator.temperature)).epsilon(1e-12));
}

TEST_CASE("zero-temperature full model relaxes the TLS") {
    Baths b = ref_baths(0.0);
    b.hot.filter.reset();
    b.cold.filter.reset();
    b.resonator.temperature = 0.0;
    b.resonator.kappa = 1e-3;
    const DensityMatrix rho = steady_state(build_full_me(kRef, b, 10));
    const double excited = 0.5 * (tls_sigma_z(rho) + 1.0);
    CHECK(excited < 1e-6);
}

TEST_CASE("filtered model at zero temperature") {
    Baths b = ref_baths(0.0);
    const Liouvillian L = build_filtered_me(kRef, b, 8);
    CHECK(labels(L) == std::set<std::string>{"C:D[s-]", "C:D[s- n]", "H:D[s- b+^2]", "R:D[b]", "R:D[b+]"});
    const double eta3 = std::pow(kRef.eta(), 3);
    CHECK(rate(L, "C:D[s- n]") == doctest::Approx(eta3 * 0.02).epsilon(1e-14));
    CHECK(rate(L, "H:D[s- b+^2]") == doctest::Approx(eta3 * 0.02).epsilon(1e-14));
}

TEST_CASE("filtered model hot-bath weights obey detailed balance") {
    for (double t : {0.1, 0.5, 2.0}) {
        const Liouvillian L = build_filtered_me(kRef, ref_baths(t), 8);
        CHECK(rate(L, "H:D[s- b+^2]") / rate(L, "H:D[s+ b^2]") ==
              doctest::Approx(std::exp(kRef.omega_minus() / t)).epsilon(1e-12));
    }
}

TEST_CASE("filtered model needs filters on the right transitions") {
    Baths b = ref_baths();
    b.hot.filter.reset();
    CHECK_THROWS_AS(build_filtered_me(kRef, b, 8), ModelError);
    b = ref_baths();
    b.hot.filter->center = 0.95;
    CHECK_THROWS_AS(build_filtered_me(kRef, b, 8), ModelError);
    CHECK_THROWS_AS(build_filtered_me(kRef, ref_baths(), 3), DimensionError);
}

TEST_CASE("full model with ideal filters equals the filtered model") {
    const Baths b = ref_baths(2.0);
    const Liouvillian full = build_full_me(kRef, b, 30);
    const Liouvillian filt = build_filtered_me(kRef, b, 30);
    CHECK((Matrix(full.matrix()) - Matrix(filt.matrix())).cwiseAbs().maxCoeff() < 1e-15);
    const DensityMatrix r1 = steady_state(full), r2 = steady_state(filt);
    CHECK(std::abs(mean_occupation(r1) - mean_occupation(r2)) < 1e-6);
    CHECK(std::abs(g2_zero(r1) - g2_zero(r2)) < 1e-6);
}

TEST_CASE("coherent part leaves diagonal observables unchanged") {
    BuildOptions with_h;
    with_h.include_hamiltonian = true;
    const DensityMatrix r0 = steady_state(build_filtered_me(kRef, ref_baths(1.0), 20));
    const DensityMatrix r1 = steady_state(build_filtered_me(kRef, ref_baths(1.0), 20, with_h));
    CHECK(std::abs(mean_occupation(r0) - mean_occupation(r1)) < 1e-10);
}

TEST_CASE("reduced rates") {
    const Baths b = ref_baths(2.0);
    const ReducedRates lit = reduced_rates(kRef, b, -1.0);
    CHECK(lit.gamma2_down == 0.0);
    CHECK(lit.gamma2_up == 0.0);
    CHECK_FALSE(lit.diagnostics.empty());
    CHECK(lit.gamma1_down / lit.gamma1_up == doctest::Approx(std::exp(0.05 / b.resonator.temperature)).epsilon(1e-12));

    const double sz = tls_stationary_sigma_z(kRef, b);
    CHECK(sz == doctest::Approx(-1.0));
    const ReducedRates ex = reduced_rates(kRef, b, sz, SigmaZInterpretation::ExcitedPopulation);
    CHECK(ex.gamma2_down > 100.0 * b.resonator.kappa * 5.0);
    CHECK(ex.gamma2_up < 1e-3 * ex.gamma2_down);
    CHECK_THROWS_AS(reduced_rates(kRef, b, 1.5), ModelError);
}

TEST_CASE("reduced model assembly") {
    const Liouvillian zero = build_reduced_me(ReducedRates{}, 6);
    CHECK(zero.matrix().nonZeros() == 0);
    CHECK(zero.dim() == 7);
    CHECK_THROWS_AS(build_reduced_me(ReducedRates{-1.0, 0, 0, 0, 0, {}}, 6), ModelError);
    CHECK_THROWS_AS(build_reduced_me(ReducedRates{}, 3), DimensionError);
    const Liouvillian L = build_reduced_me(ReducedRates{1.0, 0.0, 0.2, 0.1, 0.0, {}}, 6);
    CHECK(labels(L) == std::set<std::string>{"D[b^2]", "D[b]", "D[b+]"});
}

TEST_CASE("reduced model tracks the filtered model in the cooling regime") {
    const Baths b = ref_baths(2.0);
    const DensityMatrix full = steady_state(build_filtered_me(kRef, b, 30));
    const ReducedRates r = reduced_rates(kRef, b, tls_stationary_sigma_z(kRef, b),
                                         SigmaZInterpretation::ExcitedPopulation);
    const DensityMatrix red = steady_state(build_reduced_me(r, 30));
    CHECK(std::abs(mean_occupation(red) / mean_occupation(full) - 1.0) < 0.05);
}
