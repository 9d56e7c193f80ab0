// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "cbh/analytics.hpp"
#include "cbh/config.hpp"
#include "cbh/liouvillian.hpp"
#include "cbh/model.hpp"
#include "cbh/observables.hpp"
#include "cbh/runner.hpp"
#include "cbh/solvers.hpp"

#ifndef CBH_CLI_PATH
#define CBH_CLI_PATH "cbh"
#endif

using namespace cbh;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const ModelParams kRef{1.0, 0.05, 0.01, Variant::TlsResonator};

RunConfig reference(double t_hot, double nbar) {
    RunConfig c = default_config();
    c.baths.hot.temperature = t_hot;
    c.set_resonator_occupation(nbar);
    return c;
}

DensityMatrix ref_steady(double t_hot, double nbar, Liouvillian* keep = nullptr) {
    const RunConfig c = reference(t_hot, nbar);
    Liouvillian L = build_liouvillian(c, resolved_n_max(c));
    DensityMatrix rho = steady_state(L);
    if (keep) *keep = std::move(L);
    return rho;
}

void thermal_oracle(Outcome& o) {
    for (double nb : {1.0, 5.0, 20.0}) {
        RunConfig c = default_config();
        c.model.g = 0.0;
        c.set_resonator_occupation(nb);
        const int n = thermal_n_max(nb);
        const ReducedRates r{0.0, 0.0, spectral_response(c.baths.resonator, c.model.omega_b),
                             spectral_response(c.baths.resonator, -c.model.omega_b), 0.0, {}};
        const DensityMatrix rho = steady_state(build_reduced_me(r, n));
        const double dm = std::abs(mean_occupation(rho) - nb);
        const double dg = std::abs(g2_zero(rho) - 2.0);
        o.detail << " nb=" << nb << ":N=" << n << ",|dn|=" << fmt(dm) << ",|dg2|=" << fmt(dg);
        o.require(dm < 1e-6, "|<n> - nb| < 1e-6");
        o.require(dg < 1e-4, "|g2 - 2| < 1e-4");
    }
}

void polaron(Outcome& o) {
    for (int n : {30, 40}) {
        const Operator u = polaron_unitary(kRef, n);
        const Matrix d = (u.adjoint() * hamiltonian_tls_r(kRef, n) * u).matrix() -
                         polaron_hamiltonian(kRef, n).matrix();
        const auto idx = interior_indices(n, 10);
        double err = 0.0;
        for (int i : idx) {
            for (int j : idx) err = std::max(err, std::abs(d(i, j)));
        }
        o.detail << " N=" << n << ":max_err=" << fmt(err);
        o.require(err < 1e-6, "interior error < 1e-6");
    }
}

void limit_populations(Outcome& o) {
    const RunConfig base = default_config();
    const ReducedRates ref_rates =
        reduced_rates(kRef, base.baths, tls_stationary_sigma_z(kRef, base.baths),
                      SigmaZInterpretation::ExcitedPopulation);
    for (double nb : {1.0, 5.0, 10.0, 20.0}) {
        RunConfig c = base;
        c.set_resonator_occupation(nb);
        const double kb = c.baths.resonator.kappa;
        const ReducedRates r{ref_rates.gamma2_down, 0.0, spectral_response(c.baths.resonator, 0.05),
                             spectral_response(c.baths.resonator, -0.05), 0.0, {}};
        const double ratio = kb * nb / r.gamma2_down;
        const auto p = number_distribution(steady_state(build_reduced_me(r, 40)));
        const LimitPopulations lim = fp_limit_populations(nb);
        const double e0 = std::abs(p[0] / lim.p0 - 1.0), e1 = std::abs(p[1] / lim.p1 - 1.0);
        o.detail << " nb=" << nb << ":ratio=" << fmt(ratio) << ",P0=" << fmt(p[0]) << ",P1=" << fmt(p[1]);
        o.require(ratio < 0.01, "kappa_b nb / Gamma_down < 0.01");
        o.require(e0 < 0.05 && e1 < 0.05, "P0, P1 within 5%");
    }
}

void figure3(Outcome& o) {
    const auto p = number_distribution(ref_steady(2.0, 5.0));
    const LimitPopulations lim = fp_limit_populations(5.0);
    o.detail << " P0=" << fmt(p[0]) << " (" << fmt(lim.p0) << ") P1=" << fmt(p[1]) << " (" << fmt(lim.p1)
             << ") P0+P1=" << fmt(p[0] + p[1]);
    o.require(p[0] + p[1] > 0.95, "P0+P1 > 0.95");
    o.require(std::abs(p[0] / lim.p0 - 1.0) < 0.10, "P0 within 10%");
    o.require(std::abs(p[1] / lim.p1 - 1.0) < 0.10, "P1 within 10%");
}

void figure2(Outcome& o) {
    RunConfig c = default_config();
    c.outputs = {"mean_n"};
    c.sweep = SweepSpec{"baths.hot.temperature", default_t_hot_grid(), {5, 10, 15, 20}};
    const RunOutput r = run_sweep(c, 0);
    const std::size_t per = c.sweep->values.size();
    for (std::size_t f = 0; f < c.sweep->nbar_families.size(); ++f) {
        const double nb = c.sweep->nbar_families[f];
        double worst = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < per; ++i) {
            const double v = r.table.rows[f * per + i].back();
            finite = finite && std::isfinite(v);
            if (i > 0) {
                const double prev = r.table.rows[f * per + i - 1].back();
                worst = std::max(worst, (v - prev) / prev);
            }
        }
        const double end = r.table.rows[f * per + per - 1].back();
        o.detail << " nb=" << nb << ":<n>(2)=" << fmt(end) << ",max_rise=" << fmt(worst);
        o.require(finite, "all points solved");
        o.require(worst <= 0.01, "no rise above 1%");
        o.require(end < 0.5 * nb, "<n>(T_H=2) < nb/2");
    }
}

void figure4(Outcome& o) {
    const double cold = g2_zero(ref_steady(0.05, 5.0));
    const double hot = g2_zero(ref_steady(2.0, 5.0));
    o.detail << " g2(0)@0.05=" << fmt(cold) << " g2(0)@2=" << fmt(hot);
    o.require(cold > 1.0, "g2(0) > 1 at T_H=0.05");
    o.require(hot < 1.0, "g2(0) < 1 at T_H=2");

    const double kb = default_config().baths.resonator.kappa;
    const std::vector<double> taus = default_tau_grid(kb);
    for (double t : {1.0, 0.1}) {
        Liouvillian L = build_liouvillian(reference(t, 5.0), 30);
        const DensityMatrix rho = steady_state(L);
        const CorrelationSeries s = two_time_correlation(L, rho, taus);
        bool ok = true;
        double extreme = t == 1.0 ? INFINITY : -INFINITY;
        for (std::size_t i = 1; i < taus.size(); ++i) {
            if (taus[i] > 1.0 / kb * (1 + 1e-12)) break;
            const bool anti = s.values[0] < s.values[i];
            ok = ok && (t == 1.0 ? anti : s.values[0] > s.values[i]);
            extreme = t == 1.0 ? std::min(extreme, s.values[i]) : std::max(extreme, s.values[i]);
        }
        o.detail << " T_H=" << t << ":g2(0)=" << fmt(s.values[0]) << ",decade_" << (t == 1.0 ? "min" : "max")
                 << "=" << fmt(extreme);
        o.require(ok, t == 1.0 ? "antibunching at T_H=1" : "bunching at T_H=0.1");
    }
}

void regression(Outcome& o) {
    const double kb = default_config().baths.resonator.kappa;
    for (double t : {0.1, 1.0, 2.0}) {
        Liouvillian L = build_liouvillian(reference(t, 5.0), 30);
        const DensityMatrix rho = steady_state(L);
        const CorrelationSeries s = two_time_correlation(L, rho, {0.0, 100.0 / kb});
        const double d0 = std::abs(s.values[0] - g2_zero(rho));
        const double dl = std::abs(s.values[1] - 1.0);
        o.detail << " T_H=" << t << ":|g2(0)-eq|=" << fmt(d0) << ",|g2(100/kb)-1|=" << fmt(dl);
        o.require(d0 < 1e-10, "tau=0 matches single-time g2");
        o.require(dl < 0.02, "g2(100/kappa_b) within 2% of 1");
    }
}

void structural(Outcome& o) {
    double worst_trace = 0.0;
    for (double t : {0.05, 0.5, 2.0}) {
        for (double nb : {0.0, 5.0, 20.0}) {
            RunConfig c = reference(t, nb);
            for (MeVariant v : {MeVariant::Full, MeVariant::Filtered, MeVariant::Reduced}) {
                c.me_variant = v;
                c.reduced.sigma_z = SigmaZInterpretation::ExcitedPopulation;
                worst_trace = std::max(worst_trace, build_liouvillian(c, 20).trace_residual());
            }
            Baths open = c.baths;
            open.hot.filter.reset();
            open.cold.filter.reset();
            open.cold.temperature = 0.3;
            BuildOptions with_h;
            with_h.include_hamiltonian = true;
            worst_trace = std::max(worst_trace, build_full_me(kRef, open, 20, with_h).trace_residual());
        }
    }
    o.detail << " trace_residual=" << fmt(worst_trace);
    o.require(worst_trace < 1e-10, "trace conserved to 1e-10");

    // Positivity along the relaxation of a thermal start under the reference model.
    const RunConfig c = reference(2.0, 5.0);
    const int n = resolved_n_max(c);
    const Liouvillian L = build_liouvillian(c, n);
    Eigen::VectorXd pops = Eigen::VectorXd::Zero(2 * (n + 1));
    for (int k = 0; k <= n; ++k) pops(n + 1 + k) = std::pow(5.0 / 6.0, k);
    pops /= pops.sum();
    std::vector<double> grid{0.0};
    for (double t : log_grid(1.0, 1e8, 33)) grid.push_back(t);
    PropagateOptions po;
    po.positivity_tol = 1e-6;
    const Trajectory tr = propagate(L, DensityMatrix::from_diagonal(L.sig(), pops), grid, po);
    double min_eig = INFINITY;
    for (const auto& s : tr.states) min_eig = std::min(min_eig, s.min_eigenvalue());
    o.detail << " min_eig=" << fmt(min_eig);
    o.require(min_eig > -1e-6, "positivity along trajectory");

    // Parity under the pure two-photon generator.
    const Liouvillian two = build_reduced_me(ReducedRates{1e-3, 0, 0, 0, 0, {}}, 20);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(21);
    for (int k = 0; k <= 20; ++k) p(k) = std::pow(0.8, k);
    p /= p.sum();
    double odd0 = 0.0;
    for (int k = 1; k <= 20; k += 2) odd0 += p(k);
    std::vector<double> pgrid{0.0};
    for (double t : log_grid(1.0, 1e7, 29)) pgrid.push_back(t);
    const Trajectory pt = propagate(two, DensityMatrix::from_diagonal(two.sig(), p), pgrid);
    double parity_err = 0.0;
    for (const auto& s : pt.states) {
        const auto q = number_distribution(s);
        double odd = 0.0, even = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) (k % 2 ? odd : even) += q[k];
        parity_err = std::max({parity_err, std::abs(odd - odd0), std::abs(even - (1.0 - odd0))});
    }
    o.detail << " parity_err=" << fmt(parity_err);
    o.require(parity_err < 1e-8, "parity conserved to 1e-8");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path() / "cbh_acceptance_det";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string("\"") + CBH_CLI_PATH + "\" figure fig3 --out \"" +
                                (dir / run / "fig3.csv").string() + "\" > /dev/null";
        const int rc = std::system(cmd.c_str());
        o.require(rc == 0, std::string("cli run ") + run + " exited 0");
    }
    for (const char* f : {"fig3.csv", "fig3_inset.csv"}) {
        const std::string a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
        o.detail << " " << f << ":" << a.size() << "B";
        o.require(!a.empty() && a == b, std::string(f) + " byte-identical");
    }
    std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"1 thermal oracle", thermal_oracle},
        {"2 polaron diagonalization", polaron},
        {"3 two-photon limit populations", limit_populations},
        {"4 fig3 photon statistics", figure3},
        {"5 fig2 cooling curves", figure2},
        {"6 fig4 statistics and antibunching", figure4},
        {"7 regression-theorem consistency", regression},
        {"8 structural properties", structural},
        {"9 determinism of figure fig3", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(secs) << " s):" << o.detail.str()
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
