#include "cbh/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "cbh/analytics.hpp"
#include "cbh/plot.hpp"

#ifndef CBH_VERSION
#define CBH_VERSION "0.1.0"
#endif

namespace cbh {

using nlohmann::json;

namespace {

json rates_to_json(const ReducedRates& r) {
    return {{"gamma2_down", r.gamma2_down}, {"gamma2_up", r.gamma2_up}, {"gamma1_down", r.gamma1_down},
            {"gamma1_up", r.gamma1_up},     {"gamma_deph", r.gamma_deph}, {"diagnostics", r.diagnostics}};
}

json point_to_json(const PointResult& p) {
    json j{{"n_max", p.n_max},
           {"relative_residual", p.relative_residual},
           {"clipped_eigenvalue", p.clipped_eigenvalue},
           {"note", p.note},
           {"failed", p.failed}};
    j["convergence_shift"] = p.convergence_shift ? json(*p.convergence_shift) : json(nullptr);
    if (p.rates) j["rates"] = rates_to_json(*p.rates);
    return j;
}

std::string sanitize(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
    }
    return s;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

ReducedRates rates_for(const RunConfig& c) {
    if (c.reduced.rates) return *c.reduced.rates;
    return reduced_rates(c.model, c.baths, tls_stationary_sigma_z(c.model, c.baths), c.reduced.sigma_z);
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<std::string> point_columns(const RunConfig& c) {
    std::vector<std::string> cols{"t_hot", "t_cold", "nbar_b", "n_max"};
    cols.insert(cols.end(), c.outputs.begin(), c.outputs.end());
    return cols;
}

std::vector<double> point_row(const RunConfig& c, const PointResult& p) {
    std::vector<double> row{c.baths.hot.temperature, c.baths.cold.temperature, c.resonator_occupation(),
                            static_cast<double>(p.n_max)};
    row.insert(row.end(), p.values.begin(), p.values.end());
    return row;
}

std::vector<std::string> base_meta(const RunConfig& c, const std::string& command) {
    return {"cbh " + std::string(version_string()), "command: " + command,
            "me_variant: " + to_string(c.me_variant),
            "units: omega_a = 1, hbar = k_B = 1; temperatures in omega_a",
            "model: omega_a=" + short_number(c.model.omega_a) + " omega_b=" + short_number(c.model.omega_b) +
                " g=" + short_number(c.model.g),
            "kappa: hot=" + short_number(c.baths.hot.kappa) + " cold=" + short_number(c.baths.cold.kappa) +
                " resonator=" + short_number(c.baths.resonator.kappa)};
}

json base_sidecar(const RunConfig& c, const std::string& command) {
    return {{"version", version_string()}, {"command", command}, {"config", config_to_json(c)}};
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& tail, const std::string& ext) {
    std::filesystem::path out = p;
    out.replace_filename(p.stem().string() + tail + ext);
    return out;
}

DensityMatrix thermal_times_ground(double nbar, int n_max) {
    Eigen::VectorXd pops = Eigen::VectorXd::Zero(2 * (n_max + 1));
    const double q = nbar / (1.0 + nbar);
    double norm = 0.0;
    for (int n = 0; n <= n_max; ++n) norm += std::pow(q, n);
    // TLS ground is index 1, so its block is the second half.
    for (int n = 0; n <= n_max; ++n) pops(n_max + 1 + n) = std::pow(q, n) / norm;
    return DensityMatrix::from_diagonal(SpaceSignature({2, n_max + 1}), pops);
}

}  // namespace

const char* version_string() { return CBH_VERSION; }

int default_n_max(double nbar) {
    if (nbar <= 5.0) return 30;
    return static_cast<int>(std::ceil(8.0 * nbar));
}

int thermal_n_max(double nbar, double tol) {
    if (nbar < 0.0) throw ModelError("thermal_n_max: negative occupation");
    if (nbar == 0.0) return 4;
    const double q = nbar / (1.0 + nbar);
    // Truncated-and-renormalized geometric moments against the exact ones.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, w = 1.0;
    for (int n = 0; n < 1'000'000; ++n) {
        s0 += w;
        s1 += n * w;
        s2 += static_cast<double>(n) * (n - 1) * w;
        w *= q;
        if (n < 4) continue;
        const double mean = s1 / s0;
        const double g2 = (s2 / s0) / (mean * mean);
        if (std::abs(mean - nbar) < tol * std::max(1.0, nbar) && std::abs(g2 - 2.0) < tol) return n;
    }
    throw NonConvergentError("thermal_n_max: no cutoff found", nbar);
}

int resolved_n_max(const RunConfig& c) { return c.n_max ? *c.n_max : default_n_max(c.resonator_occupation()); }

Liouvillian build_liouvillian(const RunConfig& c, int n_max, std::optional<ReducedRates>* rates_out) {
    BuildOptions opts;
    opts.include_hamiltonian = c.include_hamiltonian;
    switch (c.me_variant) {
        case MeVariant::Full:
            return build_full_me(c.model, c.baths, n_max, opts);
        case MeVariant::Filtered:
            return build_filtered_me(c.model, c.baths, n_max, opts);
        case MeVariant::Reduced: {
            const ReducedRates rates = rates_for(c);
            if (rates_out) *rates_out = rates;
            return build_reduced_me(rates, n_max);
        }
    }
    throw ConfigError("me_variant", "unhandled variant");
}

double observable(const std::string& name, const RunConfig& c, const DensityMatrix& rho,
                  const std::optional<ReducedRates>& rates) {
    if (name == "mean_n") return mean_occupation(rho);
    if (name == "g2_zero") return g2_zero(rho);
    if (name == "p0" || name == "p1" || name == "p2" || name == "p0_plus_p1") {
        const std::vector<double> p = number_distribution(rho);
        auto at = [&](std::size_t n) { return n < p.size() ? p[n] : 0.0; };
        if (name == "p0_plus_p1") return at(0) + at(1);
        return at(static_cast<std::size_t>(name[1] - '0'));
    }
    if (name == "sigma_z") {
        if (rho.sig().num_parts() == 2 && rho.sig().part(0) == 2) return tls_sigma_z(rho);
        return tls_stationary_sigma_z(c.model, c.baths);
    }
    if (name == "gamma2_down" || name == "gamma2_up") {
        const ReducedRates r = rates ? *rates : rates_for(c);
        return name == "gamma2_down" ? r.gamma2_down : r.gamma2_up;
    }
    throw ConfigError("outputs", "unknown observable '" + name + "'");
}

PointResult evaluate_point(const RunConfig& c) {
    validate_config(c);
    PointResult p;
    std::vector<std::string> notes = c.model.validate();

    auto solve = [&](int n_max, PointResult& into) {
        into.n_max = n_max;
        const Liouvillian L = build_liouvillian(c, n_max, &into.rates);
        SteadyStateResult ss = solve_steady_state(L);
        into.relative_residual = ss.relative_residual;
        into.clipped_eigenvalue = ss.clipped_eigenvalue;
        into.values.clear();
        for (const std::string& name : c.outputs) {
            try {
                into.values.push_back(observable(name, c, ss.rho, into.rates));
            } catch (const UndefinedObservableError& e) {
                into.values.push_back(std::nan(""));
                notes.push_back(e.what());
            }
        }
        into.rho = std::move(ss.rho);
    };

    solve(resolved_n_max(c), p);
    if (p.rates) notes.insert(notes.end(), p.rates->diagnostics.begin(), p.rates->diagnostics.end());

    if (c.check_convergence) {
        PointResult doubled;
        solve(2 * p.n_max, doubled);
        double shift = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (std::isfinite(p.values[i]) && std::isfinite(doubled.values[i])) {
                shift = std::max(shift, std::abs(doubled.values[i] - p.values[i]));
            }
        }
        p.convergence_shift = shift;
        if (shift >= 1e-4) notes.push_back("not converged in n_max: shift " + short_number(shift) + " on doubling");
    }
    for (std::size_t i = 0; i < notes.size(); ++i) p.note += (i ? "; " : "") + notes[i];
    return p;
}

PointResult evaluate_point_noexcept(const RunConfig& c) {
    try {
        return evaluate_point(c);
    } catch (const std::exception& e) {
        PointResult p;
        p.failed = true;
        try {
            p.n_max = resolved_n_max(c);
        } catch (...) {
        }
        p.values.assign(c.outputs.size(), std::nan(""));
        p.note = std::string("error: ") + e.what();
        return p;
    }
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string table_to_csv(const Table& t) {
    std::ostringstream os;
    for (const std::string& m : t.meta) os << "# " << m << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    if (t.has_notes) os << ",note";
    os << "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t i = 0; i < t.rows[r].size(); ++i) os << (i ? "," : "") << format_number(t.rows[r][i]);
        if (t.has_notes) os << "," << (r < t.notes.size() ? sanitize(t.notes[r]) : "");
        os << "\n";
    }
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p += ".meta.json";
    return p;
}

void write_table(const std::filesystem::path& path, const Table& t, const json& sidecar) {
    write_text(path, table_to_csv(t));
    json meta = sidecar;
    meta["columns"] = t.columns;
    write_text(sidecar_path(path), meta.dump(2) + "\n");
}

RunOutput run_single(const RunConfig& c) {
    RunOutput out;
    const PointResult p = evaluate_point(c);
    out.table.meta = base_meta(c, "single");
    out.table.columns = point_columns(c);
    out.table.rows.push_back(point_row(c, p));
    out.table.notes.push_back(p.note);
    out.table.has_notes = true;
    out.sidecar = base_sidecar(c, "single");
    out.sidecar["points"] = json::array({point_to_json(p)});
    return out;
}

RunOutput run_sweep(const RunConfig& c, int jobs) {
    if (!c.sweep) throw ConfigError("sweep", "sweep section required");
    validate_config(c);
    const SweepSpec& sw = *c.sweep;
    std::vector<std::optional<double>> families;
    if (sw.nbar_families.empty()) families.push_back(std::nullopt);
    for (double f : sw.nbar_families) families.push_back(f);

    std::vector<RunConfig> points;
    for (const auto& f : families) {
        for (double v : sw.values) {
            RunConfig pc = c;
            pc.sweep.reset();
            if (f) pc.set_resonator_occupation(*f);
            apply_parameter(pc, sw.parameter, v);
            points.push_back(std::move(pc));
        }
    }
    std::vector<PointResult> results(points.size());
    parallel_for(points.size(), jobs, [&](std::size_t i) {
        results[i] = evaluate_point_noexcept(points[i]);
        results[i].rho.reset();
    });

    static const std::vector<std::string> aliased{"baths.hot.temperature", "baths.cold.temperature",
                                                  "baths.resonator.nbar", "n_max"};
    const bool extra = std::find(aliased.begin(), aliased.end(), sw.parameter) == aliased.end();

    RunOutput out;
    out.table.meta = base_meta(c, "sweep");
    out.table.meta.push_back("sweep: " + sw.parameter + " (" + std::to_string(sw.values.size()) + " points x " +
                             std::to_string(families.size()) + " families)");
    out.table.columns = point_columns(c);
    if (extra) out.table.columns.insert(out.table.columns.begin(), sw.parameter);
    out.table.has_notes = true;
    out.sidecar = base_sidecar(c, "sweep");
    out.sidecar["points"] = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<double> row = point_row(points[i], results[i]);
        if (extra) row.insert(row.begin(), read_parameter(points[i], sw.parameter));
        out.table.rows.push_back(std::move(row));
        out.table.notes.push_back(results[i].note);
        out.sidecar["points"].push_back(point_to_json(results[i]));
    }
    return out;
}

std::vector<double> default_t_hot_grid() { return log_grid(0.05, 2.0, 40); }

namespace {

PlotSpec sweep_plot(const RunOutput& run, const std::string& title, const std::string& column,
                    const std::string& y_label, double reference) {
    const auto& cols = run.table.columns;
    const auto ci = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), column) - cols.begin());
    const auto ti = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "t_hot") - cols.begin());
    const auto ni = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "nbar_b") - cols.begin());
    PlotSpec spec{title, "T_H", y_label, true, {}, reference};
    for (const auto& row : run.table.rows) {
        const std::string name = "nbar_b = " + short_number(row[ni]);
        if (spec.series.empty() || spec.series.back().name != name) spec.series.push_back({name, {}, {}, false});
        spec.series.back().x.push_back(row[ti]);
        spec.series.back().y.push_back(row[ci]);
    }
    return spec;
}

RunConfig figure_sweep_config(const FigureOptions& o, std::vector<double> default_families,
                              std::vector<std::string> outputs) {
    RunConfig c = o.base;
    c.outputs = std::move(outputs);
    SweepSpec sw;
    sw.parameter = "baths.hot.temperature";
    sw.values = o.t_hot_grid ? *o.t_hot_grid : default_t_hot_grid();
    sw.nbar_families = o.nbar_families ? *o.nbar_families : std::move(default_families);
    c.sweep = sw;
    return c;
}

FigureFiles figure2(const FigureOptions& o) {
    FigureFiles files;
    const RunConfig c = figure_sweep_config(o, {5, 10, 15, 20}, {"mean_n"});
    RunOutput run = run_sweep(c, o.jobs);
    run.table.meta[1] = "command: figure fig2";
    run.sidecar["command"] = "figure fig2";
    write_table(o.out, run.table, run.sidecar);
    files.written = {o.out, sidecar_path(o.out)};
    if (o.plot) {
        const auto svg = with_suffix(o.out, "", ".svg");
        write_text(svg, svg_line_chart(sweep_plot(run, "Stationary mean occupation", "mean_n", "<n>",
                                                  std::nan(""))));
        files.written.push_back(svg);
    }
    return files;
}

FigureFiles figure3(const FigureOptions& o) {
    FigureFiles files;
    RunConfig c = o.base;
    if (o.nbar_families && !o.nbar_families->empty()) c.set_resonator_occupation(o.nbar_families->front());
    c.outputs = {"p0", "p1", "p0_plus_p1", "mean_n"};
    c.sweep.reset();
    const double nbar = c.resonator_occupation();
    const int n_max = resolved_n_max(c);

    std::optional<ReducedRates> rates;
    const Liouvillian L = build_liouvillian(c, n_max, &rates);
    const SteadyStateResult ss = solve_steady_state(L);
    const std::vector<double> p = number_distribution(ss.rho);
    const LimitPopulations lim = fp_limit_populations(nbar);

    Table bars;
    bars.meta = base_meta(c, "figure fig3");
    bars.meta.push_back("t_hot=" + short_number(c.baths.hot.temperature) +
                        " t_cold=" + short_number(c.baths.cold.temperature) + " nbar_b=" + short_number(nbar) +
                        " n_max=" + std::to_string(n_max));
    bars.meta.push_back("p_analytic: strong two-photon cooling limit (3nb+1)/(4nb+1), nb/(4nb+1), zero above n=1");
    bars.columns = {"n", "p_numeric", "p_analytic"};
    const int shown = std::min(n_max, 9);
    for (int n = 0; n <= shown; ++n) {
        const double an = n == 0 ? lim.p0 : n == 1 ? lim.p1 : 0.0;
        bars.rows.push_back({static_cast<double>(n), p[static_cast<std::size_t>(n)], an});
    }

    // Inset: relaxation from thermal resonator x TLS ground.
    std::vector<double> times{0.0};
    for (double t : log_grid(1.0, 1e8, 57)) times.push_back(t);
    const Trajectory traj = propagate(L, thermal_times_ground(nbar, n_max), times);
    Table inset;
    inset.meta = base_meta(c, "figure fig3 inset");
    inset.meta.push_back("initial state: thermal resonator (nbar_b=" + short_number(nbar) + ") x TLS ground");
    inset.meta.push_back("time in units of 1/omega_a");
    inset.columns = {"t", "p0", "p1", "p0_plus_p1", "sum_p"};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const std::vector<double> pk = number_distribution(traj.states[k]);
        double sum = 0.0;
        for (double v : pk) sum += v;
        inset.rows.push_back({traj.times[k], pk[0], pk[1], pk[0] + pk[1], sum});
    }

    json side = base_sidecar(c, "figure fig3");
    side["n_max"] = n_max;
    side["relative_residual"] = ss.relative_residual;
    side["clipped_eigenvalue"] = ss.clipped_eigenvalue;
    side["analytic"] = {{"p0", lim.p0}, {"p1", lim.p1}};
    side["inset_initial_state"] = "thermal resonator at nbar_b times TLS ground state";
    const auto inset_path = with_suffix(o.out, "_inset", ".csv");
    write_table(o.out, bars, side);
    write_table(inset_path, inset, side);
    files.written = {o.out, sidecar_path(o.out), inset_path, sidecar_path(inset_path)};

    if (o.plot) {
        std::vector<std::string> cats;
        PlotSeries num{"numerical", {}, {}, false}, ana{"analytic", {}, {}, false};
        for (const auto& r : bars.rows) {
            cats.push_back(std::to_string(static_cast<int>(r[0])));
            num.y.push_back(r[1]);
            ana.y.push_back(r[2]);
        }
        const auto svg = with_suffix(o.out, "", ".svg");
        write_text(svg, svg_bar_chart("Photon-number distribution", cats, {num, ana}));
        PlotSpec spec{"Relaxation of the photon statistics", "omega_a t", "probability", true, {}, std::nan("")};
        const char* names[] = {"P0", "P1", "P0+P1", "sum Pn"};
        for (std::size_t col = 1; col <= 4; ++col) {
            PlotSeries s{names[col - 1], {}, {}, col >= 3};
            for (const auto& r : inset.rows) {
                if (r[0] <= 0.0) continue;
                s.x.push_back(r[0]);
                s.y.push_back(r[col]);
            }
            spec.series.push_back(std::move(s));
        }
        const auto svg_inset = with_suffix(o.out, "_inset", ".svg");
        write_text(svg_inset, svg_line_chart(spec));
        files.written.push_back(svg);
        files.written.push_back(svg_inset);
    }
    return files;
}

FigureFiles figure4(const FigureOptions& o) {
    FigureFiles files;
    const RunConfig c = figure_sweep_config(o, {5}, {"g2_zero", "mean_n"});
    RunOutput run = run_sweep(c, o.jobs);
    run.table.meta[1] = "command: figure fig4";
    run.sidecar["command"] = "figure fig4";
    write_table(o.out, run.table, run.sidecar);
    files.written = {o.out, sidecar_path(o.out)};

    // Inset: g2(tau) at two hot-bath temperatures, first nbar_b family.
    const std::vector<double> t_hots{0.1, 1.0};
    RunConfig ic = o.base;
    ic.sweep.reset();
    ic.set_resonator_occupation(c.sweep->nbar_families.front());
    const std::vector<double> taus = default_tau_grid(ic.baths.resonator.kappa);
    std::vector<CorrelationSeries> series(t_hots.size());
    std::vector<int> n_maxes(t_hots.size());
    parallel_for(t_hots.size(), o.jobs, [&](std::size_t k) {
        RunConfig pc = ic;
        pc.baths.hot.temperature = t_hots[k];
        n_maxes[k] = resolved_n_max(pc);
        const Liouvillian L = build_liouvillian(pc, n_maxes[k]);
        series[k] = two_time_correlation(L, steady_state(L), taus);
    });
    Table inset;
    inset.meta = base_meta(ic, "figure fig4 inset");
    inset.meta.push_back("nbar_b=" + short_number(ic.resonator_occupation()) + "; tau in units of 1/omega_a");
    inset.columns = {"tau", "kappa_b_tau"};
    for (double t : t_hots) inset.columns.push_back("g2_t_hot_" + short_number(t));
    for (std::size_t i = 0; i < taus.size(); ++i) {
        std::vector<double> row{taus[i], taus[i] * ic.baths.resonator.kappa};
        for (const auto& s : series) row.push_back(s.values[i]);
        inset.rows.push_back(std::move(row));
    }
    json side = base_sidecar(ic, "figure fig4 inset");
    side["t_hot"] = t_hots;
    side["n_max"] = n_maxes;
    side["normalization"] = json::array();
    for (const auto& s : series) side["normalization"].push_back(s.normalization);
    const auto inset_path = with_suffix(o.out, "_inset", ".csv");
    write_table(inset_path, inset, side);
    files.written.push_back(inset_path);
    files.written.push_back(sidecar_path(inset_path));

    if (o.plot) {
        const auto svg = with_suffix(o.out, "", ".svg");
        write_text(svg, svg_line_chart(sweep_plot(run, "Second-order coherence g2(0)", "g2_zero", "g2(0)", 1.0)));
        PlotSpec spec{"g2(tau)", "kappa_b tau", "g2(tau)", true, {}, 1.0};
        for (std::size_t k = 0; k < t_hots.size(); ++k) {
            PlotSeries s{"T_H = " + short_number(t_hots[k]), {}, {}, k == 1};
            for (std::size_t i = 0; i < taus.size(); ++i) {
                if (taus[i] <= 0.0) continue;
                s.x.push_back(taus[i] * ic.baths.resonator.kappa);
                s.y.push_back(series[k].values[i]);
            }
            spec.series.push_back(std::move(s));
        }
        const auto svg_inset = with_suffix(o.out, "_inset", ".svg");
        write_text(svg_inset, svg_line_chart(spec));
        files.written.push_back(svg);
        files.written.push_back(svg_inset);
    }
    return files;
}

}  // namespace

FigureFiles reproduce_figure(const std::string& fig_id, const FigureOptions& opts) {
    if (fig_id == "fig2") return figure2(opts);
    if (fig_id == "fig3") return figure3(opts);
    if (fig_id == "fig4") return figure4(opts);
    throw ConfigError("figure", "unknown figure id '" + fig_id + "' (expected fig2|fig3|fig4)");
}

}  // namespace cbh
