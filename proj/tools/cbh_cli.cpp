// Command-line front-end: single points, sweeps, figure recipes, config checks.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "cbh/config.hpp"
#include "cbh/plot.hpp"
#include "cbh/runner.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    int n_max = 0;
    std::string me;
    int jobs = 1;
    bool plot = false;
    std::vector<double> nbar;
};

void add_common(CLI::App* cmd, Common& o, bool sweep_like) {
    cmd->add_option("--config", o.config, "JSON run configuration (relative paths also searched in $CBH_CONFIG_DIR)");
    cmd->add_option("--out", o.out, "output CSV path");
    cmd->add_option("--n-max", o.n_max, "Fock cutoff override")->check(CLI::Range(4, 100000));
    cmd->add_option("--me", o.me, "master equation variant")->check(CLI::IsMember({"full", "filtered", "reduced"}));
    if (sweep_like) {
        cmd->add_option("--jobs", o.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        cmd->add_option("--nbar", o.nbar, "resonator occupation families")->delimiter(',');
    }
    cmd->add_flag("--plot", o.plot, "also write an SVG chart next to the CSV");
}

cbh::RunConfig load(const Common& o) {
    cbh::RunConfig c;
    if (!o.config.empty()) {
        c = cbh::load_config(o.config);
    } else if (const char* dir = std::getenv("CBH_CONFIG_DIR");
               dir && std::filesystem::exists(std::filesystem::path(dir) / "default.json")) {
        c = cbh::load_config(std::filesystem::path(dir) / "default.json");
    } else {
        c = cbh::default_config();
    }
    if (o.n_max > 0) c.n_max = o.n_max;
    if (!o.me.empty()) c.me_variant = cbh::parse_me_variant(o.me);
    if (!o.out.empty()) c.output_path = o.out;
    cbh::validate_config(c);
    return c;
}

std::string column_for(const std::string& parameter) {
    if (parameter == "baths.hot.temperature") return "t_hot";
    if (parameter == "baths.cold.temperature") return "t_cold";
    if (parameter == "baths.resonator.nbar") return "nbar_b";
    return parameter;
}

void plot_table(const cbh::Table& t, const std::string& x_col, const std::filesystem::path& csv) {
    const auto& cols = t.columns;
    const auto xi = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), x_col) - cols.begin());
    const auto ni = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "n_max") - cols.begin());
    const auto bi = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "nbar_b") - cols.begin());
    cbh::PlotSpec spec{csv.stem().string(), x_col, "value", false, {}, std::nan("")};
    bool positive = true;
    for (std::size_t c = ni + 1; c < cols.size(); ++c) {
        double last_family = std::nan("");
        for (const auto& row : t.rows) {
            if (spec.series.empty() || row[bi] != last_family) {
                spec.series.push_back({cols[c] + " (nbar_b=" + cbh::format_number(row[bi]).substr(0, 5) + ")", {}, {}, c > ni + 1});
                last_family = row[bi];
            }
            spec.series.back().x.push_back(row[xi]);
            spec.series.back().y.push_back(row[c]);
            positive = positive && row[xi] > 0;
        }
    }
    spec.log_x = positive;
    std::filesystem::path svg = csv;
    svg.replace_extension(".svg");
    cbh::write_text(svg, cbh::svg_line_chart(spec));
    std::cout << "wrote " << svg.string() << "\n";
}

void print_si(const cbh::RunConfig& c) {
    // omega_a = 2 pi x 10 GHz; k_B T / (hbar omega_a) = 1 at h x 10 GHz / k_B.
    constexpr double kScaleHz = 10e9;
    constexpr double kScaleKelvin = 6.62607015e-34 * kScaleHz / 1.380649e-23;
    auto hz = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "2pi x %.6g MHz", v * kScaleHz / 1e6);
        return std::string(buf);
    };
    std::cout << "omega_a   " << hz(c.model.omega_a) << "\n"
              << "omega_b   " << hz(c.model.omega_b) << "\n"
              << "g         " << hz(c.model.g) << "\n"
              << "kappa_h   " << hz(c.baths.hot.kappa) << "\n"
              << "kappa_c   " << hz(c.baths.cold.kappa) << "\n"
              << "kappa_b   " << hz(c.baths.resonator.kappa) << "\n"
              << "T_H       " << c.baths.hot.temperature * kScaleKelvin << " K\n"
              << "T_C       " << c.baths.cold.temperature * kScaleKelvin << " K\n"
              << "T_R       " << c.baths.resonator.temperature * kScaleKelvin << " K (nbar_b "
              << c.resonator_occupation() << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooling-by-heating master-equation solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cbh::version_string()));

    Common single_o, sweep_o, fig_o, val_o;
    auto* single = app.add_subcommand("single", "steady state of one configuration, one CSV row");
    add_common(single, single_o, false);

    auto* sweep = app.add_subcommand("sweep", "parameter sweep defined by the config's sweep section");
    add_common(sweep, sweep_o, true);
    std::string sweep_param;
    std::vector<double> sweep_values;
    sweep->add_option("--param", sweep_param, "override the sweep parameter path");
    sweep->add_option("--values", sweep_values, "override the sweep grid")->delimiter(',');

    auto* figure = app.add_subcommand("figure", "reproduce a figure data set");
    add_common(figure, fig_o, true);
    std::string fig_id;
    std::vector<double> t_hot;
    figure->add_option("id", fig_id, "fig2 | fig3 | fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    figure->add_option("--t-hot", t_hot, "override the T_H grid (fig2, fig4)")->delimiter(',');

    auto* validate = app.add_subcommand("validate-config", "parse and validate a config, print the resolved form");
    add_common(validate, val_o, false);
    bool si = false;
    validate->add_flag("--si", si, "also print parameters in SI units");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*single) {
            const cbh::RunConfig c = load(single_o);
            const cbh::RunOutput r = cbh::run_single(c);
            cbh::write_table(c.output_path, r.table, r.sidecar);
            std::cout << cbh::table_to_csv(r.table);
            std::cerr << "wrote " << c.output_path << "\n";
        } else if (*sweep) {
            cbh::RunConfig c = load(sweep_o);
            if (!sweep_param.empty() || !sweep_values.empty()) {
                if (!c.sweep) c.sweep = cbh::SweepSpec{};
                if (!sweep_param.empty()) c.sweep->parameter = sweep_param;
                if (!sweep_values.empty()) c.sweep->values = sweep_values;
            }
            if (!sweep_o.nbar.empty()) {
                if (!c.sweep) throw cbh::ConfigError("sweep", "sweep section required");
                c.sweep->nbar_families = sweep_o.nbar;
            }
            cbh::validate_config(c);
            const cbh::RunOutput r = cbh::run_sweep(c, sweep_o.jobs);
            cbh::write_table(c.output_path, r.table, r.sidecar);
            std::cout << "wrote " << c.output_path << " (" << r.table.rows.size() << " rows)\n";
            if (sweep_o.plot) plot_table(r.table, column_for(c.sweep->parameter), c.output_path);
        } else if (*figure) {
            cbh::FigureOptions o;
            o.base = load(fig_o);
            o.jobs = fig_o.jobs;
            o.plot = fig_o.plot;
            o.out = fig_o.out.empty() ? fig_id + ".csv" : fig_o.out;
            if (!fig_o.nbar.empty()) o.nbar_families = fig_o.nbar;
            if (!t_hot.empty()) o.t_hot_grid = t_hot;
            for (const auto& p : cbh::reproduce_figure(fig_id, o).written) std::cout << "wrote " << p.string() << "\n";
        } else if (*validate) {
            if (val_o.config.empty()) throw cbh::ConfigError("--config", "required for validate-config");
            const cbh::RunConfig c = load(val_o);
            for (const auto& w : c.model.validate()) std::cerr << "warning: " << w << "\n";
            std::cout << cbh::config_to_json(c).dump(2) << "\n";
            if (si) print_si(c);
            std::cerr << "config ok\n";
        }
    } catch (const cbh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
