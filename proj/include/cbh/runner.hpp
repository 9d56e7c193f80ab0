#pragma once

// Batch execution: single points, parameter sweeps, figure recipes and the
// CSV / sidecar writers shared by all of them.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbh/config.hpp"
#include "cbh/liouvillian.hpp"
#include "cbh/observables.hpp"
#include "cbh/solvers.hpp"

namespace cbh {

/// Version string baked in at configure time.
const char* version_string();

/// 30 for nbar <= 5, ceil(8 nbar) otherwise.
int default_n_max(double nbar);

/// Smallest cutoff whose thermal tail shifts <n> by less than `tol` and
/// g2(0) by less than `tol` (relative).
int thermal_n_max(double nbar, double tol = 1e-8);

/// Cutoff a config resolves to: explicit n_max, else default_n_max.
int resolved_n_max(const RunConfig& c);

Liouvillian build_liouvillian(const RunConfig& c, int n_max, std::optional<ReducedRates>* rates_out = nullptr);

struct PointResult {
    int n_max = 0;
    std::optional<DensityMatrix> rho;
    std::optional<ReducedRates> rates;
    double relative_residual = 0.0;
    double clipped_eigenvalue = 0.0;
    /// Largest observable shift after doubling n_max (check_convergence only).
    std::optional<double> convergence_shift;
    std::vector<double> values;
    /// Empty on success; error or warning text otherwise.
    std::string note;
    bool failed = false;
};

/// Solves the steady state of `c` and evaluates `c.outputs`. Failures are
/// thrown; use evaluate_point_noexcept for the sweep policy.
PointResult evaluate_point(const RunConfig& c);
/// Same, but a failure yields NaN values and the error in `note`.
PointResult evaluate_point_noexcept(const RunConfig& c);

/// Observable `name` from a solved point.
double observable(const std::string& name, const RunConfig& c, const DensityMatrix& rho,
                  const std::optional<ReducedRates>& rates);

struct Table {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Optional trailing text column.
    std::vector<std::string> notes;
    bool has_notes = false;
};

/// Scientific notation, 12 significant digits; "nan"/"inf" for non-finite.
std::string format_number(double v);
std::string table_to_csv(const Table& t);
void write_text(const std::filesystem::path& path, const std::string& text);
/// Writes `path` and the sidecar `path.meta.json`.
void write_table(const std::filesystem::path& path, const Table& t, const nlohmann::json& sidecar);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

struct RunOutput {
    Table table;
    nlohmann::json sidecar;
};

RunOutput run_single(const RunConfig& c);
/// Rows ordered family-major, grid-minor; `jobs` workers (<=0: hardware).
RunOutput run_sweep(const RunConfig& c, int jobs = 1);

struct FigureOptions {
    RunConfig base = default_config();
    std::optional<std::vector<double>> nbar_families;
    std::optional<std::vector<double>> t_hot_grid;
    int jobs = 1;
    bool plot = false;
    std::filesystem::path out = "fig.csv";
};

struct FigureFiles {
    std::vector<std::filesystem::path> written;
};

/// fig2 (mean_n vs T_H), fig3 (photon statistics + inset dynamics),
/// fig4 (g2(0) vs T_H + g2(tau) inset). Throws ConfigError on unknown ids.
FigureFiles reproduce_figure(const std::string& fig_id, const FigureOptions& opts);

/// Default T_H grid: 40 log-spaced points over [0.05, 2].
std::vector<double> default_t_hot_grid();

}  // namespace cbh
