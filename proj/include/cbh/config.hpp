#pragma once

// Run configuration: JSON file <-> RunConfig, with field-path validation.
// See docs/config.md for the schema.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbh/liouvillian.hpp"
#include "cbh/model.hpp"

namespace cbh {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct SweepSpec {
    /// Dotted parameter path, e.g. "baths.hot.temperature".
    std::string parameter;
    std::vector<double> values;
    /// Optional resonator occupation families; one block of rows per entry.
    std::vector<double> nbar_families;
};

struct ReducedSpec {
    SigmaZInterpretation sigma_z = SigmaZInterpretation::Literal;
    /// Explicit rates bypass the adiabatic elimination.
    std::optional<ReducedRates> rates;
};

struct RunConfig {
    ModelParams model;
    Baths baths;
    /// Resonator occupation the resonator temperature was derived from, if
    /// the config specified it that way.
    std::optional<double> nbar_b;
    std::optional<int> n_max;
    MeVariant me_variant = MeVariant::Filtered;
    bool include_hamiltonian = false;
    ReducedSpec reduced;
    std::optional<SweepSpec> sweep;
    std::vector<std::string> outputs{"mean_n"};
    bool check_convergence = false;
    std::string output_path = "out.csv";

    double resonator_occupation() const;
    /// Sets the resonator temperature from an occupation number.
    void set_resonator_occupation(double nbar);
};

/// Observables accepted in `outputs`.
const std::vector<std::string>& known_outputs();

/// Reference parameter set in omega_a units: omega_b = 0.05, g = 0.01,
/// kappa_h = kappa_c = 0.02, kappa_b = 1e-7, T_C = 0, nbar_b = 5, T_H = 2,
/// hot filter at omega_-, cold filter at omega_a.
RunConfig default_config();

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

/// Resolves a relative config path against $CBH_CONFIG_DIR when it does not
/// exist relative to the working directory.
std::filesystem::path resolve_config_path(const std::filesystem::path& path);

/// Applies a sweep value to the parameter named by `path`.
void apply_parameter(RunConfig& c, const std::string& path, double value);
double read_parameter(const RunConfig& c, const std::string& path);

/// Throws ConfigError naming the offending field.
void validate_config(const RunConfig& c);

}  // namespace cbh
