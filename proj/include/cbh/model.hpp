#pragma once

// Physical model: system Hamiltonians, the polaron (displacement) transform
// that diagonalizes the longitudinal coupling, and thermal bath spectra.
//
// All frequencies, rates and temperatures are in units of the TLS frequency
// omega_a, with hbar = k_B = 1.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbh/linalg.hpp"

namespace cbh {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonConvergentError : public std::runtime_error {
public:
    NonConvergentError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

enum class Variant { TlsResonator, ResonatorResonator };

struct ModelParams {
    double omega_a = 1.0;
    double omega_b = 0.05;
    double g = 0.01;
    Variant variant = Variant::TlsResonator;

    double eta() const { return g / omega_b; }
    /// Second lower sideband omega_a - 2 omega_b.
    double omega_minus() const { return omega_a - 2.0 * omega_b; }

    /// Throws ModelError on invalid values; returns warnings (eta > 0.5).
    std::vector<std::string> validate() const;
};

enum class BathLabel { Hot, Cold, Resonator };
enum class LambShiftMode { Zero, NumericalPV };
enum class FilterShape { Ideal, Lorentzian };

std::string to_string(BathLabel label);
std::string to_string(LambShiftMode mode);
std::string to_string(FilterShape shape);

/// Spectral filter in front of a bath.
///
/// Ideal: a passband of half-width `width` around `center` that transmits
/// the bath's spectral response unchanged and blocks everything else.
/// Lorentzian: (coupling/pi) (pi G)^2 / ((|w| - center - lamb)^2 + (pi G)^2),
/// with G the emission-branch response at |w|; absorption frequencies carry
/// the additional Boltzmann factor G(-|w|)/G(|w|).
struct FilterSpec {
    double center = 0.0;
    double width = 0.0;
    FilterShape shape = FilterShape::Ideal;
    LambShiftMode lamb_shift = LambShiftMode::Zero;
    double coupling = 0.0;
};

struct BathSpec {
    BathLabel label = BathLabel::Hot;
    double kappa = 0.0;
    double temperature = 0.0;
    std::optional<FilterSpec> filter;

    void validate() const;
};

/// 1 / (exp(omega / T) - 1); exactly 0 at T = 0.
double bose_occupation(double omega, double temperature);

/// Temperature at which a mode of frequency omega has mean occupation nbar.
double temperature_for_occupation(double omega, double nbar);

/// Ohmic response with flat coupling: kappa (1 + n(w)) for w > 0,
/// kappa n(|w|) for w < 0 and 0 at w = 0.
double spectral_response(const BathSpec& bath, double omega);

struct LambShiftOptions {
    double uv_cutoff = 10.0;
    /// Lower integration limit. The flat-coupling response diverges like T/w
    /// near zero, so a positive value is required whenever T > 0.
    double ir_cutoff = 1e-3;
    double tolerance = 1e-10;
};

/// Principal value of integral_{ir}^{uv} G(w') / (w - w') dw'.
/// Returns 0 when the bath has no filter or the filter's mode is Zero,
/// unless `force` is set.
double lamb_shift(const BathSpec& bath, double omega, const LambShiftOptions& opts = {}, bool force = false);

double filtered_spectrum(const BathSpec& bath, double omega, const LambShiftOptions& opts = {});

/// filtered_spectrum when a filter is present, spectral_response otherwise.
double effective_spectrum(const BathSpec& bath, double omega, const LambShiftOptions& opts = {});

/// 1/2 w_a sz + w_b b^dag b + g sz (b + b^dag) on [2 x (n_max+1)].
Operator hamiltonian_tls_r(const ModelParams& params, int n_max);

/// w_a a^dag a + w_b b^dag b - g a^dag a (b + b^dag) on [(n_a+1) x (n_b+1)].
Operator hamiltonian_r_r(const ModelParams& params, int n_max_a, int n_max_b);

/// U = exp(-eta sz (b^dag - b)).
Operator polaron_unitary(const ModelParams& params, int n_max);

/// U^dag H U for the TLS-resonator model:
/// 1/2 w_a sz + w_b b^dag b - g^2 / w_b.
Operator polaron_hamiltonian(const ModelParams& params, int n_max);

/// Composite indices (TLS x Fock) whose Fock level is <= n_max - padding.
std::vector<int> interior_indices(int n_max, int padding, int tls_dim = 2);

}  // namespace cbh
