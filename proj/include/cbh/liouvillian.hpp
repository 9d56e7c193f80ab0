#pragma once

// Master-equation assembly in the polaron frame. Tilde operators of the
// diagonal frame are represented by the plain ladder/Pauli matrices.
//
// Three variants:
//   Full      every bare and sideband dissipator up to third order in eta,
//             weighted by each bath's (optionally filtered) response;
//   Filtered  only the transitions selected by ideal hot (omega_-) and
//             cold (omega_a) filters;
//   Reduced   resonator-only two-photon/one-photon/dephasing model with the
//             TLS adiabatically eliminated.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cbh/linalg.hpp"
#include "cbh/model.hpp"

namespace cbh {

enum class MeVariant { Full, Filtered, Reduced };

std::string to_string(MeVariant v);
MeVariant parse_me_variant(const std::string& s);

struct DissipatorTerm {
    std::string label;
    double rate = 0.0;
    Operator jump;
};

class Liouvillian {
public:
    Liouvillian(SpaceSignature sig, SparseMatrix matrix, MeVariant variant, std::vector<DissipatorTerm> terms,
                bool has_hamiltonian);

    const SpaceSignature& sig() const { return sig_; }
    const SparseMatrix& matrix() const { return matrix_; }
    MeVariant variant() const { return variant_; }
    const std::vector<DissipatorTerm>& terms() const { return terms_; }
    bool has_hamiltonian() const { return has_hamiltonian_; }
    int dim() const { return sig_.total_dim(); }

    Vector apply(const Vector& v) const { return matrix_ * v; }
    Matrix apply(const Matrix& rho) const;
    Matrix dense() const { return Matrix(matrix_); }

    /// max |(t L)_k| over columns, t the trace functional.
    double trace_residual() const;
    /// Frobenius norm of the superoperator matrix.
    double norm() const { return matrix_.norm(); }

private:
    SpaceSignature sig_;
    SparseMatrix matrix_;
    MeVariant variant_;
    std::vector<DissipatorTerm> terms_;
    bool has_hamiltonian_;
};

struct Baths {
    BathSpec hot;
    BathSpec cold;
    BathSpec resonator;

    /// Exactly one bath per label is required.
    static Baths from_list(std::span<const BathSpec> list);
    void validate() const;
};

struct BuildOptions {
    /// Adds -i[H0, rho] with the diagonal polaron-frame Hamiltonian.
    bool include_hamiltonian = false;
    LambShiftOptions lamb;
};

Liouvillian assemble_liouvillian(const SpaceSignature& sig, std::vector<DissipatorTerm> terms, MeVariant variant,
                                 const Operator* hamiltonian = nullptr);

Liouvillian build_full_me(const ModelParams& params, const Baths& baths, int n_max, const BuildOptions& opts = {});
Liouvillian build_filtered_me(const ModelParams& params, const Baths& baths, int n_max,
                              const BuildOptions& opts = {});

enum class SigmaZInterpretation {
    /// Rates exactly as printed: <sz + 1> and <sz>.
    Literal,
    /// <sz> replaced by the excited-state population (<sz> + 1) / 2.
    ExcitedPopulation,
};

std::string to_string(SigmaZInterpretation i);
SigmaZInterpretation parse_sigma_z_interpretation(const std::string& s);

struct ReducedRates {
    double gamma2_down = 0.0;
    double gamma2_up = 0.0;
    double gamma1_down = 0.0;
    double gamma1_up = 0.0;
    double gamma_deph = 0.0;
    std::vector<std::string> diagnostics;
};

/// Two-photon, one-photon and dephasing rates of the resonator-only model.
/// Negative values produced by the literal formulas are clamped to zero and
/// recorded in `diagnostics`.
ReducedRates reduced_rates(const ModelParams& params, const Baths& baths, double sigma_z_expect,
                           SigmaZInterpretation interp = SigmaZInterpretation::Literal,
                           const LambShiftOptions& lamb = {});

/// Stationary <sz> of the bare two-level rate balance under the hot and cold
/// baths at +-omega_a.
double tls_stationary_sigma_z(const ModelParams& params, const Baths& baths, const LambShiftOptions& lamb = {});

Liouvillian build_reduced_me(const ReducedRates& rates, int n_max);

}  // namespace cbh
