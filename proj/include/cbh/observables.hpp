#pragma once

// Photon statistics of the resonator (the last factor of the signature).
// Quantities are read in the polaron frame unless converted with
// to_lab_frame first.

#include <optional>
#include <stdexcept>
#include <vector>

#include "cbh/linalg.hpp"
#include "cbh/model.hpp"

namespace cbh {

class UndefinedObservableError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Below this occupation g2(0) is reported as undefined.
inline constexpr double kMinOccupationForG2 = 1e-6;

struct PhotonStatistics {
    double mean_n = 0.0;
    std::vector<double> p_n;
    std::optional<double> g2_zero;
};

/// I (x) op on sig, where op acts on the last factor.
Operator embed_resonator(const SpaceSignature& sig, const Operator& op);
Operator resonator_annihilation(const SpaceSignature& sig);

/// Partial trace over every factor but the last.
Matrix resonator_marginal(const DensityMatrix& rho);

double mean_occupation(const DensityMatrix& rho);
std::vector<double> number_distribution(const DensityMatrix& rho);
double g2_zero(const DensityMatrix& rho);
PhotonStatistics photon_statistics(const DensityMatrix& rho);

/// <sz> of the TLS factor of a [2 x (n_max+1)] state.
double tls_sigma_z(const DensityMatrix& rho);

/// U rho U^dag with U the polaron unitary.
DensityMatrix to_lab_frame(const DensityMatrix& rho, const ModelParams& params);

}  // namespace cbh
