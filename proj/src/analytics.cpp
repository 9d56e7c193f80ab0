#include "cbh/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace cbh {

DriftDiffusion fp_drift_diffusion(PhasePoint zeta, double kappa_b, double nbar_b, double gamma2_down) {
    if (kappa_b < 0.0 || gamma2_down < 0.0) throw std::invalid_argument("rates must be non-negative");
    const std::complex<double> mu = zeta.mu;
    const std::complex<double> muc = std::conj(mu);
    DriftDiffusion out;
    out.drift = {-0.5 * kappa_b * mu - gamma2_down * mu * mu * muc, -0.5 * kappa_b * muc - gamma2_down * mu * muc * muc};
    const std::complex<double> off = -kappa_b * nbar_b;
    out.diffusion << -gamma2_down * mu * mu, off, off, -gamma2_down * muc * muc;
    return out;
}

LimitPopulations fp_limit_populations(double nbar_b) {
    if (!(nbar_b >= 0.0)) throw std::invalid_argument("nbar_b must be >= 0");
    if (std::isinf(nbar_b)) return {0.75, 0.25};
    const double den = 4.0 * nbar_b + 1.0;
    return {(3.0 * nbar_b + 1.0) / den, nbar_b / den};
}

}  // namespace cbh
