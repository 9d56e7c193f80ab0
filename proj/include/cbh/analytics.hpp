#pragma once

// Closed forms of the strong two-photon-cooling limit, used as oracles for the
// numerical solvers. Drift and diffusion are evaluated pointwise only.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace cbh {

struct PhasePoint {
    std::complex<double> mu;
};

struct DriftDiffusion {
    std::array<std::complex<double>, 2> drift;
    Eigen::Matrix2cd diffusion;
};

/// Drift F = (-kb mu / 2 - G mu^2 mu*, c.c.) and diffusion
/// H = [[-G mu^2, -kb nb], [-kb nb, -G mu*^2]] of the phase-space equation.
DriftDiffusion fp_drift_diffusion(PhasePoint zeta, double kappa_b, double nbar_b, double gamma2_down);

struct LimitPopulations {
    double p0;
    double p1;
};

/// P(0) = (3 nb + 1) / (4 nb + 1), P(1) = nb / (4 nb + 1).
LimitPopulations fp_limit_populations(double nbar_b);

}  // namespace cbh
