#pragma once

// Steady states, time propagation and quantum-regression correlations for an
// assembled Liouvillian.

#include <stdexcept>
#include <string>
#include <vector>

#include "cbh/linalg.hpp"
#include "cbh/liouvillian.hpp"

namespace cbh {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The generator has more than one stationary state.
class DegenerateSteadyStateError : public SolverError {
public:
    using SolverError::SolverError;
};

class StiffnessError : public SolverError {
public:
    StiffnessError(const std::string& what, double ratio)
        : SolverError(what + " (stiffness ratio estimate " + std::to_string(ratio) + ")"), ratio_(ratio) {}
    double stiffness_ratio() const { return ratio_; }

private:
    double ratio_;
};

struct SteadyStateResult {
    DensityMatrix rho;
    /// ||L vec(rho)|| / ||L|| after symmetrization.
    double relative_residual = 0.0;
    /// Most negative eigenvalue removed by clipping (0 if none).
    double clipped_eigenvalue = 0.0;
};

/// Clipping window for tiny negative eigenvalues; larger violations throw.
inline constexpr double kClipThreshold = 1e-8;

SteadyStateResult solve_steady_state(const Liouvillian& L);
DensityMatrix steady_state(const Liouvillian& L);

enum class Integrator {
    /// Dormand-Prince 5(4), adaptive.
    Explicit,
    /// Extrapolated implicit Euler (L-stable base), adaptive; for stiff problems.
    Implicit,
};

struct PropagateOptions {
    Integrator method = Integrator::Implicit;
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;
    long max_steps = 2'000'000;
    /// Positivity tolerance applied to trajectory states.
    double positivity_tol = 1e-6;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

struct PropagationStats {
    long accepted = 0;
    long rejected = 0;
    long factorizations = 0;
};

/// Integrates d vec(x)/dt = L vec(x) and returns x at every grid time.
/// x need not be a state (the regression theorem propagates b rho b^dag).
std::vector<Vector> propagate_vector(const Liouvillian& L, const Vector& x0, const std::vector<double>& t_grid,
                                     const PropagateOptions& opts = {}, PropagationStats* stats = nullptr);

Trajectory propagate(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                     const PropagateOptions& opts = {}, PropagationStats* stats = nullptr);

struct CorrelationSeries {
    std::vector<double> taus;
    std::vector<double> values;
    /// <n>^2 in the steady state.
    double normalization = 0.0;
};

/// g2(tau) = Tr[n e^{L tau}(b rho_ss b^dag)] / <n>^2.
CorrelationSeries two_time_correlation(const Liouvillian& L, const DensityMatrix& rho_ss,
                                       const std::vector<double>& tau_grid, const PropagateOptions& opts = {});

/// 0 followed by `points` log-spaced delays from 0.1/kappa_b to 100/kappa_b.
std::vector<double> default_tau_grid(double kappa_b, int points = 31);

std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace cbh
