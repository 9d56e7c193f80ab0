#include "cbh/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "cbh/observables.hpp"

namespace cbh {

namespace {

using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double column_norm_1(const SparseMatrix& m) {
    double worst = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) s += std::abs(it.value());
        worst = std::max(worst, s);
    }
    return worst;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw SolverError("time grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw SolverError("time grid has non-finite entries");
        if (i > 0 && grid[i] < grid[i - 1]) throw SolverError("time grid must be monotone non-decreasing");
    }
}

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double rtol, double atol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

class ExplicitStepper {
public:
    ExplicitStepper(const SparseMatrix& L, const PropagateOptions& opts) : L_(L), opts_(opts) {}

    /// Advances y from t0 to t1 in place.
    void advance(Vector& y, double t0, double t1, double& h, PropagationStats& stats) {
        // Dormand-Prince 5(4) tableau.
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        (void)c2;
        (void)c3;
        (void)c4;
        (void)c5;

        double t = t0;
        const double span = std::max(t1 - t0, 1e-300);
        while (t < t1) {
            if (stats.accepted + stats.rejected >= opts_.max_steps) {
                throw StiffnessError("explicit integrator exceeded max_steps", column_norm_1(L_) * span);
            }
            double step = std::min(h, t1 - t);
            if (step < 1e-14 * std::max(1.0, std::abs(t))) {
                throw StiffnessError("explicit step size underflow", column_norm_1(L_) * span);
            }
            const Vector k1 = L_ * y;
            const Vector k2 = L_ * (y + step * a21 * k1);
            const Vector k3 = L_ * (y + step * (a31 * k1 + a32 * k2));
            const Vector k4 = L_ * (y + step * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vector k5 = L_ * (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vector k6 = L_ * (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vector ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector k7 = L_ * ynew;
            const Vector err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = error_norm(err, y, ynew, opts_.rtol, opts_.atol);
            const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (en <= 1.0) {
                y = ynew;
                t = (step == t1 - t) ? t1 : t + step;
                ++stats.accepted;
                if (step == h || factor < 1.0) h = step * factor;
            } else {
                ++stats.rejected;
                h = step * factor;
            }
        }
    }

private:
    const SparseMatrix& L_;
    const PropagateOptions& opts_;
};

/// Extrapolated implicit Euler for the linear autonomous system y' = L y.
/// Step sizes live on a power-of-two ladder so factorizations of (I - h L)
/// are reused; landing steps onto grid times are factorized on demand.
class ImplicitStepper {
public:
    static constexpr int kStages = 6;

    ImplicitStepper(const SparseMatrix& L, const PropagateOptions& opts) : L_(L), opts_(opts) {
        identity_.resize(L.rows(), L.cols());
        identity_.setIdentity();
    }

    void advance(Vector& y, double t0, double t1, int& level, PropagationStats& stats) {
        double t = t0;
        while (t < t1) {
            if (stats.accepted + stats.rejected >= opts_.max_steps) {
                throw StiffnessError("implicit integrator exceeded max_steps", column_norm_1(L_) * (t1 - t0));
            }
            const double ladder = std::ldexp(1.0, level);
            const bool landing = t + ladder >= t1;
            const double step = landing ? t1 - t : ladder;
            if (step < 1e-14 * std::max(1.0, std::abs(t))) {
                t = t1;
                break;
            }
            double en = 0.0;
            const Vector ynew = extrapolate(y, step, en, stats);
            if (en <= 1.0) {
                y = ynew;
                t = landing ? t1 : t + step;
                ++stats.accepted;
                if (!landing && en < 0.5 * std::pow(0.5, kStages)) ++level;
            } else {
                ++stats.rejected;
                if (landing && step < ladder) {
                    // Landing step smaller than the ladder step failed: shrink the ladder below it.
                    level = static_cast<int>(std::floor(std::log2(step))) - 1;
                } else {
                    --level;
                }
                if (level < -60) throw StiffnessError("implicit step size underflow", column_norm_1(L_) * (t1 - t0));
            }
        }
    }

private:
    const SparseLU& factor(double h, PropagationStats& stats) {
        auto it = cache_.find(h);
        if (it != cache_.end()) return *it->second;
        if (cache_.size() >= 96) cache_.clear();
        auto lu = std::make_unique<SparseLU>();
        SparseMatrix a = identity_ - Complex(h) * L_;
        a.makeCompressed();
        lu->compute(a);
        if (lu->info() != Eigen::Success) throw SolverError("factorization of (I - h L) failed: " + lu->lastErrorMessage());
        ++stats.factorizations;
        return *cache_.emplace(h, std::move(lu)).first->second;
    }

    Vector extrapolate(const Vector& y, double H, double& en, PropagationStats& stats) {
        std::vector<std::vector<Vector>> T(kStages);
        for (int j = 0; j < kStages; ++j) {
            const int n = j + 1;
            const SparseLU& lu = factor(H / n, stats);
            Vector x = y;
            for (int s = 0; s < n; ++s) x = lu.solve(x);
            T[j].push_back(std::move(x));
            for (int k = 1; k <= j; ++k) {
                const double ratio = static_cast<double>(n) / static_cast<double>(n - k);
                T[j].push_back(T[j][k - 1] + (T[j][k - 1] - T[j - 1][k - 1]) / (ratio - 1.0));
            }
        }
        const Vector& best = T[kStages - 1][kStages - 1];
        en = error_norm(best - T[kStages - 1][kStages - 2], y, best, opts_.rtol, opts_.atol);
        if (!std::isfinite(en)) en = 1e300;
        return best;
    }

    const SparseMatrix& L_;
    const PropagateOptions& opts_;
    SparseMatrix identity_;
    std::map<double, std::unique_ptr<SparseLU>> cache_;
};

}  // namespace

SteadyStateResult solve_steady_state(const Liouvillian& L) {
    const int d = L.dim();
    const SparseMatrix& m = L.matrix();
    const Eigen::Index n = m.rows();
    const double lnorm = L.norm();
    if (L.trace_residual() > 1e-10 * std::max(1.0, lnorm)) throw SolverError("liouvillian is not trace preserving");
    if (lnorm == 0.0) throw DegenerateSteadyStateError("zero generator: every state is stationary");

    // Replace the (redundant) equation for rho_00 by the trace constraint.
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(m.nonZeros()) + static_cast<std::size_t>(d));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int i = 0; i < d; ++i) trips.emplace_back(0, i * (d + 1), 1.0);
    SparseMatrix a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    Vector rhs = Vector::Zero(n);
    rhs[0] = 1.0;

    SparseLU lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw DegenerateSteadyStateError("steady-state system is singular (null space dimension > 1?): " +
                                         lu.lastErrorMessage());
    }
    const Vector x = lu.solve(rhs);
    const double sys_res = (a * x - rhs).norm();
    if (!x.allFinite() || x.norm() > 10.0 || sys_res > 1e-8) {
        throw DegenerateSteadyStateError("steady-state solve is ill-posed (solution norm " + std::to_string(x.norm()) +
                                         ", residual " + std::to_string(sys_res) +
                                         "); the generator likely has more than one stationary state");
    }

    Matrix rho = hermitian_part(unvec(x, d));
    rho /= rho.trace();
    SteadyStateResult out;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double lam = es.eigenvalues().minCoeff();
    if (lam < -kClipThreshold) {
        throw SolverError("steady state has eigenvalue " + std::to_string(lam) + " below -1e-8");
    }
    if (lam < 0.0) {
        const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        rho = hermitian_part(rho);
        rho /= rho.trace();
        out.clipped_eigenvalue = lam;
    }
    out.relative_residual = (m * vec(rho)).norm() / lnorm;
    if (out.relative_residual > 1e-10) {
        throw SolverError("steady-state residual " + std::to_string(out.relative_residual) + " exceeds 1e-10 ||L||");
    }
    out.rho = DensityMatrix(L.sig(), std::move(rho));
    return out;
}

DensityMatrix steady_state(const Liouvillian& L) { return solve_steady_state(L).rho; }

std::vector<Vector> propagate_vector(const Liouvillian& L, const Vector& x0, const std::vector<double>& t_grid,
                                     const PropagateOptions& opts, PropagationStats* stats_out) {
    check_grid(t_grid);
    if (x0.size() != L.matrix().cols()) throw DimensionError("initial vector does not match the liouvillian");
    PropagationStats stats;
    std::vector<Vector> out;
    out.reserve(t_grid.size());
    Vector y = x0;
    out.push_back(y);
    const double lnorm1 = column_norm_1(L.matrix());
    if (lnorm1 == 0.0) {
        for (std::size_t i = 1; i < t_grid.size(); ++i) out.push_back(y);
        if (stats_out) *stats_out = stats;
        return out;
    }
    double h = opts.initial_step > 0.0 ? opts.initial_step : 0.01 / lnorm1;
    if (opts.method == Integrator::Explicit) {
        ExplicitStepper stepper(L.matrix(), opts);
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            if (t_grid[i] > t_grid[i - 1]) stepper.advance(y, t_grid[i - 1], t_grid[i], h, stats);
            out.push_back(y);
        }
    } else {
        ImplicitStepper stepper(L.matrix(), opts);
        int level = static_cast<int>(std::floor(std::log2(h)));
        for (std::size_t i = 1; i < t_grid.size(); ++i) {
            if (t_grid[i] > t_grid[i - 1]) stepper.advance(y, t_grid[i - 1], t_grid[i], level, stats);
            out.push_back(y);
        }
    }
    if (stats_out) *stats_out = stats;
    return out;
}

Trajectory propagate(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                     const PropagateOptions& opts, PropagationStats* stats) {
    if (!(rho0.sig() == L.sig())) throw DimensionError("initial state does not match the liouvillian");
    const std::vector<Vector> vs = propagate_vector(L, vec(rho0.matrix()), t_grid, opts, stats);
    Trajectory traj;
    traj.times = t_grid;
    traj.states.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Matrix m = unvec(vs[i], L.dim());
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-8) {
            throw SolverError("trajectory lost Hermiticity at t = " + std::to_string(t_grid[i]) + " (residue " +
                              std::to_string(herm) + ")");
        }
        traj.states.emplace_back(L.sig(), hermitian_part(m), opts.positivity_tol);
    }
    return traj;
}

CorrelationSeries two_time_correlation(const Liouvillian& L, const DensityMatrix& rho_ss,
                                       const std::vector<double>& tau_grid, const PropagateOptions& opts) {
    if (!(rho_ss.sig() == L.sig())) throw DimensionError("steady state does not match the liouvillian");
    const Operator b = resonator_annihilation(L.sig());
    const Operator n = b.adjoint() * b;
    const double mean = (n.matrix() * rho_ss.matrix()).trace().real();
    CorrelationSeries out;
    out.normalization = mean * mean;
    if (out.normalization < 1e-12) {
        throw UndefinedObservableError("g2(tau) normalization <n>^2 = " + std::to_string(out.normalization) +
                                       " is below 1e-12");
    }
    const Matrix collapsed = b.matrix() * rho_ss.matrix() * b.matrix().adjoint();
    const std::vector<Vector> xs = propagate_vector(L, vec(collapsed), tau_grid, opts);
    out.taus = tau_grid;
    out.values.reserve(xs.size());
    const int d = L.dim();
    for (const Vector& x : xs) {
        const Matrix m = unvec(x, d);
        out.values.push_back((n.matrix() * m).trace().real() / out.normalization);
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw std::invalid_argument("log_grid needs 0 < lo <= hi, points >= 1");
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> default_tau_grid(double kappa_b, int points) {
    if (!(kappa_b > 0.0)) throw std::invalid_argument("default_tau_grid needs kappa_b > 0");
    std::vector<double> g = log_grid(0.1 / kappa_b, 100.0 / kappa_b, points);
    g.insert(g.begin(), 0.0);
    return g;
}

}  // namespace cbh
