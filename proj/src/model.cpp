#include "cbh/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace cbh {

std::vector<std::string> ModelParams::validate() const {
    if (!(omega_a > 0.0)) throw ModelError("omega_a must be positive");
    if (!(omega_b > 0.0)) throw ModelError("omega_b must be positive");
    if (!(g >= 0.0)) throw ModelError("g must be non-negative");
    std::vector<std::string> warnings;
    if (!(eta() < 1.0)) throw ModelError("eta = g/omega_b must be < 1, got " + std::to_string(eta()));
    if (eta() > 0.5) {
        warnings.push_back("eta = " + std::to_string(eta()) + " > 0.5: perturbative sideband expansion degrades");
    }
    return warnings;
}

std::string to_string(BathLabel label) {
    switch (label) {
        case BathLabel::Hot: return "hot";
        case BathLabel::Cold: return "cold";
        case BathLabel::Resonator: return "resonator";
    }
    return "?";
}

std::string to_string(LambShiftMode mode) { return mode == LambShiftMode::Zero ? "zero" : "numerical_pv"; }

std::string to_string(FilterShape shape) { return shape == FilterShape::Ideal ? "ideal" : "lorentzian"; }

void BathSpec::validate() const {
    const std::string who = to_string(label) + " bath: ";
    if (!(kappa >= 0.0)) throw ModelError(who + "kappa must be >= 0");
    if (!(temperature >= 0.0)) throw ModelError(who + "temperature must be >= 0");
    if (filter) {
        if (!(filter->center > 0.0)) throw ModelError(who + "filter center must be > 0");
        if (!(filter->width > 0.0)) throw ModelError(who + "filter width must be > 0");
        if (filter->shape == FilterShape::Lorentzian && !(filter->coupling > 0.0)) {
            throw ModelError(who + "lorentzian filter needs coupling > 0");
        }
    }
}

double bose_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw ModelError("bose_occupation needs omega > 0");
    if (temperature < 0.0) throw ModelError("bose_occupation needs T >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

double temperature_for_occupation(double omega, double nbar) {
    if (!(omega > 0.0)) throw ModelError("temperature_for_occupation needs omega > 0");
    if (nbar < 0.0) throw ModelError("occupation must be >= 0");
    if (nbar == 0.0) return 0.0;
    return omega / std::log1p(1.0 / nbar);
}

double spectral_response(const BathSpec& bath, double omega) {
    if (omega == 0.0) return 0.0;
    const double n = bose_occupation(std::abs(omega), bath.temperature);
    return omega > 0.0 ? bath.kappa * (1.0 + n) : bath.kappa * n;
}

namespace {

double principal_value(const BathSpec& bath, double omega, const LambShiftOptions& opts) {
    const double lo = opts.ir_cutoff;
    const double hi = opts.uv_cutoff;
    if (!(hi > lo) || lo < 0.0) throw ModelError("lamb shift needs 0 <= ir_cutoff < uv_cutoff");
    if (bath.temperature > 0.0 && lo <= 0.0) {
        throw NonConvergentError("lamb shift integrand diverges at zero frequency for T > 0; set ir_cutoff > 0",
                                 std::numeric_limits<double>::infinity());
    }
    auto g = [&](double w) { return spectral_response(bath, w); };
    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    constexpr unsigned kMaxDepth = 20;

    double total = 0.0;
    double err_total = 0.0;
    auto integrate = [&](auto&& f, double a, double b) {
        if (!(b > a)) return;
        double err = 0.0;
        const double v = Quad::integrate(f, a, b, kMaxDepth, opts.tolerance, &err);
        total += v;
        err_total += err;
    };

    if (omega <= lo || omega >= hi) {
        integrate([&](double w) { return g(w) / (omega - w); }, lo, hi);
    } else {
        // Fold the interval symmetrically about the pole; the paired integrand
        // [G(w - s) - G(w + s)] / s is regular at s = 0.
        const double h = std::min(omega - lo, hi - omega);
        integrate(
            [&](double s) {
                if (s == 0.0) return 0.0;
                return (g(omega - s) - g(omega + s)) / s;
            },
            0.0, h);
        if (omega - lo > h) integrate([&](double w) { return g(w) / (omega - w); }, lo, omega - h);
        if (hi - omega > h) integrate([&](double w) { return g(w) / (omega - w); }, omega + h, hi);
    }
    if (!std::isfinite(total) || err_total > std::max(1e-9, 1e3 * opts.tolerance) * std::max(1.0, std::abs(total))) {
        throw NonConvergentError("lamb shift quadrature did not converge", err_total);
    }
    return total;
}

}  // namespace

double lamb_shift(const BathSpec& bath, double omega, const LambShiftOptions& opts, bool force) {
    if (!(omega > 0.0)) throw ModelError("lamb_shift needs omega > 0");
    const bool enabled = force || (bath.filter && bath.filter->lamb_shift == LambShiftMode::NumericalPV);
    if (!enabled) return 0.0;
    return principal_value(bath, omega, opts);
}

double filtered_spectrum(const BathSpec& bath, double omega, const LambShiftOptions& opts) {
    if (!bath.filter) throw ModelError(to_string(bath.label) + " bath has no filter");
    if (omega == 0.0) return 0.0;
    const FilterSpec& f = *bath.filter;
    const double x = std::abs(omega);
    const double shift = lamb_shift(bath, x, opts);
    const double detuning = x - (f.center + shift);
    if (f.shape == FilterShape::Ideal) {
        return std::abs(detuning) <= f.width ? spectral_response(bath, omega) : 0.0;
    }
    const double emission = spectral_response(bath, x);
    if (emission == 0.0) return 0.0;
    const double branch = spectral_response(bath, omega) / emission;
    const double w = std::numbers::pi * emission;
    return f.coupling / std::numbers::pi * (w * w) / (detuning * detuning + w * w) * branch;
}

double effective_spectrum(const BathSpec& bath, double omega, const LambShiftOptions& opts) {
    return bath.filter ? filtered_spectrum(bath, omega, opts) : spectral_response(bath, omega);
}

Operator hamiltonian_tls_r(const ModelParams& params, int n_max) {
    if (params.variant != Variant::TlsResonator) throw ModelError("hamiltonian_tls_r needs the TLS-resonator variant");
    params.validate();
    const PauliOps p = pauli_ops();
    const Operator b = fock_annihilation(n_max);
    const Operator i2 = Operator::identity(p.sigma_z.sig());
    const Operator ib = Operator::identity(b.sig());
    return 0.5 * params.omega_a * tensor(p.sigma_z, ib) + params.omega_b * tensor(i2, b.adjoint() * b) +
           params.g * tensor(p.sigma_z, b + b.adjoint());
}

Operator hamiltonian_r_r(const ModelParams& params, int n_max_a, int n_max_b) {
    if (params.variant != Variant::ResonatorResonator) {
        throw ModelError("hamiltonian_r_r needs the resonator-resonator variant");
    }
    params.validate();
    const Operator a = fock_annihilation(n_max_a);
    const Operator b = fock_annihilation(n_max_b);
    const Operator na = a.adjoint() * a;
    const Operator ia = Operator::identity(a.sig());
    const Operator ib = Operator::identity(b.sig());
    return params.omega_a * tensor(na, ib) + params.omega_b * tensor(ia, b.adjoint() * b) -
           params.g * tensor(na, b + b.adjoint());
}

Operator polaron_unitary(const ModelParams& params, int n_max) {
    if (params.variant != Variant::TlsResonator) throw ModelError("polaron_unitary needs the TLS-resonator variant");
    const Operator b = fock_annihilation(n_max);
    const Eigen::MatrixXd gen = (b.matrix().adjoint() - b.matrix()).real();
    // sz is diagonal, so the exponential splits into one displacement per TLS level.
    const Eigen::MatrixXd up = (-params.eta() * gen).exp();
    const Eigen::MatrixXd down = (params.eta() * gen).exp();
    const int d = n_max + 1;
    Matrix u = Matrix::Zero(2 * d, 2 * d);
    u.topLeftCorner(d, d) = up.cast<Complex>();
    u.bottomRightCorner(d, d) = down.cast<Complex>();
    return Operator(SpaceSignature({2, d}), std::move(u));
}

Operator polaron_hamiltonian(const ModelParams& params, int n_max) {
    const PauliOps p = pauli_ops();
    const Operator b = fock_annihilation(n_max);
    const Operator i2 = Operator::identity(p.sigma_z.sig());
    const Operator ib = Operator::identity(b.sig());
    const SpaceSignature sig = i2.sig().concat(ib.sig());
    return 0.5 * params.omega_a * tensor(p.sigma_z, ib) + params.omega_b * tensor(i2, b.adjoint() * b) -
           (params.g * params.g / params.omega_b) * Operator::identity(sig);
}

std::vector<int> interior_indices(int n_max, int padding, int tls_dim) {
    std::vector<int> idx;
    const int d = n_max + 1;
    for (int s = 0; s < tls_dim; ++s) {
        for (int n = 0; n <= n_max - padding; ++n) idx.push_back(s * d + n);
    }
    return idx;
}

}  // namespace cbh
