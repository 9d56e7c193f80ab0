#include "cbh/liouvillian.hpp"

#include <cmath>
#include <sstream>

namespace cbh {

std::string to_string(MeVariant v) {
    switch (v) {
        case MeVariant::Full: return "full";
        case MeVariant::Filtered: return "filtered";
        case MeVariant::Reduced: return "reduced";
    }
    return "?";
}

MeVariant parse_me_variant(const std::string& s) {
    if (s == "full") return MeVariant::Full;
    if (s == "filtered") return MeVariant::Filtered;
    if (s == "reduced") return MeVariant::Reduced;
    throw std::invalid_argument("unknown master-equation variant '" + s + "' (expected full|filtered|reduced)");
}

std::string to_string(SigmaZInterpretation i) {
    return i == SigmaZInterpretation::Literal ? "literal" : "excited_population";
}

SigmaZInterpretation parse_sigma_z_interpretation(const std::string& s) {
    if (s == "literal") return SigmaZInterpretation::Literal;
    if (s == "excited_population") return SigmaZInterpretation::ExcitedPopulation;
    throw std::invalid_argument("unknown sigma_z interpretation '" + s + "' (expected literal|excited_population)");
}

Liouvillian::Liouvillian(SpaceSignature sig, SparseMatrix matrix, MeVariant variant, std::vector<DissipatorTerm> terms,
                         bool has_hamiltonian)
    : sig_(std::move(sig)),
      matrix_(std::move(matrix)),
      variant_(variant),
      terms_(std::move(terms)),
      has_hamiltonian_(has_hamiltonian) {
    const Eigen::Index n = static_cast<Eigen::Index>(sig_.total_dim()) * sig_.total_dim();
    if (matrix_.rows() != n || matrix_.cols() != n) throw DimensionError("liouvillian size does not match signature");
}

Matrix Liouvillian::apply(const Matrix& rho) const { return unvec(matrix_ * vec(rho), dim()); }

double Liouvillian::trace_residual() const {
    const int d = dim();
    double worst = 0.0;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        Complex s = 0.0;
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
            if (it.row() % (d + 1) == 0) s += it.value();
        }
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

Baths Baths::from_list(std::span<const BathSpec> list) {
    const BathSpec* found[3] = {nullptr, nullptr, nullptr};
    for (const BathSpec& b : list) {
        const int k = static_cast<int>(b.label);
        if (found[k]) throw ModelError("duplicate " + to_string(b.label) + " bath");
        found[k] = &b;
    }
    for (int k = 0; k < 3; ++k) {
        if (!found[k]) throw ModelError("missing " + to_string(static_cast<BathLabel>(k)) + " bath");
    }
    Baths out{*found[0], *found[1], *found[2]};
    out.validate();
    return out;
}

void Baths::validate() const {
    if (hot.label != BathLabel::Hot || cold.label != BathLabel::Cold || resonator.label != BathLabel::Resonator) {
        throw ModelError("bath labels do not match their slots");
    }
    hot.validate();
    cold.validate();
    resonator.validate();
}

Liouvillian assemble_liouvillian(const SpaceSignature& sig, std::vector<DissipatorTerm> terms, MeVariant variant,
                                 const Operator* hamiltonian) {
    std::vector<SuperopTerm> parts;
    for (const DissipatorTerm& t : terms) {
        if (t.rate < 0.0) throw ModelError("negative rate for dissipator " + t.label);
        if (!(t.jump.sig() == sig)) throw DimensionError("dissipator " + t.label + " has the wrong signature");
        auto d = dissipator_terms(t.rate, t.jump);
        parts.insert(parts.end(), d.begin(), d.end());
    }
    if (hamiltonian) {
        const Operator id = Operator::identity(sig);
        parts.push_back({Complex(0.0, -1.0), *hamiltonian, id});
        parts.push_back({Complex(0.0, 1.0), id, *hamiltonian});
    }
    SparseMatrix m;
    const Eigen::Index n = static_cast<Eigen::Index>(sig.total_dim()) * sig.total_dim();
    if (parts.empty()) {
        m = SparseMatrix(n, n);
    } else {
        m = vectorize_superop(parts).matrix;
    }
    return Liouvillian(sig, std::move(m), variant, std::move(terms), hamiltonian != nullptr);
}

namespace {

struct CompositeOps {
    SpaceSignature sig;
    Operator sm, sp, b, bd, n;

    explicit CompositeOps(int n_max) {
        const PauliOps p = pauli_ops();
        const Operator a = fock_annihilation(n_max);
        const Operator i2 = Operator::identity(p.sigma_z.sig());
        const Operator ib = Operator::identity(a.sig());
        sig = i2.sig().concat(ib.sig());
        sm = tensor(p.sigma_minus, ib);
        sp = tensor(p.sigma_plus, ib);
        b = tensor(i2, a);
        bd = b.adjoint();
        n = bd * b;
    }

    Operator power(const Operator& o, int k) const {
        Operator r = Operator::identity(sig);
        for (int i = 0; i < k; ++i) r = r * o;
        return r;
    }

    Operator diagonal_hamiltonian(const ModelParams& p) const {
        return p.omega_a * (sp * sm) + p.omega_b * n;
    }
};

void push(std::vector<DissipatorTerm>& out, std::string label, double rate, const Operator& jump) {
    if (rate > 0.0) out.push_back({std::move(label), rate, jump});
}

void push_resonator_bath(std::vector<DissipatorTerm>& out, const ModelParams& params, const Baths& baths,
                         const CompositeOps& ops, const LambShiftOptions& lamb) {
    push(out, "R:D[b]", effective_spectrum(baths.resonator, params.omega_b, lamb), ops.b);
    push(out, "R:D[b+]", effective_spectrum(baths.resonator, -params.omega_b, lamb), ops.bd);
}

void check_build_inputs(const ModelParams& params, const Baths& baths, int n_max) {
    if (params.variant != Variant::TlsResonator) throw ModelError("master equations need the TLS-resonator variant");
    params.validate();
    baths.validate();
    if (n_max < 4) throw DimensionError("n_max must be >= 4 for two-quantum jump operators");
}

}  // namespace

Liouvillian build_full_me(const ModelParams& params, const Baths& baths, int n_max, const BuildOptions& opts) {
    check_build_inputs(params, baths, n_max);
    const CompositeOps ops(n_max);
    const double eta = params.eta();
    const double wa = params.omega_a;
    const double wb = params.omega_b;
    std::vector<DissipatorTerm> terms;
    for (const BathSpec* bath : {&baths.hot, &baths.cold}) {
        const std::string tag = bath->label == BathLabel::Hot ? "H:" : "C:";
        auto G = [&](double w) { return effective_spectrum(*bath, w, opts.lamb); };
        const double down = G(wa);
        const double up = G(-wa);
        push(terms, tag + "D[s-]", down, ops.sm);
        push(terms, tag + "D[s- n]", std::pow(eta, 3) * down, ops.sm * ops.n);
        push(terms, tag + "D[s+]", up, ops.sp);
        push(terms, tag + "D[s+ n]", std::pow(eta, 3) * up, ops.sp * ops.n);
        for (int k = 1; k <= 2; ++k) {
            const double w = std::pow(eta, k + 1);
            const Operator bk = ops.power(ops.b, k);
            const Operator bdk = ops.power(ops.bd, k);
            const std::string ks = std::to_string(k);
            push(terms, tag + "D[s- b+^" + ks + "]", w * G(wa - k * wb), ops.sm * bdk);
            push(terms, tag + "D[s+ b^" + ks + "]", w * G(-wa + k * wb), ops.sp * bk);
            push(terms, tag + "D[s- b^" + ks + "]", w * G(wa + k * wb), ops.sm * bk);
            push(terms, tag + "D[s+ b+^" + ks + "]", w * G(-wa - k * wb), ops.sp * bdk);
        }
    }
    push_resonator_bath(terms, params, baths, ops, opts.lamb);
    const Operator h = ops.diagonal_hamiltonian(params);
    return assemble_liouvillian(ops.sig, std::move(terms), MeVariant::Full,
                                opts.include_hamiltonian ? &h : nullptr);
}

Liouvillian build_filtered_me(const ModelParams& params, const Baths& baths, int n_max, const BuildOptions& opts) {
    check_build_inputs(params, baths, n_max);
    auto require_filter = [](const BathSpec& bath, double transition) {
        if (!bath.filter) throw ModelError(to_string(bath.label) + " bath needs a filter for the filtered model");
        const FilterSpec& f = *bath.filter;
        if (std::abs(f.center - transition) > f.width) {
            std::ostringstream os;
            os << to_string(bath.label) << " filter centered at " << f.center << " misses the transition at "
               << transition << " (width " << f.width << ")";
            throw ModelError(os.str());
        }
    };
    const double wm = params.omega_minus();
    require_filter(baths.hot, wm);
    require_filter(baths.cold, params.omega_a);

    const CompositeOps ops(n_max);
    const double eta3 = std::pow(params.eta(), 3);
    const double wa = params.omega_a;
    auto Gc = [&](double w) { return filtered_spectrum(baths.cold, w, opts.lamb); };
    auto Gh = [&](double w) { return filtered_spectrum(baths.hot, w, opts.lamb); };

    std::vector<DissipatorTerm> terms;
    push(terms, "C:D[s-]", Gc(wa), ops.sm);
    push(terms, "C:D[s- n]", eta3 * Gc(wa), ops.sm * ops.n);
    push(terms, "C:D[s+]", Gc(-wa), ops.sp);
    push(terms, "C:D[s+ n]", eta3 * Gc(-wa), ops.sp * ops.n);
    push(terms, "H:D[s- b+^2]", eta3 * Gh(wm), ops.sm * ops.bd * ops.bd);
    push(terms, "H:D[s+ b^2]", eta3 * Gh(-wm), ops.sp * ops.b * ops.b);
    push_resonator_bath(terms, params, baths, ops, opts.lamb);
    const Operator h = ops.diagonal_hamiltonian(params);
    return assemble_liouvillian(ops.sig, std::move(terms), MeVariant::Filtered,
                                opts.include_hamiltonian ? &h : nullptr);
}

double tls_stationary_sigma_z(const ModelParams& params, const Baths& baths, const LambShiftOptions& lamb) {
    const double wa = params.omega_a;
    const double down = effective_spectrum(baths.hot, wa, lamb) + effective_spectrum(baths.cold, wa, lamb);
    const double up = effective_spectrum(baths.hot, -wa, lamb) + effective_spectrum(baths.cold, -wa, lamb);
    if (!(down + up > 0.0)) throw ModelError("TLS has no relaxation channel; stationary <sz> undefined");
    return (up - down) / (up + down);
}

ReducedRates reduced_rates(const ModelParams& params, const Baths& baths, double sigma_z_expect,
                           SigmaZInterpretation interp, const LambShiftOptions& lamb) {
    if (!(sigma_z_expect >= -1.0 && sigma_z_expect <= 1.0)) {
        throw ModelError("<sz> must lie in [-1, 1], got " + std::to_string(sigma_z_expect));
    }
    params.validate();
    baths.validate();
    const double s = interp == SigmaZInterpretation::Literal ? sigma_z_expect : 0.5 * (sigma_z_expect + 1.0);
    const double eta3 = std::pow(params.eta(), 3);
    const double wm = params.omega_minus();
    const double wa = params.omega_a;

    ReducedRates r;
    r.gamma2_down = eta3 * effective_spectrum(baths.hot, -wm, lamb) * (s + 1.0);
    r.gamma2_up = eta3 * effective_spectrum(baths.hot, wm, lamb) * s;
    r.gamma1_down = effective_spectrum(baths.resonator, params.omega_b, lamb);
    r.gamma1_up = effective_spectrum(baths.resonator, -params.omega_b, lamb);
    r.gamma_deph = eta3 * (effective_spectrum(baths.cold, wa, lamb) * s +
                           effective_spectrum(baths.cold, -wa, lamb) * (s + 1.0));

    auto clamp = [&](double& v, const char* name) {
        if (v < 0.0) {
            std::ostringstream os;
            os << name << " = " << v << " clamped to 0";
            r.diagnostics.push_back(os.str());
            v = 0.0;
        }
    };
    clamp(r.gamma2_down, "gamma2_down");
    clamp(r.gamma2_up, "gamma2_up");
    clamp(r.gamma_deph, "gamma_deph");
    return r;
}

Liouvillian build_reduced_me(const ReducedRates& rates, int n_max) {
    if (n_max < 4) throw DimensionError("n_max must be >= 4 for two-quantum jump operators");
    for (double v : {rates.gamma2_down, rates.gamma2_up, rates.gamma1_down, rates.gamma1_up, rates.gamma_deph}) {
        if (v < 0.0 || !std::isfinite(v)) throw ModelError("reduced model rates must be finite and >= 0");
    }
    const Operator b = fock_annihilation(n_max);
    const Operator bd = b.adjoint();
    std::vector<DissipatorTerm> terms;
    push(terms, "D[b^2]", rates.gamma2_down, b * b);
    push(terms, "D[b+^2]", rates.gamma2_up, bd * bd);
    push(terms, "D[b]", rates.gamma1_down, b);
    push(terms, "D[b+]", rates.gamma1_up, bd);
    push(terms, "D[b+ b]", rates.gamma_deph, bd * b);
    return assemble_liouvillian(b.sig(), std::move(terms), MeVariant::Reduced);
}

}  // namespace cbh
