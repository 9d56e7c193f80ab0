#include "cbh/observables.hpp"

#include <cmath>

namespace cbh {

Operator embed_resonator(const SpaceSignature& sig, const Operator& op) {
    const int last = sig.parts().back();
    if (op.dim() != last) throw DimensionError("resonator operator does not match the last factor of " + sig.to_string());
    if (sig.num_parts() == 1) return op;
    std::vector<int> head(sig.parts().begin(), sig.parts().end() - 1);
    return tensor(Operator::identity(SpaceSignature(head)), op);
}

Operator resonator_annihilation(const SpaceSignature& sig) {
    return embed_resonator(sig, fock_annihilation(sig.parts().back() - 1));
}

Matrix resonator_marginal(const DensityMatrix& rho) {
    const int d = rho.sig().parts().back();
    const int blocks = rho.dim() / d;
    Matrix out = Matrix::Zero(d, d);
    for (int s = 0; s < blocks; ++s) out += rho.matrix().block(s * d, s * d, d, d);
    return out;
}

std::vector<double> number_distribution(const DensityMatrix& rho) {
    const Matrix m = resonator_marginal(rho);
    std::vector<double> p(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index n = 0; n < m.rows(); ++n) p[static_cast<std::size_t>(n)] = m(n, n).real();
    return p;
}

double mean_occupation(const DensityMatrix& rho) {
    const std::vector<double> p = number_distribution(rho);
    double m = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
    return m;
}

double g2_zero(const DensityMatrix& rho) {
    const std::vector<double> p = number_distribution(rho);
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double x = static_cast<double>(n);
        m1 += x * p[n];
        m2 += x * (x - 1.0) * p[n];
    }
    if (!(m1 > kMinOccupationForG2)) {
        throw UndefinedObservableError("g2(0) undefined: mean occupation " + std::to_string(m1) + " below threshold");
    }
    return m2 / (m1 * m1);
}

PhotonStatistics photon_statistics(const DensityMatrix& rho) {
    PhotonStatistics s;
    s.p_n = number_distribution(rho);
    s.mean_n = mean_occupation(rho);
    if (s.mean_n > kMinOccupationForG2) s.g2_zero = g2_zero(rho);
    return s;
}

double tls_sigma_z(const DensityMatrix& rho) {
    if (rho.sig().num_parts() != 2 || rho.sig().part(0) != 2) {
        throw DimensionError("tls_sigma_z needs a [2 x n] state, got " + rho.sig().to_string());
    }
    const int d = rho.sig().part(1);
    const double pe = rho.matrix().topLeftCorner(d, d).trace().real();
    const double pg = rho.matrix().bottomRightCorner(d, d).trace().real();
    return pe - pg;
}

DensityMatrix to_lab_frame(const DensityMatrix& rho, const ModelParams& params) {
    if (rho.sig().num_parts() != 2 || rho.sig().part(0) != 2) {
        throw DimensionError("to_lab_frame needs a [2 x n] state");
    }
    const Operator u = polaron_unitary(params, rho.sig().part(1) - 1);
    Matrix lab = u.matrix() * rho.matrix() * u.matrix().adjoint();
    lab = 0.5 * (lab + lab.adjoint()).eval();
    return DensityMatrix(rho.sig(), lab);
}

}  // namespace cbh
