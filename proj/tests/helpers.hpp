#pragma once

#include <random>

#include "cbh/linalg.hpp"

namespace cbh::testing {

inline Matrix random_matrix(int dim, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(nd(rng), nd(rng));
    }
    return m;
}

inline Matrix random_hermitian(int dim, std::mt19937& rng) {
    const Matrix m = random_matrix(dim, rng);
    return 0.5 * (m + m.adjoint());
}

/// Full-rank random state A A^dag / Tr.
inline DensityMatrix random_state(const SpaceSignature& sig, std::mt19937& rng) {
    const Matrix a = random_matrix(sig.total_dim(), rng);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(sig, rho);
}

inline DensityMatrix fock_state(int n_max, int n) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_max + 1);
    p(n) = 1.0;
    return DensityMatrix::from_diagonal(SpaceSignature({n_max + 1}), p);
}

inline DensityMatrix thermal_state(int n_max, double nbar) {
    Eigen::VectorXd p(n_max + 1);
    const double q = nbar / (1.0 + nbar);
    for (int n = 0; n <= n_max; ++n) p(n) = std::pow(q, n);
    p /= p.sum();
    return DensityMatrix::from_diagonal(SpaceSignature({n_max + 1}), p);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace cbh::testing
