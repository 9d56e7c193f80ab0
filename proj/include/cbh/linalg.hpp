#pragma once

// Truncated-Fock-space operator algebra.
//
// Basis ordering for composite spaces is the order of SpaceSignature::parts,
// first factor slowest (Kronecker convention). For the two-level system the
// excited state is index 0 and the ground state index 1.
//
// Superoperators act on column-major vectorized density matrices:
//   vec(rho)[i + j * d] = rho(i, j),   vec(A rho B) = (B^T (x) A) vec(rho).

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cbh {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpaceSignature {
public:
    SpaceSignature() = default;
    explicit SpaceSignature(std::vector<int> parts);

    const std::vector<int>& parts() const { return parts_; }
    int total_dim() const { return total_dim_; }
    std::size_t num_parts() const { return parts_.size(); }
    int part(std::size_t i) const { return parts_.at(i); }

    SpaceSignature concat(const SpaceSignature& other) const;
    std::string to_string() const;

    bool operator==(const SpaceSignature&) const = default;

private:
    std::vector<int> parts_;
    int total_dim_ = 0;
};

class Operator {
public:
    Operator() = default;
    Operator(SpaceSignature sig, Matrix data);

    static Operator identity(const SpaceSignature& sig);
    static Operator zero(const SpaceSignature& sig);

    const SpaceSignature& sig() const { return sig_; }
    const Matrix& matrix() const { return data_; }
    int dim() const { return sig_.total_dim(); }

    Operator adjoint() const;
    Complex trace() const { return data_.trace(); }
    bool is_hermitian(double tol = 1e-12) const;
    SparseMatrix sparse(double prune_tol = 0.0) const;

    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(Complex c, const Operator& a);
    friend Operator operator*(double c, const Operator& a);

private:
    SpaceSignature sig_;
    Matrix data_;
};

/// Hermitian, unit-trace, positive-semidefinite state.
///
/// Construction validates Hermiticity (1e-10), trace (1e-10) and the minimum
/// eigenvalue against `positivity_tol`; violations throw InvalidStateError.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    DensityMatrix() = default;
    DensityMatrix(SpaceSignature sig, Matrix data, double positivity_tol = kPositivityTol);

    static DensityMatrix pure(const SpaceSignature& sig, const Vector& psi);
    static DensityMatrix from_diagonal(const SpaceSignature& sig, const Eigen::VectorXd& populations);

    const SpaceSignature& sig() const { return sig_; }
    const Matrix& matrix() const { return data_; }
    int dim() const { return sig_.total_dim(); }
    Operator as_operator() const { return Operator(sig_, data_); }
    double min_eigenvalue() const;

private:
    SpaceSignature sig_;
    Matrix data_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Ladder operator on n_max + 1 Fock levels: entry (n-1, n) = sqrt(n).
Operator fock_annihilation(int n_max);
Operator number_operator(int n_max);

struct PauliOps {
    Operator sigma_z;
    Operator sigma_plus;
    Operator sigma_minus;
};

/// sigma_z = diag(+1, -1) in (excited, ground) ordering.
PauliOps pauli_ops();

Operator tensor(const Operator& a, const Operator& b);

/// D[o] rho = o rho o^dag - 1/2 {o^dag o, rho}
Operator dissipator_apply(const Operator& o, const DensityMatrix& rho);
Operator dissipator_apply(const Operator& o, const Operator& rho);

/// One term c * A rho B of a superoperator.
struct SuperopTerm {
    Complex coefficient;
    Operator left;
    Operator right;
};

struct Superoperator {
    SpaceSignature sig;
    SparseMatrix matrix;
};

Superoperator vectorize_superop(std::span<const SuperopTerm> terms);

/// The three terms of rate * D[o].
std::vector<SuperopTerm> dissipator_terms(double rate, const Operator& o);

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b);

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

/// Row functional t with t . vec(rho) = Tr(rho).
Eigen::RowVectorXcd trace_functional(int dim);

}  // namespace cbh
