#include "cbh/linalg.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cbh {

SpaceSignature::SpaceSignature(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw DimensionError("space signature needs at least one part");
    long long total = 1;
    for (int p : parts_) {
        if (p < 2) throw DimensionError("subsystem dimension must be >= 2, got " + std::to_string(p));
        total *= p;
        if (total > (1LL << 30)) throw DimensionError("composite dimension overflow");
    }
    total_dim_ = static_cast<int>(total);
}

SpaceSignature SpaceSignature::concat(const SpaceSignature& other) const {
    std::vector<int> p = parts_;
    p.insert(p.end(), other.parts_.begin(), other.parts_.end());
    return SpaceSignature(std::move(p));
}

std::string SpaceSignature::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "x" : "") << parts_[i];
    os << ']';
    return os.str();
}

Operator::Operator(SpaceSignature sig, Matrix data) : sig_(std::move(sig)), data_(std::move(data)) {
    if (data_.rows() != sig_.total_dim() || data_.cols() != sig_.total_dim()) {
        throw DimensionError("operator matrix " + std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()) +
                             " does not match signature " + sig_.to_string());
    }
}

Operator Operator::identity(const SpaceSignature& sig) {
    return Operator(sig, Matrix::Identity(sig.total_dim(), sig.total_dim()));
}

Operator Operator::zero(const SpaceSignature& sig) {
    return Operator(sig, Matrix::Zero(sig.total_dim(), sig.total_dim()));
}

Operator Operator::adjoint() const { return Operator(sig_, data_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
    return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() < tol;
}

SparseMatrix Operator::sparse(double prune_tol) const {
    SparseMatrix s = data_.sparseView();
    if (prune_tol > 0.0) s.prune(Complex(0.0), prune_tol);
    s.makeCompressed();
    return s;
}

static void require_same_sig(const Operator& a, const Operator& b, const char* what) {
    if (!(a.sig() == b.sig())) {
        throw DimensionError(std::string(what) + ": signature mismatch " + a.sig().to_string() + " vs " +
                             b.sig().to_string());
    }
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_sig(a, b, "operator product");
    return Operator(a.sig_, a.data_ * b.data_);
}

Operator operator+(const Operator& a, const Operator& b) {
    require_same_sig(a, b, "operator sum");
    return Operator(a.sig_, a.data_ + b.data_);
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_sig(a, b, "operator difference");
    return Operator(a.sig_, a.data_ - b.data_);
}

Operator operator*(Complex c, const Operator& a) { return Operator(a.sig_, c * a.data_); }
Operator operator*(double c, const Operator& a) { return Operator(a.sig_, c * a.data_); }

DensityMatrix::DensityMatrix(SpaceSignature sig, Matrix data, double positivity_tol)
    : sig_(std::move(sig)), data_(std::move(data)) {
    const int d = sig_.total_dim();
    if (data_.rows() != d || data_.cols() != d) throw DimensionError("density matrix does not match signature");
    const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        throw InvalidStateError("density matrix not Hermitian (residue " + std::to_string(herm) + ")");
    }
    const Complex tr = data_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw InvalidStateError("density matrix trace " + std::to_string(tr.real()) + " differs from 1");
    }
    const double lam = min_eigenvalue();
    if (lam < -positivity_tol) {
        throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(lam));
    }
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(data_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::pure(const SpaceSignature& sig, const Vector& psi) {
    if (psi.size() != sig.total_dim()) throw DimensionError("state vector does not match signature");
    const Vector n = psi / psi.norm();
    return DensityMatrix(sig, n * n.adjoint());
}

DensityMatrix DensityMatrix::from_diagonal(const SpaceSignature& sig, const Eigen::VectorXd& populations) {
    if (populations.size() != sig.total_dim()) throw DimensionError("population vector does not match signature");
    Matrix m = Matrix::Zero(sig.total_dim(), sig.total_dim());
    m.diagonal() = populations.cast<Complex>() / populations.sum();
    return DensityMatrix(sig, std::move(m));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    const Operator t = tensor(a.as_operator(), b.as_operator());
    return DensityMatrix(t.sig(), t.matrix());
}

Operator fock_annihilation(int n_max) {
    if (n_max < 1) throw DimensionError("n_max must be >= 1, got " + std::to_string(n_max));
    const int d = n_max + 1;
    Matrix m = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(SpaceSignature({d}), std::move(m));
}

Operator number_operator(int n_max) {
    if (n_max < 1) throw DimensionError("n_max must be >= 1, got " + std::to_string(n_max));
    const int d = n_max + 1;
    Matrix m = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) m(n, n) = static_cast<double>(n);
    return Operator(SpaceSignature({d}), std::move(m));
}

PauliOps pauli_ops() {
    const SpaceSignature sig({2});
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    Matrix plus = Matrix::Zero(2, 2);
    plus(0, 1) = 1.0;  // |e><g|
    return {Operator(sig, z), Operator(sig, plus), Operator(sig, plus.adjoint())};
}

Operator tensor(const Operator& a, const Operator& b) {
    const Matrix& x = a.matrix();
    const Matrix& y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return Operator(a.sig().concat(b.sig()), std::move(out));
}

Operator dissipator_apply(const Operator& o, const Operator& rho) {
    require_same_sig(o, rho, "dissipator");
    const Matrix& a = o.matrix();
    const Matrix& r = rho.matrix();
    const Matrix ada = a.adjoint() * a;
    return Operator(o.sig(), a * r * a.adjoint() - 0.5 * (r * ada + ada * r));
}

Operator dissipator_apply(const Operator& o, const DensityMatrix& rho) {
    return dissipator_apply(o, rho.as_operator());
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
                    trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                       ia.value() * ib.value());
                }
            }
        }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Superoperator vectorize_superop(std::span<const SuperopTerm> terms) {
    if (terms.empty()) throw DimensionError("superoperator needs at least one term");
    const SpaceSignature sig = terms.front().left.sig();
    const int d = sig.total_dim();
    SparseMatrix total(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
    for (const SuperopTerm& t : terms) {
        if (!(t.left.sig() == sig) || !(t.right.sig() == sig)) {
            throw DimensionError("superoperator term signature mismatch: expected " + sig.to_string());
        }
        if (t.coefficient == Complex(0.0)) continue;
        const SparseMatrix right_t = SparseMatrix(t.right.sparse().transpose());
        total += t.coefficient * sparse_kron(right_t, t.left.sparse());
    }
    total.prune(Complex(0.0), 0.0);
    total.makeCompressed();
    return {sig, std::move(total)};
}

std::vector<SuperopTerm> dissipator_terms(double rate, const Operator& o) {
    const Operator od = o.adjoint();
    const Operator oo = od * o;
    const Operator id = Operator::identity(o.sig());
    return {{Complex(rate), o, od}, {Complex(-0.5 * rate), id, oo}, {Complex(-0.5 * rate), oo, id}};
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw DimensionError("vector length is not dim^2");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Eigen::RowVectorXcd trace_functional(int dim) {
    Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(static_cast<Eigen::Index>(dim) * dim);
    for (int i = 0; i < dim; ++i) t(i * (dim + 1)) = 1.0;
    return t;
}

}  // namespace cbh
