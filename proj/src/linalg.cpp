#include "loccforge/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loccforge {

namespace {

Matrix make_pauli(int k) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, -i, i, 0; break;
        case 3: m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: index must be in 0..3");
    }
    return m;
}

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument(std::string(who) + ": operator must be square");
    }
}

}  // namespace

const LocalOperator& pauli(int k) {
    static const Matrix s0 = make_pauli(0);
    static const Matrix s1 = make_pauli(1);
    static const Matrix s2 = make_pauli(2);
    static const Matrix s3 = make_pauli(3);
    switch (k) {
        case 0: return s0;
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        default: throw std::invalid_argument("pauli: index must be in 0..3");
    }
}

Matrix identity(Index d) { return Matrix::Identity(d, d); }

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

std::vector<Index> ProductOperator::dims() const {
    std::vector<Index> d;
    d.reserve(factors.size());
    for (const auto& f : factors) d.push_back(f.rows());
    return d;
}

Index ProductOperator::total_dim() const {
    Index d = 1;
    for (const auto& f : factors) d *= f.rows();
    return d;
}

Matrix ProductOperator::full_matrix() const {
    return tensor_product(std::span<const LocalOperator>(factors));
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

bool all_finite(const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

double unitarity_residual(const Matrix& m) {
    return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

bool is_unitary(const Matrix& m, double tol) {
    return m.rows() == m.cols() && unitarity_residual(m) <= tol;
}

double smallest_singular_value(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
}

Matrix gram(const Matrix& g) { return g.adjoint() * g; }

Matrix tensor_product(std::span<const LocalOperator> factors) {
    if (factors.empty()) throw std::invalid_argument("empty tensor product");
    Matrix acc = factors[0];
    for (std::size_t n = 1; n < factors.size(); ++n) {
        const Matrix& f = factors[n];
        Matrix next(acc.rows() * f.rows(), acc.cols() * f.cols());
        for (Index i = 0; i < acc.rows(); ++i)
            for (Index j = 0; j < acc.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = acc(i, j) * f;
        acc = std::move(next);
    }
    return acc;
}

Matrix tensor_product(std::initializer_list<LocalOperator> factors) {
    std::vector<LocalOperator> v(factors);
    return tensor_product(std::span<const LocalOperator>(v));
}

double commutator_norm(const LocalOperator& a, const LocalOperator& b) {
    require_square(a, "commutator_norm");
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("commutator_norm: dimension mismatch");
    }
    return (a * b - b * a).norm();
}

LocalOperator bloch_to_operator(const BlochVector& v) {
    if (v.norm() >= 0.5) {
        throw std::domain_error("non-positive Gram operator: Bloch norm must be < 1/2");
    }
    Matrix g = 0.5 * pauli(0) + v.x * pauli(1) + v.y * pauli(2) + v.z * pauli(3);
    return matrix_sqrt_psd(g);
}

BlochVector operator_to_bloch(const LocalOperator& g, double tol) {
    if (g.rows() != 2 || g.cols() != 2) {
        throw std::invalid_argument("operator_to_bloch: expected a 2x2 operator");
    }
    if (!is_hermitian(g, tol)) {
        throw std::invalid_argument("operator_to_bloch: operator is not Hermitian");
    }
    if (std::abs(g.trace() - Complex(1.0, 0.0)) > tol) {
        throw std::invalid_argument("operator_to_bloch: trace must be 1");
    }
    BlochVector v;
    v.x = 0.5 * (g * pauli(1)).trace().real();
    v.y = 0.5 * (g * pauli(2)).trace().real();
    v.z = 0.5 * (g * pauli(3)).trace().real();
    return v;
}

LocalOperator matrix_sqrt_psd(const LocalOperator& m, double tol) {
    require_square(m, "matrix_sqrt_psd");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > tol * scale) {
        throw std::invalid_argument("matrix_sqrt_psd: operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tol * scale) {
            throw std::domain_error("matrix_sqrt_psd: negative eigenvalue " + std::to_string(ev(i)));
        }
        ev(i) = std::sqrt(std::max(0.0, ev(i)));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

LocalOperator matrix_sqrt_principal(const LocalOperator& m) {
    require_square(m, "matrix_sqrt_principal");
    Eigen::ComplexEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("matrix_sqrt_principal: eigendecomposition failed");
    }
    Vector ev = es.eigenvalues();
    for (Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(ev(i));
    // V sqrt(D) V^{-1}; valid for diagonalizable (in particular normal) input.
    Matrix v = es.eigenvectors();
    return v * ev.asDiagonal() * v.inverse();
}

std::optional<Complex> proportional(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("proportional: shape mismatch");
    }
    const double na = a.norm();
    const double nb = b.norm();
    const double tiny = 1e-15 * (1.0 + std::max(na, nb));
    if (nb <= tiny) {
        if (na <= tiny) return Complex(1.0, 0.0);
        return std::nullopt;
    }
    if (na <= tiny) return Complex(0.0, 0.0);
    const Complex lambda = (b.adjoint() * a).trace() / Complex(b.squaredNorm(), 0.0);
    const double residual = (a - lambda * b).norm() / na;
    if (residual < tol) return lambda;
    return std::nullopt;
}

Vector apply_product(const ProductOperator& op, const Vector& psi) {
    const auto dims = op.dims();
    Index total = 1;
    for (Index d : dims) total *= d;
    if (psi.size() != total) {
        throw std::invalid_argument("apply_product: state dimension mismatch");
    }
    Vector cur = psi;
    Index pre = 1;
    for (std::size_t party = 0; party < dims.size(); ++party) {
        const Index d = dims[party];
        const Index post = total / (pre * d);
        const Matrix& f = op.factors[party];
        Vector next = Vector::Zero(total);
        for (Index p = 0; p < pre; ++p) {
            for (Index b = 0; b < d; ++b) {
                for (Index a = 0; a < d; ++a) {
                    const Complex fab = f(b, a);
                    if (fab == Complex(0.0, 0.0)) continue;
                    const Index src = (p * d + a) * post;
                    const Index dst = (p * d + b) * post;
                    for (Index q = 0; q < post; ++q) next(dst + q) += fab * cur(src + q);
                }
            }
        }
        cur = std::move(next);
        pre *= d;
    }
    return cur;
}

Matrix reduced_density(const Vector& psi, std::span<const Index> dims, std::size_t party) {
    Index total = 1;
    for (Index d : dims) total *= d;
    if (psi.size() != total) {
        throw std::invalid_argument("reduced_density: state dimension mismatch");
    }
    if (party >= dims.size()) {
        throw std::invalid_argument("reduced_density: party index out of range");
    }
    Index pre = 1;
    for (std::size_t k = 0; k < party; ++k) pre *= dims[k];
    const Index d = dims[party];
    const Index post = total / (pre * d);
    Matrix rho = Matrix::Zero(d, d);
    for (Index p = 0; p < pre; ++p)
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b)
                for (Index q = 0; q < post; ++q)
                    rho(a, b) += psi((p * d + a) * post + q) * std::conj(psi((p * d + b) * post + q));
    return rho;
}

}  // namespace loccforge
