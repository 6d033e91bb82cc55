// linalg.hpp — dense complex primitives: tensor products, commutators,
// Bloch-vector parametrization, principal matrix square roots,
// proportionality tests.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace loccforge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// A single-party operator; always a square complex matrix.
using LocalOperator = Matrix;

// Numerical thresholds shared by all decision procedures. `eq` bounds
// residuals that must vanish; `nz` is the level above which a commutator
// counts as robustly nonzero. eq << nz keeps "numerically zero" and
// "structurally nonzero" apart.
struct Tolerances {
    double eq = 1e-9;
    double nz = 1e-6;
};

/// Pauli matrix sigma_k for k in 0..3 (sigma_0 = identity).
const LocalOperator& pauli(int k);
Matrix identity(Index d);

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
};

// g = g_1 (x) g_2 (x) ... (x) g_n, one local factor per party.
struct ProductOperator {
    std::vector<LocalOperator> factors;

    ProductOperator() = default;
    explicit ProductOperator(std::vector<LocalOperator> f) : factors(std::move(f)) {}

    std::size_t parties() const { return factors.size(); }
    std::vector<Index> dims() const;
    Index total_dim() const;
    Matrix full_matrix() const;
};

double frobenius_norm(const Matrix& m);
bool all_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = 1e-9);
double unitarity_residual(const Matrix& m);
bool is_unitary(const Matrix& m, double tol = 1e-9);
double smallest_singular_value(const Matrix& m);

/// Gram operator g^dagger g.
Matrix gram(const Matrix& g);

/// Kronecker product of the factors in party order (party 1 most significant).
Matrix tensor_product(std::span<const LocalOperator> factors);
Matrix tensor_product(std::initializer_list<LocalOperator> factors);

/// Frobenius norm of AB - BA; exactly zero iff A and B commute.
double commutator_norm(const LocalOperator& a, const LocalOperator& b);

/// Positive square root of 1/2 + v.sigma. Requires |v| < 1/2 so that the
/// Gram operator is positive definite; the result g satisfies
/// g^dagger g = 1/2 + v.sigma and tr(g^dagger g) = 1.
LocalOperator bloch_to_operator(const BlochVector& v);

/// Inverse of the convention above: v_k = tr(G sigma_k) / 2 for a
/// Hermitian, trace-one 2x2 operator G.
BlochVector operator_to_bloch(const LocalOperator& g, double tol = 1e-9);

/// Principal square root of a Hermitian positive-semidefinite matrix.
/// Rejects inputs with an eigenvalue below -tol.
LocalOperator matrix_sqrt_psd(const LocalOperator& m, double tol = 1e-9);

/// Principal square root of a (normal) matrix via spectral decomposition,
/// branch cut on the negative real axis.
LocalOperator matrix_sqrt_principal(const LocalOperator& m);

/// If a = lambda * b within tol (scale-invariant Frobenius residual),
/// returns lambda; otherwise empty. Both zero -> 1; b zero, a nonzero -> empty.
std::optional<Complex> proportional(const Matrix& a, const Matrix& b, double tol = 1e-9);

/// Applies the product operator to a state vector over the factor
/// dimensions, party-major ordering.
Vector apply_product(const ProductOperator& op, const Vector& psi);

/// Single-party reduced density matrix of a (not necessarily normalized)
/// state vector.
Matrix reduced_density(const Vector& psi, std::span<const Index> dims, std::size_t party);

}  // namespace loccforge
