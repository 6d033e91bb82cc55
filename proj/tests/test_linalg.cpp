#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loccforge/linalg.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace loccforge;

namespace {

std::mt19937_64 test_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return m;
}

// Oracle: textbook four-loop Kronecker product, independent of the library.
Matrix kronecker_oracle(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            for (Index k = 0; k < b.rows(); ++k)
                for (Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

}  // namespace

TEST_CASE("tensor product of identities is the identity") {
    Matrix t = tensor_product({pauli(0), pauli(0)});
    CHECK((t - identity(4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("tensor product matches the Kronecker definition") {
    Matrix t = tensor_product({pauli(1), pauli(3)});
    Matrix expected = kronecker_oracle(pauli(1), pauli(3));
    CHECK((t - expected).norm() < 1e-15);
}

TEST_CASE("tensor product of Bloch-parametrized factors matches the hand expansion") {
    const double x = 0.05;
    Matrix g1 = bloch_to_operator({x, x, 2 * x});
    Matrix g2 = bloch_to_operator({x, -x, 0});
    Matrix t = tensor_product({g1, g2});
    Matrix expected = kronecker_oracle(g1, g2);
    CHECK((t - expected).norm() < 1e-14);
    CHECK(t.rows() == 4);
}

TEST_CASE("tensor product is associative") {
    auto rng = test_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(2, 2, rng);
        Matrix b = random_matrix(3, 3, rng);
        Matrix c = random_matrix(2, 2, rng);
        Matrix left = tensor_product({tensor_product({a, b}), c});
        Matrix right = tensor_product({a, tensor_product({b, c})});
        CHECK((left - right).norm() < 1e-12 * left.norm());
    }
}

TEST_CASE("empty tensor product is rejected") {
    std::vector<LocalOperator> none;
    CHECK_THROWS_WITH_AS(tensor_product(std::span<const LocalOperator>(none)),
                         "empty tensor product", std::invalid_argument);
}

TEST_CASE("self-commutation vanishes") {
    CHECK(commutator_norm(pauli(3), pauli(3)) == doctest::Approx(0.0));
}

TEST_CASE("commutator of sigma_1 and sigma_3 via direct multiplication") {
    // Oracle: direct 2x2 products; [s1, s3] should equal -2i s2.
    Matrix direct = pauli(1) * pauli(3) - pauli(3) * pauli(1);
    Matrix minus_2i_s2 = Complex(0.0, -2.0) * pauli(2);
    CHECK((direct - minus_2i_s2).norm() < 1e-15);
    CHECK(commutator_norm(pauli(1), pauli(3)) == doctest::Approx(direct.norm()));
    CHECK(commutator_norm(pauli(1), pauli(3)) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("diagonal operators commute") {
    for (double x : {-0.7, 0.01, 2.5}) {
        Matrix a = 0.5 * pauli(0) + x * pauli(3);
        CHECK(commutator_norm(a, pauli(3)) < 1e-15);
    }
}

TEST_CASE("commutator rejects mismatched dimensions") {
    CHECK_THROWS_AS(commutator_norm(pauli(0), identity(3)), std::invalid_argument);
}

TEST_CASE("polynomials of a common matrix commute") {
    auto rng = test_rng(12);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Index d = 2 + (trial % 3);
        Matrix a = random_matrix(d, d, rng);
        Matrix p = coeff(rng) * identity(d) + coeff(rng) * a + coeff(rng) * a * a;
        Matrix q = coeff(rng) * identity(d) + coeff(rng) * a * a + coeff(rng) * a * a * a;
        CHECK(commutator_norm(p, q) < 1e-10 * std::max(1.0, p.norm() * q.norm()));
    }
}

TEST_CASE("bloch_to_operator at the origin is the maximally mixed root") {
    Matrix g = bloch_to_operator({0, 0, 0});
    CHECK((g - pauli(0) / std::sqrt(2.0)).norm() < 1e-14);
}

TEST_CASE("bloch_to_operator on the z-axis is diagonal") {
    Matrix g = bloch_to_operator({0, 0, 0.3});
    Matrix expected(2, 2);
    expected << std::sqrt(0.8), 0, 0, std::sqrt(0.2);
    CHECK((g - expected).norm() < 1e-14);
}

TEST_CASE("bloch round trip through the Gram operator") {
    BlochVector v{0.05, 0.05, 0.10};
    Matrix g = bloch_to_operator(v);
    BlochVector back = operator_to_bloch(gram(g));
    CHECK(back.x == doctest::Approx(v.x).epsilon(1e-10));
    CHECK(back.y == doctest::Approx(v.y).epsilon(1e-10));
    CHECK(back.z == doctest::Approx(v.z).epsilon(1e-10));
}

TEST_CASE("bloch_to_operator rejects vectors at or past the positivity boundary") {
    CHECK_THROWS_AS(bloch_to_operator({0.5, 0, 0}), std::domain_error);
    CHECK_THROWS_AS(bloch_to_operator({0.3, 0.3, 0.3}), std::domain_error);
}

TEST_CASE("operator_to_bloch on simple operators") {
    BlochVector center = operator_to_bloch(0.5 * pauli(0));
    CHECK(center.norm() < 1e-15);
    Matrix diag(2, 2);
    diag << 0.8, 0, 0, 0.2;
    BlochVector v = operator_to_bloch(diag);
    CHECK(v.x == doctest::Approx(0.0));
    CHECK(v.y == doctest::Approx(0.0));
    CHECK(v.z == doctest::Approx(0.3));
}

TEST_CASE("operator_to_bloch inverts bloch_to_operator on random vectors") {
    auto rng = test_rng(13);
    std::uniform_real_distribution<double> comp(-0.28, 0.28);
    int checked = 0;
    while (checked < 100) {
        BlochVector v{comp(rng), comp(rng), comp(rng)};
        if (v.norm() >= 0.49) continue;
        BlochVector back = operator_to_bloch(gram(bloch_to_operator(v)));
        CHECK(std::abs(back.x - v.x) < 1e-10);
        CHECK(std::abs(back.y - v.y) < 1e-10);
        CHECK(std::abs(back.z - v.z) < 1e-10);
        ++checked;
    }
}

TEST_CASE("operator_to_bloch validates its input") {
    CHECK_THROWS_AS(operator_to_bloch(pauli(1) + Complex(0, 1) * pauli(0)), std::invalid_argument);
    CHECK_THROWS_AS(operator_to_bloch(pauli(0)), std::invalid_argument);  // trace 2
}

TEST_CASE("psd square root on diagonal input") {
    CHECK((matrix_sqrt_psd(identity(2)) - identity(2)).norm() < 1e-14);
    Matrix m(2, 2);
    m << 4, 0, 0, 9;
    Matrix expected(2, 2);
    expected << 2, 0, 0, 3;
    CHECK((matrix_sqrt_psd(m) - expected).norm() < 1e-13);
}

TEST_CASE("psd square root squares back for random PSD matrices") {
    auto rng = test_rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const Index d = 2 + (trial % 3);
        Matrix a = random_matrix(d, d, rng);
        Matrix m = gram(a);
        Matrix r = matrix_sqrt_psd(m);
        CHECK((r * r - m).norm() < 1e-10 * std::max(1.0, m.norm()));
        CHECK(is_hermitian(r, 1e-10));
    }
}

TEST_CASE("psd square root rejects negative eigenvalues") {
    CHECK_THROWS_AS(matrix_sqrt_psd(-identity(2)), std::domain_error);
}

TEST_CASE("principal square root of i sigma_x") {
    Matrix m = Complex(0, 1) * pauli(1);
    Matrix r = matrix_sqrt_principal(m);
    CHECK((r * r - m).norm() < 1e-12);
    // principal branch keeps eigenvalue arguments in (-pi/2, pi/2]
    Eigen::ComplexEigenSolver<Matrix> es(r);
    for (Index i = 0; i < 2; ++i) {
        CHECK(es.eigenvalues()(i).real() > 0.0);
    }
}

TEST_CASE("proportional recovers real and complex scale factors") {
    auto two = proportional(2.0 * pauli(3), pauli(3));
    REQUIRE(two.has_value());
    CHECK(std::abs(*two - Complex(2.0, 0.0)) < 1e-12);

    CHECK_FALSE(proportional(pauli(1), pauli(3)).has_value());

    auto rng = test_rng(15);
    const Complex phase = std::exp(Complex(0.0, std::numbers::pi / 3.0));
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m = random_matrix(3, 3, rng);
        auto lambda = proportional(phase * m, m);
        REQUIRE(lambda.has_value());
        CHECK(std::abs(*lambda - phase) < 1e-12);
    }
}

TEST_CASE("proportional zero conventions") {
    Matrix zero = Matrix::Zero(2, 2);
    auto both = proportional(zero, zero);
    REQUIRE(both.has_value());
    CHECK(*both == Complex(1.0, 0.0));
    CHECK_FALSE(proportional(pauli(1), zero).has_value());
    auto left = proportional(zero, pauli(1));
    REQUIRE(left.has_value());
    CHECK(std::abs(*left) < 1e-12);
}

TEST_CASE("apply_product agrees with the full tensor matrix") {
    auto rng = test_rng(16);
    for (int trial = 0; trial < 15; ++trial) {
        ProductOperator op({random_matrix(2, 2, rng), random_matrix(3, 3, rng),
                            random_matrix(2, 2, rng)});
        Vector psi = random_matrix(12, 1, rng).col(0);
        Vector fast = apply_product(op, psi);
        Vector full = op.full_matrix() * psi;
        CHECK((fast - full).norm() < 1e-12 * std::max(1.0, full.norm()));
    }
}

TEST_CASE("reduced density of a product state is pure") {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << std::sqrt(0.5), std::sqrt(0.5);
    Vector psi(4);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) psi(i * 2 + j) = a(i) * b(j);
    std::vector<Index> dims{2, 2};
    Matrix rho0 = reduced_density(psi, dims, 0);
    Matrix rho1 = reduced_density(psi, dims, 1);
    CHECK((rho0 * rho0 - rho0).norm() < 1e-12);
    CHECK((rho1 * rho1 - rho1).norm() < 1e-12);
    CHECK(rho1(0, 1).real() == doctest::Approx(0.5));
}
