#include "loccforge/seed_states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace loccforge {

namespace {

ProductOperator identity_product(const std::vector<Index>& dims) {
    std::vector<LocalOperator> f;
    f.reserve(dims.size());
    for (Index d : dims) f.push_back(identity(d));
    return ProductOperator(std::move(f));
}

void require_dims_match(const StabilizerGroup& group) {
    for (std::size_t e = 0; e < group.size(); ++e) {
        const auto& op = group.elements[e].op;
        if (op.parties() != group.parties()) {
            throw std::invalid_argument("stabilizer element " + std::to_string(e) +
                                        " has wrong party count");
        }
        for (std::size_t p = 0; p < op.parties(); ++p) {
            if (op.factors[p].rows() != group.party_dims[p] ||
                op.factors[p].cols() != group.party_dims[p]) {
                throw std::invalid_argument("stabilizer element " + std::to_string(e) +
                                            ": factor dimension mismatch at party " +
                                            std::to_string(p + 1));
            }
        }
    }
}

// Fits the unit phase phi with phi * S|psi> = |psi> and returns the residual.
std::pair<Complex, double> fit_phase(const ProductOperator& op, const Vector& psi) {
    Vector mapped = apply_product(op, psi);
    Complex overlap = psi.dot(mapped);  // <psi| S |psi>
    if (std::abs(overlap) < 0.5) {
        return {Complex(1.0, 0.0), (mapped - psi).norm()};
    }
    Complex phase = std::conj(overlap) / std::abs(overlap);
    return {phase, (phase * mapped - psi).norm()};
}

StabilizerGroup fit_concrete_group(std::vector<Index> party_dims,
                                   std::vector<ProductOperator> candidates,
                                   const Vector& amplitudes, double residual_bound) {
    StabilizerGroup group;
    group.party_dims = std::move(party_dims);
    group.mode = GroupMode::Concrete;
    for (auto& op : candidates) {
        auto [phase, residual] = fit_phase(op, amplitudes);
        if (residual > residual_bound) {
            throw std::runtime_error("symmetry verification failed: residual " +
                                     std::to_string(residual));
        }
        group.elements.push_back({std::move(op), phase});
    }
    return group;
}

}  // namespace

std::optional<std::size_t> match_element(const StabilizerGroup& group,
                                         const ProductOperator& op, double tol) {
    for (std::size_t e = 0; e < group.size(); ++e) {
        bool ok = true;
        for (std::size_t p = 0; p < group.parties() && ok; ++p) {
            auto lambda = proportional(op.factors[p], group.factor(e, p), tol);
            if (!lambda || std::abs(std::abs(*lambda) - 1.0) > 1e-6) ok = false;
        }
        if (ok) return e;
    }
    return std::nullopt;
}

std::optional<std::size_t> identity_index(const StabilizerGroup& group, double tol) {
    return match_element(group, identity_product(group.party_dims), tol);
}

std::vector<std::vector<int>> closure_table(const StabilizerGroup& group, double tol) {
    const std::size_t n = group.size();
    std::vector<std::vector<int>> table(n, std::vector<int>(n, -1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<LocalOperator> prod;
            prod.reserve(group.parties());
            for (std::size_t p = 0; p < group.parties(); ++p) {
                prod.push_back(group.factor(i, p) * group.factor(j, p));
            }
            auto m = match_element(group, ProductOperator(std::move(prod)), tol);
            table[i][j] = m ? static_cast<int>(*m) : -1;
        }
    }
    return table;
}

void validate_group_structure(const StabilizerGroup& group, double tol) {
    require_dims_match(group);
    for (std::size_t e = 0; e < group.size(); ++e) {
        for (std::size_t p = 0; p < group.parties(); ++p) {
            const double r = unitarity_residual(group.factor(e, p));
            if (r > tol) {
                throw std::invalid_argument("non-unitary factor at element " + std::to_string(e) +
                                            ", party " + std::to_string(p + 1) + " (residual " +
                                            std::to_string(r) + ")");
            }
        }
    }
    if (!identity_index(group, tol)) {
        throw std::invalid_argument("group lacks the identity element");
    }
    auto table = closure_table(group, tol);
    for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = 0; j < group.size(); ++j) {
            if (table[i][j] < 0) {
                throw std::invalid_argument("closure violation: product of elements " +
                                            std::to_string(i) + " and " + std::to_string(j) +
                                            " is not in the group");
            }
        }
    }
}

StabilizerGroup make_abstract_group(std::vector<Index> party_dims,
                                    std::vector<ProductOperator> elements, double tol) {
    StabilizerGroup group;
    group.party_dims = std::move(party_dims);
    group.mode = GroupMode::Abstract;
    for (auto& op : elements) group.elements.push_back({std::move(op), Complex(1.0, 0.0)});
    validate_group_structure(group, tol);
    return group;
}

StabilizerGroup make_pauli_group(std::size_t n_parties) {
    if (n_parties < 2) throw std::invalid_argument("make_pauli_group: need at least 2 parties");
    std::vector<Index> dims(n_parties, 2);
    std::vector<ProductOperator> elems;
    for (int k = 0; k < 4; ++k) {
        std::vector<LocalOperator> f(n_parties, pauli(k));
        elems.emplace_back(std::move(f));
    }
    return make_abstract_group(std::move(dims), std::move(elems));
}

Index SeedState::total_dim() const {
    Index d = 1;
    for (Index v : party_dims) d *= v;
    return d;
}

SeedState make_seed_state(std::vector<Index> party_dims, Vector amplitudes,
                          StabilizerGroup stabilizer, double tol) {
    SeedState s;
    s.party_dims = std::move(party_dims);
    s.amplitudes = std::move(amplitudes);
    s.stabilizer = std::move(stabilizer);

    if (s.party_dims.size() < 2) throw std::invalid_argument("seed state: need at least 2 parties");
    if (s.amplitudes.size() != s.total_dim()) {
        throw std::invalid_argument("seed state: amplitude vector has wrong length");
    }
    if (std::abs(s.amplitudes.norm() - 1.0) > tol) {
        throw std::invalid_argument("seed state: amplitudes are not unit-norm");
    }
    for (std::size_t p = 0; p < s.party_dims.size(); ++p) {
        Matrix rho = reduced_density(s.amplitudes, s.party_dims, p);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        if (es.eigenvalues().minCoeff() <= 1e-8) {
            throw std::invalid_argument("seed state: reduced state of party " +
                                        std::to_string(p + 1) + " is rank-deficient");
        }
    }
    if (s.stabilizer.party_dims != s.party_dims) {
        throw std::invalid_argument("seed state: stabilizer party dimensions mismatch");
    }
    if (s.stabilizer.mode != GroupMode::Concrete) s.stabilizer.mode = GroupMode::Concrete;
    auto report = verify_stabilizer(s.stabilizer, s, tol);
    if (!report.passed) {
        throw std::invalid_argument("seed state: stabilizer verification failed");
    }
    return s;
}

LocalOperator build_u_gate() {
    const Complex i(0.0, 1.0);
    return matrix_sqrt_principal(i * pauli(2)) * matrix_sqrt_principal(i * pauli(1));
}

namespace {

Vector l_state_amplitudes() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::Vector4cd phi_minus, phi_plus, psi_plus;
    phi_minus << inv_sqrt2, 0, 0, -inv_sqrt2;  // (|00> - |11>)/sqrt(2)
    phi_plus << inv_sqrt2, 0, 0, inv_sqrt2;
    psi_plus << 0, inv_sqrt2, inv_sqrt2, 0;

    auto pair_term = [](const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
        Vector v(16);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) v(i * 4 + j) = a(i) * b(j);
        return v;
    };

    const Complex w = std::exp(Complex(0.0, std::numbers::pi / 3.0));
    Vector amps = pair_term(phi_minus, phi_minus) + w * pair_term(phi_plus, phi_plus) +
                  w * w * pair_term(psi_plus, psi_plus);
    amps /= std::sqrt(3.0);
    return amps;
}

std::vector<ProductOperator> l_symmetry_candidates() {
    const Matrix u = build_u_gate();
    const Matrix u2 = u * u;
    std::vector<Matrix> rotations = {identity(2), u, u2};
    std::vector<ProductOperator> ops;
    for (const Matrix& a : rotations) {
        for (int k = 0; k < 4; ++k) {
            Matrix s = a * pauli(k);
            std::vector<LocalOperator> f(4, s);
            ops.emplace_back(std::move(f));
        }
    }
    return ops;
}

}  // namespace

StabilizerGroup enumerate_l_symmetries() {
    return fit_concrete_group({2, 2, 2, 2}, l_symmetry_candidates(), l_state_amplitudes(), 1e-10);
}

SeedState build_l_state() {
    return make_seed_state({2, 2, 2, 2}, l_state_amplitudes(), enumerate_l_symmetries());
}

SeedState build_ghz_state(std::size_t n_parties) {
    if (n_parties < 2) throw std::invalid_argument("build_ghz_state: need at least 2 parties");
    std::vector<Index> dims(n_parties, 2);
    Index total = Index(1) << n_parties;
    Vector amps = Vector::Zero(total);
    amps(0) = 1.0 / std::sqrt(2.0);
    amps(total - 1) = 1.0 / std::sqrt(2.0);

    std::vector<ProductOperator> candidates;
    for (int k = 0; k < 4; ++k) {
        std::vector<LocalOperator> f(n_parties, pauli(k));
        candidates.emplace_back(std::move(f));
    }
    auto group = fit_concrete_group(dims, std::move(candidates), amps, 1e-10);
    return make_seed_state(std::move(dims), std::move(amps), std::move(group));
}

StabilizerReport verify_stabilizer(const StabilizerGroup& group, const SeedState& state,
                                   double tol) {
    if (group.party_dims != state.party_dims) {
        throw std::invalid_argument("verify_stabilizer: party dimension mismatch");
    }
    require_dims_match(group);
    StabilizerReport report;
    bool all_ok = true;
    for (std::size_t e = 0; e < group.size(); ++e) {
        ElementCheck check;
        for (std::size_t p = 0; p < group.parties(); ++p) {
            check.factor_unitarity.push_back(unitarity_residual(group.factor(e, p)));
            check.unitarity_residual = std::max(check.unitarity_residual, check.factor_unitarity.back());
        }
        Vector mapped = apply_product(group.elements[e].op, state.amplitudes);
        check.stabilization_residual =
            (group.elements[e].phase * mapped - state.amplitudes).norm();
        all_ok = all_ok && check.stabilization_residual < tol && check.unitarity_residual < tol;
        report.elements.push_back(check);
    }
    report.closure = closure_table(group, tol);
    report.closure_ok = true;
    for (const auto& row : report.closure)
        for (int entry : row) report.closure_ok = report.closure_ok && entry >= 0;
    report.passed = all_ok && report.closure_ok && identity_index(group, tol).has_value();
    return report;
}

TrackedState::TrackedState(ProductOperator g, std::shared_ptr<const SeedState> seed, double tol)
    : g_(std::move(g)), seed_(std::move(seed)) {
    if (!seed_) throw std::invalid_argument("tracked state: missing seed");
    if (g_.parties() != seed_->party_dims.size()) {
        throw std::invalid_argument("tracked state: factor count mismatch");
    }
    for (std::size_t p = 0; p < g_.parties(); ++p) {
        LocalOperator& f = g_.factors[p];
        if (f.rows() != seed_->party_dims[p] || f.cols() != seed_->party_dims[p]) {
            throw std::invalid_argument("tracked state: factor dimension mismatch at party " +
                                        std::to_string(p + 1));
        }
        if (!all_finite(f)) {
            throw std::invalid_argument("tracked state: non-finite factor at party " +
                                        std::to_string(p + 1));
        }
        const double scale = f.norm();
        if (scale <= 0.0 || smallest_singular_value(f) <= tol * std::max(1.0, scale)) {
            throw std::invalid_argument("singular factor at party " + std::to_string(p + 1));
        }
        // Canonical form: rescale so tr(g_p^dagger g_p) = 1.
        f /= std::sqrt(f.squaredNorm());
    }
    normalization_ = apply_product(g_, seed_->amplitudes).norm();
    if (!(normalization_ > 0.0)) {
        throw std::invalid_argument("tracked state: vanishing norm");
    }
}

Matrix TrackedState::gram_of(std::size_t party) const {
    return gram(g_.factors[party]);
}

Vector TrackedState::full_vector() const {
    Vector v = apply_product(g_, seed_->amplitudes);
    return v / v.norm();
}

bool same_seed(const TrackedState& a, const TrackedState& b, double tol) {
    if (a.seed() == b.seed()) return true;
    if (a.seed()->party_dims != b.seed()->party_dims) return false;
    return (a.seed()->amplitudes - b.seed()->amplitudes).norm() < tol;
}

}  // namespace loccforge
