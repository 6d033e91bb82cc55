// seed_states.hpp — SLOCC-class representatives with finite unitary
// stabilizers: the built-in 4-qubit L state, GHZ states, abstract symmetry
// groups, and states tracked through their product operators.

#pragma once

#include "loccforge/linalg.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace loccforge {

enum class GroupMode { Concrete, Abstract };

// One symmetry S = S^(1) (x) ... (x) S^(n) together with the unit scalar
// phi satisfying phi * S |seed> = |seed| in concrete mode (phi = 1 in
// abstract mode).
struct StabilizerElement {
    ProductOperator op;
    Complex phase{1.0, 0.0};
};

struct StabilizerGroup {
    std::vector<Index> party_dims;
    std::vector<StabilizerElement> elements;
    GroupMode mode = GroupMode::Abstract;

    std::size_t size() const { return elements.size(); }
    std::size_t parties() const { return party_dims.size(); }
    const LocalOperator& factor(std::size_t element, std::size_t party) const {
        return elements[element].op.factors[party];
    }
};

/// Index of the element matching `op` up to a global unit scalar, if any.
std::optional<std::size_t> match_element(const StabilizerGroup& group,
                                         const ProductOperator& op,
                                         double tol = 1e-9);

/// Index of the identity element, if present.
std::optional<std::size_t> identity_index(const StabilizerGroup& group, double tol = 1e-9);

/// closure[i][j] = index of the element proportional to elements[i]*elements[j],
/// or -1 when the product falls outside the group.
std::vector<std::vector<int>> closure_table(const StabilizerGroup& group, double tol = 1e-9);

/// Verifies per-factor unitarity, presence of the identity, and closure up
/// to phase; throws naming the offending element or pair.
void validate_group_structure(const StabilizerGroup& group, double tol = 1e-9);

/// Builds a group with no attached state. Runs validate_group_structure.
StabilizerGroup make_abstract_group(std::vector<Index> party_dims,
                                    std::vector<ProductOperator> elements,
                                    double tol = 1e-9);

/// The abstract group {sigma_i^(x n)} for i = 0..3.
StabilizerGroup make_pauli_group(std::size_t n_parties);

struct SeedState {
    std::vector<Index> party_dims;
    Vector amplitudes;           // unit norm, party-major basis ordering
    StabilizerGroup stabilizer;  // concrete mode

    Index total_dim() const;
};

/// Validates and assembles a seed state: unit norm, full single-party ranks
/// (smallest reduced eigenvalue > 1e-8), and phase-correct stabilization by
/// every group element.
SeedState make_seed_state(std::vector<Index> party_dims, Vector amplitudes,
                          StabilizerGroup stabilizer, double tol = 1e-9);

/// U = sqrt(i sigma_y) sqrt(i sigma_x): unitary, cubes to -1, and conjugation
/// cyclically permutes the Bloch axes (rotation about (1,1,1)/sqrt(3)).
LocalOperator build_u_gate();

/// The 12 product symmetries s^(x 4) for s in {1, U, U^2} * {sigma_i}, each
/// with the numerically fitted phase stabilizing the L state. Throws
/// "symmetry verification failed" if any candidate misses the 1e-10 residual.
StabilizerGroup enumerate_l_symmetries();

/// The 4-qubit state (|phi-phi-> + w |phi+phi+> + w^2 |psi+psi+>)/sqrt(3)
/// with w = exp(i pi/3), carrying the 12-element stabilizer above.
SeedState build_l_state();

/// (|0...0> + |1...1>)/sqrt(2) carrying the {sigma_i^(x n)} stabilizer.
SeedState build_ghz_state(std::size_t n_parties);

struct ElementCheck {
    double stabilization_residual = 0.0;     // || phase * S |seed> - |seed> ||
    std::vector<double> factor_unitarity;    // one residual per party
    double unitarity_residual = 0.0;         // worst factor
};

struct StabilizerReport {
    std::vector<ElementCheck> elements;
    std::vector<std::vector<int>> closure;
    bool closure_ok = false;
    bool passed = false;
};

StabilizerReport verify_stabilizer(const StabilizerGroup& group, const SeedState& state,
                                   double tol = 1e-9);

// A pure state in the class of `seed`, stored as the product operator g with
// g|seed> / ||g|seed>|| the represented state. Construction canonicalizes
// every factor to a trace-one Gram and records the resulting norm.
class TrackedState {
  public:
    TrackedState(ProductOperator g, std::shared_ptr<const SeedState> seed, double tol = 1e-9);

    const ProductOperator& op() const { return g_; }
    const std::shared_ptr<const SeedState>& seed() const { return seed_; }
    double normalization() const { return normalization_; }
    std::size_t parties() const { return g_.parties(); }

    /// Trace-one Gram operator of the given party's factor.
    Matrix gram_of(std::size_t party) const;

    /// Unit-norm amplitude vector of the represented state.
    Vector full_vector() const;

  private:
    ProductOperator g_;
    std::shared_ptr<const SeedState> seed_;
    double normalization_ = 0.0;
};

/// True when both tracked states refer to the same seed (same object or
/// equal amplitudes within tol).
bool same_seed(const TrackedState& a, const TrackedState& b, double tol = 1e-9);

}  // namespace loccforge
