// transform.hpp — decision procedures over finite stabilizers: reachability
// of a target under finite-round LOCC, single-round convertibility with an
// acting party, LU-equivalence of tracked states, and the constructions
// turning certificates into explicit protocols.

#pragma once

#include "loccforge/protocol.hpp"
#include "loccforge/seed_states.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace loccforge {

// Witness that a target Gram pattern admits a nontrivial last measurement
// round: the certified symmetry commutes with every Gram except the
// distinguished party's.
struct ReachabilityCertificate {
    std::size_t symmetry_index = 0;
    std::size_t distinguished_party = 0;
    std::vector<double> commuting_residuals;  // per-party commutator norms
};

/// Scans all group elements and all choices of distinguished party; returns
/// the first certificate with [H_i, S^(i)] = 0 for i != j (residual < tol.eq)
/// and [H_j, S^(j)] robustly nonzero (residual >= tol.nz), or empty. The scan
/// is exhaustive over the finite group, hence a decision procedure.
std::optional<ReachabilityCertificate> is_reachable(const ProductOperator& h,
                                                    const StabilizerGroup& group,
                                                    const Tolerances& tol = {});

struct ReachingConstruction {
    ProductOperator source;                   // canonical trace-one Grams
    ProductOperator target;                   // canonicalized copy of h
    LoccNode protocol;                        // one two-outcome round
    std::optional<TrackedState> source_state; // present when a seed is supplied
};

/// Builds the source state and the one-round protocol mapping it onto the
/// target: the distinguished party's Gram is mixed as p H + (1-p) S^dag H S
/// and the two measurement operators are sqrt(p) h g^-1 and
/// sqrt(1-p) h S g^-1 with unitary corrections elsewhere.
ReachingConstruction construct_reaching_protocol(const ProductOperator& h,
                                                 const ReachabilityCertificate& cert, double p,
                                                 const StabilizerGroup& group,
                                                 std::shared_ptr<const SeedState> seed = nullptr,
                                                 const Tolerances& tol = {});

// Witness that one deterministic round by `acting_party` converts the state:
// G_j = sum_i p_i (S_i^(j))^dag H S_i^(j) with H positive definite and not a
// symmetry conjugate of G_j.
struct ConvertibilityCertificate {
    std::vector<std::size_t> symmetry_indices;
    std::vector<double> probabilities;
    LocalOperator target_gram;  // H, Hermitian positive definite, trace 1
    std::size_t acting_party = 0;
    double gram_residual = 0.0;          // || G_j - sum p_i S^dag H S ||_F
    double nontriviality_margin = 0.0;   // min_S || H - S G_j S^dag ||_F over admissible S
};

struct ConvertibilitySearchConfig {
    double grid_step = 0.05;     // probability-simplex grid resolution
    std::size_t max_subset = 4;  // largest symmetry subset tried by the general search
    std::size_t n_random = 1000; // Dirichlet-random probability vectors per subset
    std::uint64_t rng_seed = 0;
    Tolerances tol{};
};

struct ConvertibilityResult {
    std::optional<ConvertibilityCertificate> certificate;
    // True when the emptiness (or the certificate) is a decision, not a
    // search exhaustion: always for qubit acting parties, and whenever
    // fewer than two admissible symmetries exist.
    bool exact = false;
    std::vector<std::size_t> admissible;  // indices of symmetries passing condition (i)
};

/// Step 1: filter symmetries commuting with every spectator Gram. Step 2:
/// fewer than two admissible (or none acting nontrivially on a qubit party)
/// decides emptiness. Step 3: feasibility search for (p, H). For qubit
/// acting parties the Bloch-space system g = (sum p_i R_i) h is solved in
/// closed form, making the outcome exact; otherwise a simplex-grid plus
/// Dirichlet-random search runs and emptiness means "not found".
ConvertibilityResult is_convertible(const ProductOperator& g, const StabilizerGroup& group,
                                    std::size_t acting_party,
                                    const ConvertibilitySearchConfig& cfg = {});

/// Single deterministic round realizing a convertibility certificate:
/// A_i = sqrt(p_i) h S_i^(j) g_j^-1 with corrections U_i^(k) = g_k S_i^(k) g_k^-1.
LoccNode build_convertibility_round(const ProductOperator& g,
                                    const ConvertibilityCertificate& cert,
                                    const StabilizerGroup& group, const Tolerances& tol = {});

struct LuWitness {
    std::size_t symmetry_index = 0;
    double residual = 0.0;
};

/// Searches the finite group for S with G_i = (S^(i))^dag H_i S^(i) for all
/// parties, certifying that the two tracked states are local-unitary
/// equivalent. Throws if the states refer to different seeds.
std::optional<LuWitness> lu_equivalent(const TrackedState& a, const TrackedState& b,
                                       const StabilizerGroup& group, const Tolerances& tol = {});

}  // namespace loccforge
