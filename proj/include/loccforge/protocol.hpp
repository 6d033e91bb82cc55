// protocol.hpp — finite LOCC protocol trees: per-round POVM validation,
// branch-by-branch simulation on tracked states, determinism classification,
// and the built-in two-round example that requires a probabilistic step.

#pragma once

#include "loccforge/seed_states.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace loccforge {

struct LoccNode;
using LoccNodePtr = std::shared_ptr<const LoccNode>;

// One measurement outcome: the acting party's operator, local-unitary
// corrections for the other parties (absent entries mean identity), and the
// subtree that follows.
struct LoccOutcome {
    LocalOperator op;
    std::map<std::size_t, LocalOperator> corrections;
    LoccNodePtr child;
};

struct LoccRound {
    std::size_t acting_party = 0;  // 0-based
    std::vector<LoccOutcome> outcomes;
};

struct LoccNode {
    std::optional<LoccRound> round;  // nullopt -> leaf

    bool is_leaf() const { return !round.has_value(); }
    static LoccNodePtr leaf();
    static LoccNodePtr make(LoccRound r);
};

struct ProtocolInfo {
    std::size_t n_rounds = 0;
    std::size_t n_leaves = 0;
    std::size_t depth = 0;
    std::vector<std::string> trivial_rounds;  // paths of rounds whose outcomes are all proportional
};

/// Checks POVM completeness and unitary corrections at every round; throws
/// naming the offending round path. Rounds whose outcome operators are all
/// pairwise proportional are flagged, not rejected.
ProtocolInfo validate_protocol(const LoccNode& root, std::span<const Index> party_dims,
                               double tol = 1e-9);

struct SimLeaf {
    TrackedState state;
    double probability = 0.0;
    std::vector<std::size_t> path;  // outcome indices from the root
};

struct PrunedBranch {
    std::vector<std::size_t> path;
    double probability = 0.0;
};

struct SimulationResult {
    std::vector<SimLeaf> leaves;
    std::vector<PrunedBranch> pruned;  // probability below the pruning cutoff

    double probability_sum() const;
};

/// Depth-first evaluation. Outcome probabilities are exact norm ratios of the
/// updated tracked state, so they match direct state-vector evolution.
/// Branches below probability 1e-12 are pruned and reported.
SimulationResult simulate(const LoccNode& protocol, const TrackedState& initial,
                          double tol = 1e-9);

enum class DeterminismClass {
    AllDeterministic,
    DeterministicWithProbabilisticSteps,
    Nondeterministic,
};

std::string to_string(DeterminismClass c);

/// All-deterministic iff at every round reached from `initial` the outcome
/// states are pairwise LU-equivalent; otherwise deterministic-with-
/// probabilistic-steps when all final leaves still agree on one ray.
DeterminismClass classify_protocol(const LoccNode& protocol, const TrackedState& initial,
                                   const StabilizerGroup& group, double tol = 1e-9);

struct LeafWitness {
    std::optional<std::size_t> symmetry_index;
    double residual = 0.0;
};

struct DeterminismCheck {
    bool passed = false;
    std::vector<LeafWitness> witnesses;  // one per simulation leaf
};

/// True iff every leaf of `result` is LU-equivalent to `target`; the witness
/// table records the certifying symmetry per leaf.
DeterminismCheck verify_deterministic(const SimulationResult& result, const TrackedState& target,
                                      const StabilizerGroup& group, double tol = 1e-9);

// The built-in 4-qubit transformation on the L-state class that no
// all-deterministic protocol can realize: party 1 measures a genuine
// two-outcome POVM, then party 2 finishes each branch deterministically.
struct StepExample {
    std::shared_ptr<const SeedState> seed;
    TrackedState initial;
    TrackedState target;
    LoccNode protocol;
};

/// Bloch data: initial {(x,x,2x),(x,-x,0)}, target {2(x,x,x),(x,x,-2x)},
/// parties 3 and 4 trivial. Valid for 0 < x < 1/(4 sqrt(3)).
StepExample build_probabilistic_step_example(double x);

}  // namespace loccforge
