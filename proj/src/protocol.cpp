#include "loccforge/protocol.hpp"

#include "loccforge/transform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace loccforge {

namespace {

constexpr double kPruneThreshold = 1e-12;

std::string path_string(const std::vector<std::size_t>& path) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) os << " ";
        os << path[i];
    }
    os << "]";
    return os.str();
}

struct Walker {
    std::span<const Index> dims;
    double tol;
    ProtocolInfo info;

    void validate(const LoccNode& node, std::vector<std::size_t>& path) {
        info.depth = std::max(info.depth, path.size());
        if (node.is_leaf()) {
            ++info.n_leaves;
            return;
        }
        const LoccRound& round = *node.round;
        const std::string where = "round at path " + path_string(path);
        if (round.acting_party >= dims.size()) {
            throw std::runtime_error(where + ": acting party out of range");
        }
        if (round.outcomes.empty()) {
            throw std::runtime_error(where + ": no outcomes");
        }
        const Index d = dims[round.acting_party];
        Matrix povm_sum = Matrix::Zero(d, d);
        for (std::size_t o = 0; o < round.outcomes.size(); ++o) {
            const LoccOutcome& outcome = round.outcomes[o];
            if (outcome.op.rows() != d || outcome.op.cols() != d || !all_finite(outcome.op)) {
                throw std::runtime_error(where + ": outcome " + std::to_string(o) +
                                         " operator has wrong shape");
            }
            povm_sum += outcome.op.adjoint() * outcome.op;
            for (const auto& [party, u] : outcome.corrections) {
                if (party == round.acting_party || party >= dims.size()) {
                    throw std::runtime_error(where + ": correction party index invalid");
                }
                if (u.rows() != dims[party] || u.cols() != dims[party]) {
                    throw std::runtime_error(where + ": correction dimension mismatch at party " +
                                             std::to_string(party + 1));
                }
                if (unitarity_residual(u) > tol) {
                    throw std::runtime_error(where + ": correction at party " +
                                             std::to_string(party + 1) + " is not unitary");
                }
            }
            if (!outcome.child) {
                throw std::runtime_error(where + ": missing child node");
            }
        }
        const double completeness = (povm_sum - identity(d)).norm();
        if (completeness > tol) {
            throw std::runtime_error(where + ": completeness residual " +
                                     std::to_string(completeness));
        }
        bool all_proportional = true;
        for (std::size_t a = 0; a + 1 < round.outcomes.size() && all_proportional; ++a) {
            for (std::size_t b = a + 1; b < round.outcomes.size() && all_proportional; ++b) {
                if (!proportional(round.outcomes[b].op, round.outcomes[a].op, 1e-9)) {
                    all_proportional = false;
                }
            }
        }
        if (all_proportional) info.trivial_rounds.push_back(path_string(path));
        ++info.n_rounds;
        for (std::size_t o = 0; o < round.outcomes.size(); ++o) {
            path.push_back(o);
            validate(*round.outcomes[o].child, path);
            path.pop_back();
        }
    }
};

// Applies one outcome to the tracked factors and returns the raw updated
// operator together with the branch probability (exact norm ratio).
std::pair<ProductOperator, double> outcome_update(const TrackedState& state,
                                                  const LoccRound& round,
                                                  const LoccOutcome& outcome) {
    ProductOperator g = state.op();
    g.factors[round.acting_party] = outcome.op * g.factors[round.acting_party];
    for (const auto& [party, u] : outcome.corrections) {
        g.factors[party] = u * g.factors[party];
    }
    const double norm = apply_product(g, state.seed()->amplitudes).norm();
    const double ratio = norm / state.normalization();
    return {std::move(g), ratio * ratio};
}

}  // namespace

LoccNodePtr LoccNode::leaf() { return std::make_shared<LoccNode>(); }

LoccNodePtr LoccNode::make(LoccRound r) {
    auto node = std::make_shared<LoccNode>();
    node->round = std::move(r);
    return node;
}

ProtocolInfo validate_protocol(const LoccNode& root, std::span<const Index> party_dims,
                               double tol) {
    Walker walker{party_dims, tol, {}};
    std::vector<std::size_t> path;
    walker.validate(root, path);
    return walker.info;
}

double SimulationResult::probability_sum() const {
    double sum = 0.0;
    for (const auto& leaf : leaves) sum += leaf.probability;
    return sum;
}

SimulationResult simulate(const LoccNode& protocol, const TrackedState& initial, double tol) {
    validate_protocol(protocol, initial.seed()->party_dims, tol);
    SimulationResult result;

    std::vector<std::size_t> path;
    auto walk = [&](auto&& self, const LoccNode& node, const TrackedState& state,
                    double probability) -> void {
        if (node.is_leaf()) {
            result.leaves.push_back({state, probability, path});
            return;
        }
        const LoccRound& round = *node.round;
        for (std::size_t o = 0; o < round.outcomes.size(); ++o) {
            auto [g, p_rel] = outcome_update(state, round, round.outcomes[o]);
            const double p_abs = probability * p_rel;
            path.push_back(o);
            if (p_rel < kPruneThreshold) {
                result.pruned.push_back({path, p_abs});
                path.pop_back();
                continue;
            }
            TrackedState child = [&]() {
                try {
                    return TrackedState(std::move(g), state.seed(), tol);
                } catch (const std::exception& err) {
                    throw std::runtime_error("branch " + path_string(path) + ": " + err.what());
                }
            }();
            self(self, *round.outcomes[o].child, child, p_abs);
            path.pop_back();
        }
    };
    walk(walk, protocol, initial, 1.0);

    double total = result.probability_sum();
    for (const auto& pruned : result.pruned) total += pruned.probability;
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("simulation probability leak: total " + std::to_string(total));
    }
    return result;
}

std::string to_string(DeterminismClass c) {
    switch (c) {
        case DeterminismClass::AllDeterministic: return "all-deterministic";
        case DeterminismClass::DeterministicWithProbabilisticSteps:
            return "deterministic-with-probabilistic-steps";
        case DeterminismClass::Nondeterministic: return "nondeterministic";
    }
    return "unknown";
}

DeterminismClass classify_protocol(const LoccNode& protocol, const TrackedState& initial,
                                   const StabilizerGroup& group, double tol) {
    validate_protocol(protocol, initial.seed()->party_dims, tol);
    Tolerances tols;
    tols.eq = tol;

    bool rounds_deterministic = true;
    std::vector<TrackedState> leaves;

    auto walk = [&](auto&& self, const LoccNode& node, const TrackedState& state) -> void {
        if (node.is_leaf()) {
            leaves.push_back(state);
            return;
        }
        const LoccRound& round = *node.round;
        std::vector<std::pair<TrackedState, const LoccNode*>> children;
        for (const auto& outcome : round.outcomes) {
            auto [g, p_rel] = outcome_update(state, round, outcome);
            if (p_rel < kPruneThreshold) continue;
            children.emplace_back(TrackedState(std::move(g), state.seed(), tol),
                                  outcome.child.get());
        }
        for (std::size_t a = 0; a + 1 < children.size() && rounds_deterministic; ++a) {
            for (std::size_t b = a + 1; b < children.size() && rounds_deterministic; ++b) {
                if (!lu_equivalent(children[a].first, children[b].first, group, tols)) {
                    rounds_deterministic = false;
                }
            }
        }
        for (auto& [child_state, child_node] : children) self(self, *child_node, child_state);
    };
    walk(walk, protocol, initial);

    if (rounds_deterministic) return DeterminismClass::AllDeterministic;
    for (std::size_t a = 0; a + 1 < leaves.size(); ++a) {
        for (std::size_t b = a + 1; b < leaves.size(); ++b) {
            if (!lu_equivalent(leaves[a], leaves[b], group, tols)) {
                return DeterminismClass::Nondeterministic;
            }
        }
    }
    return DeterminismClass::DeterministicWithProbabilisticSteps;
}

DeterminismCheck verify_deterministic(const SimulationResult& result, const TrackedState& target,
                                      const StabilizerGroup& group, double tol) {
    Tolerances tols;
    tols.eq = tol;
    DeterminismCheck check;
    check.passed = true;
    for (const auto& leaf : result.leaves) {
        auto witness = lu_equivalent(leaf.state, target, group, tols);
        if (witness) {
            check.witnesses.push_back({witness->symmetry_index, witness->residual});
        } else {
            check.witnesses.push_back({std::nullopt, 0.0});
            check.passed = false;
        }
    }
    return check;
}

StepExample build_probabilistic_step_example(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("x must be positive: zero makes the transformation trivial");
    }
    const double h1_norm = 2.0 * x * std::sqrt(3.0);
    if (h1_norm >= 0.5) {
        std::ostringstream os;
        os << "Bloch norm >= 1/2 for h_1: 2(x,x,x) has norm " << h1_norm << ", require x < "
           << 0.5 / (2.0 * std::sqrt(3.0));
        throw std::domain_error(os.str());
    }

    const LocalOperator g1 = bloch_to_operator({x, x, 2.0 * x});
    const LocalOperator g2 = bloch_to_operator({x, -x, 0.0});
    const LocalOperator h1 = bloch_to_operator({2.0 * x, 2.0 * x, 2.0 * x});
    const LocalOperator h2 = bloch_to_operator({x, x, -2.0 * x});
    const LocalOperator trivial = identity(2) / std::sqrt(2.0);

    auto seed = std::make_shared<const SeedState>(build_l_state());
    TrackedState initial(ProductOperator({g1, g2, trivial, trivial}), seed);
    TrackedState target(ProductOperator({h1, h2, trivial, trivial}), seed);

    const Matrix u = build_u_gate();
    const Matrix u2 = u * u;
    const Matrix s3 = pauli(3);
    const Matrix g1_inv = g1.inverse();
    const Matrix g2_inv = g2.inverse();

    // First branch: party 2 finishes with {1, U^2}-type outcomes.
    LoccRound first_branch;
    first_branch.acting_party = 1;
    first_branch.outcomes.push_back({std::sqrt(1.0 / 3.0) * h2 * g2_inv, {}, LoccNode::leaf()});
    first_branch.outcomes.push_back({std::sqrt(2.0 / 3.0) * h2 * u2 * g2_inv,
                                     {{0, u2}, {2, u2}, {3, u2}},
                                     LoccNode::leaf()});

    // Second branch: party 2 finishes with {sigma_3, U sigma_3}-type outcomes.
    LoccRound second_branch;
    second_branch.acting_party = 1;
    second_branch.outcomes.push_back(
        {std::sqrt(1.0 / 3.0) * h2 * s3 * g2_inv, {{2, s3}, {3, s3}}, LoccNode::leaf()});
    second_branch.outcomes.push_back({std::sqrt(2.0 / 3.0) * h2 * u * s3 * g2_inv,
                                      {{0, u}, {2, u * s3}, {3, u * s3}},
                                      LoccNode::leaf()});

    // Opening round: party 1 splits into two intermediates that are not
    // LU-equivalent; this is the unavoidable probabilistic step.
    LoccRound opening;
    opening.acting_party = 0;
    opening.outcomes.push_back(
        {std::sqrt(3.0 / 4.0) * h1 * g1_inv, {}, LoccNode::make(std::move(first_branch))});
    opening.outcomes.push_back(
        {std::sqrt(1.0 / 4.0) * h1 * s3 * g1_inv, {}, LoccNode::make(std::move(second_branch))});

    StepExample example{seed, std::move(initial), std::move(target), {}};
    example.protocol.round = std::move(opening);
    return example;
}

}  // namespace loccforge
