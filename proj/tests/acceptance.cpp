// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances and runtime budget in code.

#include "loccforge/protocol.hpp"
#include "loccforge/sampler.hpp"
#include "loccforge/transform.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace loccforge;

namespace {

struct Checker {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

int failures = 0;

void run_criterion(int id, const std::string& name, double budget_seconds,
                   const std::function<void(Checker&)>& body) {
    Checker check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& err) {
        check.require(false, std::string("exception: ") + err.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(seconds < budget_seconds,
                  "runtime " + std::to_string(seconds) + "s exceeds " +
                      std::to_string(budget_seconds) + "s");
    if (!check.ok) ++failures;
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", check.ok ? "PASS" : "FAIL", id,
                name.c_str(), seconds, check.ok ? "" : " — ", check.detail.str().c_str());
    std::fflush(stdout);
}

// Independent direct-evolution oracle for criterion 6.
struct DirectLeaf {
    Vector vec;
    double probability;
};

void direct_evolve(const LoccNode& node, const Vector& state, const std::vector<Index>& dims,
                   double probability, std::vector<DirectLeaf>& out) {
    if (node.is_leaf()) {
        out.push_back({state, probability});
        return;
    }
    for (const auto& outcome : node.round->outcomes) {
        std::vector<LocalOperator> ops;
        for (std::size_t p = 0; p < dims.size(); ++p) {
            if (p == node.round->acting_party) {
                ops.push_back(outcome.op);
            } else if (auto it = outcome.corrections.find(p); it != outcome.corrections.end()) {
                ops.push_back(it->second);
            } else {
                ops.push_back(identity(dims[p]));
            }
        }
        Vector next = tensor_product(std::span<const LocalOperator>(ops)) * state;
        const double p_rel = next.squaredNorm() / state.squaredNorm();
        if (p_rel < 1e-12) continue;
        direct_evolve(*outcome.child, next, dims, probability * p_rel, out);
    }
}

std::vector<Matrix> random_povm(Index d, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(m * d, d);
    for (Index i = 0; i < z.rows(); ++i)
        for (Index j = 0; j < z.cols(); ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(m * d, d);
    std::vector<Matrix> ops;
    for (int i = 0; i < m; ++i) ops.push_back(q.block(i * d, 0, d, d));
    return ops;
}

LoccNodePtr random_protocol(std::size_t n_parties, int depth, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (depth <= 0 || (depth < 3 && coin(rng) < 0.3)) return LoccNode::leaf();
    LoccRound round;
    round.acting_party = std::uniform_int_distribution<std::size_t>(0, n_parties - 1)(rng);
    const int m = 2 + (coin(rng) < 0.4 ? 1 : 0);
    auto povm = random_povm(2, m, rng);
    for (auto& op : povm) {
        LoccOutcome outcome;
        outcome.op = std::move(op);
        for (std::size_t p = 0; p < n_parties; ++p) {
            if (p == round.acting_party) continue;
            if (coin(rng) < 0.5) outcome.corrections[p] = random_unitary(2, rng);
        }
        outcome.child = random_protocol(n_parties, depth - 1, rng);
        round.outcomes.push_back(std::move(outcome));
    }
    return LoccNode::make(std::move(round));
}

}  // namespace

int main() {
    const auto l_seed = std::make_shared<const SeedState>(build_l_state());
    const StabilizerGroup& l_group = l_seed->stabilizer;

    // 1. All 12 L symmetries stabilize with residual < 1e-10 under fitted
    //    phases; closure holds for all 144 pairs.
    run_criterion(1, "L-state stabilizer verification", 1.0, [&](Checker& check) {
        StabilizerGroup group = enumerate_l_symmetries();
        check.require(group.size() == 12, "expected 12 elements");
        for (std::size_t e = 0; e < group.size(); ++e) {
            Vector mapped = group.elements[e].phase *
                            apply_product(group.elements[e].op, l_seed->amplitudes);
            const double residual = (mapped - l_seed->amplitudes).norm();
            check.require(residual < 1e-10,
                          "element " + std::to_string(e) + " residual " + std::to_string(residual));
        }
        auto table = closure_table(group);
        std::size_t matched = 0;
        for (const auto& row : table)
            for (int entry : row) matched += entry >= 0 ? 1 : 0;
        check.require(matched == 144, "closure pairs matched: " + std::to_string(matched));
    });

    // 2. The probabilistic-step example end to end at x = 0.05.
    run_criterion(2, "probabilistic-step example end-to-end (x = 0.05)", 1.0,
                  [&](Checker& check) {
        StepExample example = build_probabilistic_step_example(0.05);

        for (std::size_t j = 0; j < 4; ++j) {
            auto result = is_convertible(example.initial.op(), l_group, j);
            check.require(!result.certificate.has_value() && result.exact,
                          "initial state convertible via party " + std::to_string(j + 1));
        }

        Matrix povm_sum = Matrix::Zero(2, 2);
        for (const auto& outcome : example.protocol.round->outcomes) {
            povm_sum += outcome.op.adjoint() * outcome.op;
        }
        const double completeness = (povm_sum - identity(2)).norm();
        check.require(completeness < 1e-12,
                      "opening completeness residual " + std::to_string(completeness));

        SimulationResult sim = simulate(example.protocol, example.initial);
        check.require(sim.leaves.size() == 4,
                      "leaf count " + std::to_string(sim.leaves.size()));
        check.require(std::abs(sim.probability_sum() - 1.0) < 1e-9, "probability sum");

        DeterminismCheck target_check = verify_deterministic(sim, example.target, l_group);
        check.require(target_check.passed, "leaf not LU-equivalent to the target");
        for (const auto& witness : target_check.witnesses) {
            check.require(witness.symmetry_index.has_value(), "missing symmetry witness");
        }

        check.require(classify_protocol(example.protocol, example.initial, l_group) ==
                          DeterminismClass::DeterministicWithProbabilisticSteps,
                      "determinism class");
    });

    // 3. Constructive reachability round-trip on 100 seeded-random targets.
    run_criterion(3, "reachability construction round-trip (100 targets)", 10.0,
                  [&](Checker& check) {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> weight(0.1, 0.9);
        for (int trial = 0; trial < 100; ++trial) {
            ProductOperator h = sample_reachable_product_operator(l_group, rng);
            auto cert = is_reachable(h, l_group);
            check.require(cert.has_value(), "constructed target not recognized as reachable");
            if (!cert) continue;
            const double p = weight(rng);
            auto construction = construct_reaching_protocol(h, *cert, p, l_group, l_seed);
            SimulationResult sim = simulate(construction.protocol, *construction.source_state);
            check.require(std::abs(sim.probability_sum() - 1.0) < 1e-9, "probability sum");
            TrackedState target(h, l_seed);
            for (const auto& leaf : sim.leaves) {
                check.require(lu_equivalent(leaf.state, target, l_group).has_value(),
                              "leaf missed the target at trial " + std::to_string(trial));
            }
        }
    });

    // 4. Convertibility certificates produce sound single rounds on 100
    //    seeded-random instances of the Pauli product class (n = 4).
    run_criterion(4, "single-round convertibility soundness (100 instances)", 10.0,
                  [&](Checker& check) {
        const auto ghz = std::make_shared<const SeedState>(build_ghz_state(4));
        const StabilizerGroup pauli_group = make_pauli_group(4);
        std::mt19937_64 rng(4096);
        std::uniform_real_distribution<double> diag(0.15, 0.85);
        std::normal_distribution<double> gauss(0.0, 1.0);

        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t j = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
            std::vector<LocalOperator> factors(4);
            for (std::size_t p = 0; p < 4; ++p) {
                if (p == j) {
                    Matrix z(2, 2);
                    for (Index r = 0; r < 2; ++r)
                        for (Index c = 0; c < 2; ++c) z(r, c) = Complex(gauss(rng), gauss(rng));
                    factors[p] = z;
                } else {
                    // diagonal Gram: commutes with the sigma_3 symmetry factor
                    Matrix d = Matrix::Zero(2, 2);
                    const double a = diag(rng);
                    d(0, 0) = std::sqrt(a);
                    d(1, 1) = std::sqrt(1.0 - a);
                    factors[p] = random_unitary(2, rng) * d;
                }
            }
            ProductOperator g(std::move(factors));

            auto result = is_convertible(g, pauli_group, j);
            check.require(result.certificate.has_value() && result.exact,
                          "no certificate at trial " + std::to_string(trial));
            if (!result.certificate) continue;
            const auto& cert = *result.certificate;

            LoccNode round = build_convertibility_round(g, cert, pauli_group);
            Matrix povm_sum = Matrix::Zero(2, 2);
            for (const auto& outcome : round.round->outcomes) {
                povm_sum += outcome.op.adjoint() * outcome.op;
            }
            check.require((povm_sum - identity(2)).norm() < 1e-10, "completeness residual");

            TrackedState initial(g, ghz);
            SimulationResult sim = simulate(round, initial);
            check.require(std::abs(sim.probability_sum() - 1.0) < 1e-9, "probability sum");

            ProductOperator target_op = initial.op();
            target_op.factors[j] = matrix_sqrt_psd(cert.target_gram);
            TrackedState target(target_op, ghz);
            for (const auto& leaf : sim.leaves) {
                check.require(lu_equivalent(leaf.state, target, ghz->stabilizer).has_value(),
                              "leaf missed the predicted target at trial " +
                                  std::to_string(trial));
            }
            check.require(classify_protocol(round, initial, ghz->stabilizer) ==
                              DeterminismClass::AllDeterministic,
                          "round not all-deterministic at trial " + std::to_string(trial));
        }
    });

    // 5. Monte Carlo evidence: generic operators are never reachable or
    //    convertible on the L class; the positive control always is.
    run_criterion(5, "measure-zero evidence (1000 Ginibre samples)", 30.0, [&](Checker& check) {
        SampleConfig cfg;
        cfg.n_samples = 1000;
        cfg.rng_seed = 99;
        cfg.tol.nz = 1e-6;
        FractionReport reach = reachable_fraction(l_group, cfg);
        check.require(reach.fraction == 0.0,
                      "reachable fraction " + std::to_string(reach.fraction));
        for (std::size_t j = 0; j < 4; ++j) {
            FractionReport conv = convertible_fraction(l_group, cfg, j);
            check.require(conv.fraction == 0.0,
                          "convertible fraction " + std::to_string(conv.fraction) + " at party " +
                              std::to_string(j + 1));
        }
        SampleConfig control = cfg;
        control.construct_reachable = true;
        FractionReport positive = reachable_fraction(l_group, control);
        check.require(positive.fraction == 1.0,
                      "positive control fraction " + std::to_string(positive.fraction));
    });

    // 6. Tracked-form simulation matches direct state-vector evolution on 50
    //    random protocols of depth <= 3.
    run_criterion(6, "tracked vs direct-evolution oracle (50 protocols)", 30.0,
                  [&](Checker& check) {
        std::mt19937_64 rng(606);
        for (int trial = 0; trial < 50; ++trial) {
            LoccNodePtr protocol = random_protocol(4, 3, rng);
            TrackedState initial(sample_product_operator(l_seed->party_dims, rng), l_seed);
            SimulationResult sim = simulate(*protocol, initial);
            std::vector<DirectLeaf> direct;
            direct_evolve(*protocol, initial.full_vector(), l_seed->party_dims, 1.0, direct);
            check.require(direct.size() == sim.leaves.size(),
                          "leaf count mismatch at trial " + std::to_string(trial));
            if (direct.size() != sim.leaves.size()) continue;
            for (std::size_t i = 0; i < direct.size(); ++i) {
                check.require(std::abs(direct[i].probability - sim.leaves[i].probability) < 1e-10,
                              "probability mismatch at trial " + std::to_string(trial));
                Vector v = direct[i].vec / direct[i].vec.norm();
                const double fidelity =
                    std::abs(Complex(v.dot(sim.leaves[i].state.full_vector())));
                check.require(fidelity >= 1.0 - 1e-9,
                              "fidelity " + std::to_string(fidelity) + " at trial " +
                                  std::to_string(trial));
            }
        }
    });

    // 7. Decision outputs are invariant under factor rescaling and left
    //    unitaries, 50 trials each.
    run_criterion(7, "invariance of decisions under gauge changes (50 trials)", 30.0,
                  [&](Checker& check) {
        std::mt19937_64 rng(707);
        std::uniform_real_distribution<double> mag(0.2, 5.0);
        std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);

        for (int trial = 0; trial < 50; ++trial) {
            ProductOperator h = (trial % 2 == 0)
                                    ? sample_product_operator(l_seed->party_dims, rng)
                                    : sample_reachable_product_operator(l_group, rng);
            ProductOperator g2 = sample_product_operator(l_seed->party_dims, rng);

            auto base_reach = is_reachable(h, l_group);
            const std::size_t conv_party =
                std::uniform_int_distribution<std::size_t>(0, 3)(rng);
            auto base_conv = is_convertible(h, l_group, conv_party);
            TrackedState tracked_h(h, l_seed), tracked_g(g2, l_seed);
            auto base_lu = lu_equivalent(tracked_h, tracked_g, l_group);

            ProductOperator scaled = h;
            ProductOperator rotated = h;
            ProductOperator scaled_g = g2;
            ProductOperator rotated_g = g2;
            for (std::size_t p = 0; p < 4; ++p) {
                const Complex c(mag(rng) * std::cos(angle(rng)), mag(rng) * std::sin(angle(rng)));
                scaled.factors[p] *= c;
                scaled_g.factors[p] *= Complex(mag(rng), 0.0);
                const Matrix u = random_unitary(2, rng);
                rotated.factors[p] = u * rotated.factors[p];
                rotated_g.factors[p] = random_unitary(2, rng) * rotated_g.factors[p];
            }

            const ProductOperator* variants[2] = {&scaled, &rotated};
            const ProductOperator* variants_g[2] = {&scaled_g, &rotated_g};
            for (int v = 0; v < 2; ++v) {
                auto reach = is_reachable(*variants[v], l_group);
                check.require(reach.has_value() == base_reach.has_value(),
                              "reachability flipped at trial " + std::to_string(trial));
                if (reach && base_reach) {
                    check.require(reach->symmetry_index == base_reach->symmetry_index &&
                                      reach->distinguished_party == base_reach->distinguished_party,
                                  "reachability certificate changed at trial " +
                                      std::to_string(trial));
                }
                auto conv = is_convertible(*variants[v], l_group, conv_party);
                check.require(conv.certificate.has_value() == base_conv.certificate.has_value(),
                              "convertibility flipped at trial " + std::to_string(trial));
                check.require(conv.admissible == base_conv.admissible,
                              "admissible set changed at trial " + std::to_string(trial));

                TrackedState dressed_h(*variants[v], l_seed);
                TrackedState dressed_g(*variants_g[v], l_seed);
                auto lu = lu_equivalent(dressed_h, dressed_g, l_group);
                check.require(lu.has_value() == base_lu.has_value(),
                              "lu_equivalent flipped at trial " + std::to_string(trial));
            }
        }
    });

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
