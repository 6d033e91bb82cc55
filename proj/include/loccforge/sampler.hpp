// sampler.hpp — randomized experiments: generic product operators drawn from
// complex Gaussian factors, and Monte Carlo estimates of the fraction of
// reachable / convertible states in a class.

#pragma once

#include "loccforge/seed_states.hpp"
#include "loccforge/transform.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace loccforge {

struct SampleConfig {
    std::size_t n_samples = 1000;
    std::uint64_t rng_seed = 0;
    Tolerances tol{};
    // Positive control: draw operators satisfying the reachability pattern
    // by construction instead of generic ones.
    bool construct_reachable = false;
    // When set, only this party's factor is sampled; the others stay
    // maximally mixed (identity/sqrt(d)).
    std::optional<std::size_t> randomize_only_party;
};

/// One factor per party with independent standard complex Gaussian entries,
/// resampled while the condition number exceeds 1e6 (at most 100 attempts),
/// then rescaled to a trace-one Gram.
ProductOperator sample_product_operator(std::span<const Index> party_dims, std::mt19937_64& rng);

/// Draws an operator that passes the reachability scan by construction:
/// spectator Grams are conjugation-averaged to commute with a chosen
/// nontrivial symmetry while the distinguished party's Gram is generic.
ProductOperator sample_reachable_product_operator(const StabilizerGroup& group,
                                                  std::mt19937_64& rng,
                                                  const Tolerances& tol = {});

// Field names match the emitted JSON report.
struct FractionReport {
    std::size_t n_samples = 0;
    double fraction = 0.0;
    double ci_low = 0.0;   // Wilson 95% interval
    double ci_high = 0.0;
    std::uint64_t rng_seed = 0;
    double tol = 0.0;
    double nz_threshold = 0.0;
};

/// Fraction of sampled operators with a reachability certificate. Per-sample
/// RNG streams are derived from rng_seed and the sample index, so the result
/// does not depend on evaluation order.
FractionReport reachable_fraction(const StabilizerGroup& group, const SampleConfig& cfg);

/// Fraction of sampled operators convertible by a single round of the given
/// acting party.
FractionReport convertible_fraction(const StabilizerGroup& group, const SampleConfig& cfg,
                                    std::size_t acting_party);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fixing).
Matrix random_unitary(Index d, std::mt19937_64& rng);

}  // namespace loccforge
