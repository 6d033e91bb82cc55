#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loccforge/sampler.hpp"

#include <cmath>

using namespace loccforge;

namespace {

bool reports_equal(const FractionReport& a, const FractionReport& b) {
    return a.n_samples == b.n_samples && a.fraction == b.fraction && a.ci_low == b.ci_low &&
           a.ci_high == b.ci_high && a.rng_seed == b.rng_seed && a.tol == b.tol &&
           a.nz_threshold == b.nz_threshold;
}

}  // namespace

TEST_CASE("sampling is reproducible bit for bit") {
    StabilizerGroup group = make_pauli_group(4);
    SampleConfig cfg;
    cfg.n_samples = 40;
    cfg.rng_seed = 1234;
    FractionReport a = reachable_fraction(group, cfg);
    FractionReport b = reachable_fraction(group, cfg);
    CHECK(reports_equal(a, b));

    auto rng1 = std::mt19937_64(99);
    auto rng2 = std::mt19937_64(99);
    ProductOperator s1 = sample_product_operator(group.party_dims, rng1);
    ProductOperator s2 = sample_product_operator(group.party_dims, rng2);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK((s1.factors[p] - s2.factors[p]).norm() == 0.0);
    }
}

TEST_CASE("sampled factors are invertible with trace-one Grams") {
    std::vector<Index> dims{2, 2, 2, 2};
    auto rng = std::mt19937_64(7);
    for (int trial = 0; trial < 1000; ++trial) {
        ProductOperator g = sample_product_operator(dims, rng);
        for (const auto& f : g.factors) {
            CHECK(smallest_singular_value(f) > 0.0);
            CHECK(std::abs(gram(f).trace().real() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("generic operators on the L class are never reachable") {
    StabilizerGroup group = enumerate_l_symmetries();
    SampleConfig cfg;
    cfg.n_samples = 200;
    cfg.rng_seed = 7;
    FractionReport report = reachable_fraction(group, cfg);
    CHECK(report.fraction == 0.0);
    CHECK(report.ci_low == 0.0);
    CHECK(report.ci_high < 0.05);
    CHECK(report.n_samples == 200);
}

TEST_CASE("the identity-only group never yields certificates") {
    StabilizerGroup group =
        make_abstract_group({2, 2, 2, 2},
                            {ProductOperator({pauli(0), pauli(0), pauli(0), pauli(0)})});
    SampleConfig cfg;
    cfg.n_samples = 50;
    cfg.rng_seed = 3;
    CHECK(reachable_fraction(group, cfg).fraction == 0.0);
}

TEST_CASE("the positive control reaches fraction one") {
    StabilizerGroup group = enumerate_l_symmetries();
    SampleConfig cfg;
    cfg.n_samples = 50;
    cfg.rng_seed = 11;
    cfg.construct_reachable = true;
    FractionReport report = reachable_fraction(group, cfg);
    CHECK(report.fraction == 1.0);
    CHECK(report.ci_high == 1.0);
}

TEST_CASE("generic operators on the L class are never convertible") {
    StabilizerGroup group = enumerate_l_symmetries();
    SampleConfig cfg;
    cfg.n_samples = 100;
    cfg.rng_seed = 5;
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(convertible_fraction(group, cfg, j).fraction == 0.0);
    }
}

TEST_CASE("Pauli class with mixed spectators is always convertible") {
    StabilizerGroup group = make_pauli_group(4);
    SampleConfig cfg;
    cfg.n_samples = 100;
    cfg.rng_seed = 13;
    cfg.randomize_only_party = 0;
    FractionReport report = convertible_fraction(group, cfg, 0);
    CHECK(report.fraction == 1.0);
}

TEST_CASE("a single-sample run is a deterministic verdict") {
    StabilizerGroup group = enumerate_l_symmetries();
    SampleConfig cfg;
    cfg.n_samples = 1;
    cfg.rng_seed = 21;
    FractionReport a = reachable_fraction(group, cfg);
    FractionReport b = reachable_fraction(group, cfg);
    CHECK(a.fraction == b.fraction);
    CHECK((a.fraction == 0.0 || a.fraction == 1.0));
}

TEST_CASE("tightening the nonzero threshold never increases the reachable fraction") {
    StabilizerGroup group = enumerate_l_symmetries();
    SampleConfig loose;
    loose.n_samples = 60;
    loose.rng_seed = 17;
    loose.construct_reachable = true;
    loose.tol.nz = 1e-6;
    SampleConfig tight = loose;
    tight.tol.nz = 1e-3;
    // same draws, stricter nonzero requirement: fraction can only drop
    CHECK(reachable_fraction(group, loose).fraction >=
          reachable_fraction(group, tight).fraction);
}

TEST_CASE("wilson interval brackets the estimate") {
    StabilizerGroup group = make_pauli_group(4);
    SampleConfig cfg;
    cfg.n_samples = 30;
    cfg.rng_seed = 19;
    cfg.randomize_only_party = 1;
    FractionReport report = convertible_fraction(group, cfg, 1);
    CHECK(report.ci_low <= report.fraction);
    CHECK(report.fraction <= report.ci_high);
    CHECK(report.ci_low >= 0.0);
    CHECK(report.ci_high <= 1.0);
}
