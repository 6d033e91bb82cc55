#include "loccforge/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace loccforge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::size_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 1)));
}

Matrix ginibre(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
    return z;
}

LocalOperator sample_factor(Index d, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix z = ginibre(d, rng);
        Eigen::JacobiSVD<Matrix> svd(z);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smin > 0.0 && smax / smin <= 1e6) {
            return z / std::sqrt(z.squaredNorm());
        }
    }
    throw std::runtime_error("sample_factor: no well-conditioned draw in 100 attempts");
}

// Smallest m with s^m proportional to the identity; every factor of a finite
// unitary stabilizer has one.
std::size_t projective_order(const Matrix& s, std::size_t bound) {
    Matrix acc = s;
    for (std::size_t m = 1; m <= bound; ++m) {
        if (proportional(acc, identity(s.rows()), 1e-8)) return m;
        acc = acc * s;
    }
    throw std::runtime_error("projective_order: element order exceeds bound");
}

FractionReport wilson_report(std::size_t hits, const SampleConfig& cfg) {
    const double n = double(cfg.n_samples);
    const double phat = n > 0 ? double(hits) / n : 0.0;
    const double z = 1.96;
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    FractionReport report;
    report.n_samples = cfg.n_samples;
    report.fraction = phat;
    report.ci_low = std::max(0.0, center - half);
    report.ci_high = std::min(1.0, center + half);
    report.rng_seed = cfg.rng_seed;
    report.tol = cfg.tol.eq;
    report.nz_threshold = cfg.tol.nz;
    return report;
}

}  // namespace

ProductOperator sample_product_operator(std::span<const Index> party_dims, std::mt19937_64& rng) {
    if (party_dims.size() < 2) {
        throw std::invalid_argument("sample_product_operator: need at least 2 parties");
    }
    std::vector<LocalOperator> factors;
    factors.reserve(party_dims.size());
    for (Index d : party_dims) factors.push_back(sample_factor(d, rng));
    return ProductOperator(std::move(factors));
}

ProductOperator sample_reachable_product_operator(const StabilizerGroup& group,
                                                  std::mt19937_64& rng, const Tolerances& tol) {
    // Pick a symmetry and a party where its factor is not a scalar.
    std::vector<std::pair<std::size_t, std::size_t>> options;
    for (std::size_t e = 0; e < group.size(); ++e) {
        for (std::size_t p = 0; p < group.parties(); ++p) {
            const Matrix& s = group.factor(e, p);
            if (!proportional(s, identity(s.rows()), 1e-9)) options.emplace_back(e, p);
        }
    }
    if (options.empty()) {
        throw std::invalid_argument("group has no symmetry acting nontrivially on any party");
    }
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const auto [e, j] = options[pick(rng)];

    std::vector<LocalOperator> factors(group.parties());
    for (std::size_t p = 0; p < group.parties(); ++p) {
        const Matrix& s = group.factor(e, p);
        const Index d = s.rows();
        if (p == j) {
            // Generic Gram: almost surely fails to commute with s.
            for (int attempt = 0; attempt < 100; ++attempt) {
                LocalOperator f = sample_factor(d, rng);
                if (commutator_norm(gram(f), s) >= 10.0 * tol.nz) {
                    factors[p] = std::move(f);
                    break;
                }
            }
            if (factors[p].size() == 0) {
                throw std::runtime_error("failed to draw a noncommuting factor");
            }
        } else {
            // Average a random positive operator over the conjugation orbit of
            // s so it commutes exactly (in exact arithmetic) with s.
            const std::size_t m = projective_order(s, 4 * group.size() + 8);
            Matrix positive = gram(ginibre(d, rng)) + 1e-3 * identity(d);
            Matrix averaged = Matrix::Zero(d, d);
            Matrix power = identity(d);
            for (std::size_t k = 0; k < m; ++k) {
                averaged += power.adjoint() * positive * power;
                power = power * s;
            }
            averaged /= double(m);
            LocalOperator f = matrix_sqrt_psd(averaged, tol.eq);
            factors[p] = f / std::sqrt(f.squaredNorm());
        }
    }
    return ProductOperator(std::move(factors));
}

namespace {

void validate_config(const SampleConfig& cfg) {
    if (cfg.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (!(cfg.tol.eq > 0.0) || !(cfg.tol.eq < cfg.tol.nz)) {
        throw std::invalid_argument("thresholds must satisfy 0 < tol < nz_threshold");
    }
}

}  // namespace

FractionReport reachable_fraction(const StabilizerGroup& group, const SampleConfig& cfg) {
    validate_config(cfg);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto rng = sample_stream(cfg.rng_seed, i);
        ProductOperator h = cfg.construct_reachable
                                ? sample_reachable_product_operator(group, rng, cfg.tol)
                                : sample_product_operator(group.party_dims, rng);
        if (is_reachable(h, group, cfg.tol)) ++hits;
    }
    return wilson_report(hits, cfg);
}

FractionReport convertible_fraction(const StabilizerGroup& group, const SampleConfig& cfg,
                                    std::size_t acting_party) {
    validate_config(cfg);
    if (acting_party >= group.parties()) {
        throw std::invalid_argument("acting party index out of range");
    }
    ConvertibilitySearchConfig search;
    search.tol = cfg.tol;
    search.rng_seed = cfg.rng_seed;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto rng = sample_stream(cfg.rng_seed, i);
        ProductOperator g;
        if (cfg.randomize_only_party) {
            std::vector<LocalOperator> factors;
            for (std::size_t p = 0; p < group.parties(); ++p) {
                const Index d = group.party_dims[p];
                if (p == *cfg.randomize_only_party) {
                    factors.push_back(sample_factor(d, rng));
                } else {
                    factors.push_back(identity(d) / std::sqrt(double(d)));
                }
            }
            g = ProductOperator(std::move(factors));
        } else {
            g = sample_product_operator(group.party_dims, rng);
        }
        if (is_convertible(g, group, acting_party, search).certificate) ++hits;
    }
    return wilson_report(hits, cfg);
}

Matrix random_unitary(Index d, std::mt19937_64& rng) {
    Matrix z = ginibre(d, rng);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < d; ++i) {
        const Complex diag = r(i, i);
        const Complex phase = std::abs(diag) > 0 ? diag / std::abs(diag) : Complex(1.0, 0.0);
        q.col(i) *= phase;
    }
    return q;
}

}  // namespace loccforge
