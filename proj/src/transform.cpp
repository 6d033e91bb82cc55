#include "loccforge/transform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace loccforge {

namespace {

ProductOperator canonicalize_product(const ProductOperator& g, double tol) {
    ProductOperator out = g;
    for (std::size_t p = 0; p < out.parties(); ++p) {
        LocalOperator& f = out.factors[p];
        if (f.rows() != f.cols() || f.rows() == 0) {
            throw std::invalid_argument("product operator: factor " + std::to_string(p + 1) +
                                        " is not square");
        }
        if (!all_finite(f)) {
            throw std::invalid_argument("product operator: non-finite factor at party " +
                                        std::to_string(p + 1));
        }
        const double scale = f.norm();
        if (scale <= 0.0 || smallest_singular_value(f) <= tol * std::max(1.0, scale)) {
            throw std::invalid_argument("singular factor at party " + std::to_string(p + 1));
        }
        f /= std::sqrt(f.squaredNorm());
    }
    return out;
}

std::vector<Matrix> canonical_grams(const ProductOperator& g) {
    std::vector<Matrix> out;
    out.reserve(g.parties());
    for (const auto& f : g.factors) out.push_back(gram(f));
    return out;
}

void require_group_match(const ProductOperator& g, const StabilizerGroup& group) {
    if (g.parties() != group.parties() || g.parties() < 2) {
        throw std::invalid_argument("product operator and group party counts differ");
    }
    for (std::size_t p = 0; p < g.parties(); ++p) {
        if (g.factors[p].rows() != group.party_dims[p]) {
            throw std::invalid_argument("factor dimension mismatch at party " +
                                        std::to_string(p + 1));
        }
    }
}

// Bloch action of H -> s^dag H s on trace-one Hermitian 2x2 operators.
Eigen::Matrix3d bloch_action(const LocalOperator& s) {
    Eigen::Matrix3d b;
    for (int a = 1; a <= 3; ++a)
        for (int c = 1; c <= 3; ++c)
            b(a - 1, c - 1) = 0.5 * (pauli(a) * s.adjoint() * pauli(c) * s).trace().real();
    return b;
}

Eigen::Vector3d to_vec3(const BlochVector& v) { return {v.x, v.y, v.z}; }

LocalOperator from_bloch(const Eigen::Vector3d& v) {
    return 0.5 * pauli(0) + v.x() * pauli(1) + v.y() * pauli(2) + v.z() * pauli(3);
}

double positive_definite_margin(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// General-mode feasibility search: fix the probability vector, solve the
// real-linear system sum_i p_i S_i^dag H S_i = G on the Hermitian space,
// then walk the kernel looking for a positive-definite, nontrivial solution.
// ---------------------------------------------------------------------------

std::vector<Matrix> hermitian_basis(Index d) {
    std::vector<Matrix> basis;
    const Complex i(0.0, 1.0);
    for (Index k = 0; k < d; ++k) {
        Matrix m = Matrix::Zero(d, d);
        m(k, k) = 1.0;
        basis.push_back(m);
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Index k = 0; k < d; ++k) {
        for (Index l = k + 1; l < d; ++l) {
            Matrix re = Matrix::Zero(d, d);
            re(k, l) = inv_sqrt2;
            re(l, k) = inv_sqrt2;
            basis.push_back(re);
            Matrix im = Matrix::Zero(d, d);
            im(k, l) = -i * inv_sqrt2;
            im(l, k) = i * inv_sqrt2;
            basis.push_back(im);
        }
    }
    return basis;
}

Eigen::VectorXd hermitian_coords(const Matrix& m, const std::vector<Matrix>& basis) {
    Eigen::VectorXd c(basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b) {
        c(b) = (basis[b].adjoint() * m).trace().real();
    }
    return c;
}

Matrix from_hermitian_coords(const Eigen::VectorXd& c, const std::vector<Matrix>& basis) {
    Matrix m = Matrix::Zero(basis[0].rows(), basis[0].cols());
    for (std::size_t b = 0; b < basis.size(); ++b) m += c(b) * basis[b];
    return m;
}

struct SubsetEnumerator {
    std::size_t n, m;
    std::vector<std::size_t> idx;
    bool first = true;

    SubsetEnumerator(std::size_t n_, std::size_t m_) : n(n_), m(m_) {
        idx.resize(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    }
    bool next() {
        if (m > n) return false;
        if (first) {
            first = false;
            return true;
        }
        std::size_t i = m;
        while (i-- > 0) {
            if (idx[i] + (m - i) < n) {
                ++idx[i];
                for (std::size_t k = i + 1; k < m; ++k) idx[k] = idx[k - 1] + 1;
                return true;
            }
        }
        return false;
    }
};

void enumerate_simplex_grid(std::size_t m, std::size_t ticks,
                            const std::function<void(const std::vector<double>&)>& visit) {
    if (ticks < m) return;
    std::vector<std::size_t> parts(m, 1);
    std::vector<double> p(m);
    // compositions of `ticks` into m strictly positive parts
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
        if (pos + 1 == m) {
            parts[pos] = left;
            for (std::size_t i = 0; i < m; ++i) p[i] = double(parts[i]) / double(ticks);
            visit(p);
            return;
        }
        for (std::size_t k = 1; left >= k + (m - pos - 1); ++k) {
            parts[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, ticks);
}

}  // namespace

std::optional<ReachabilityCertificate> is_reachable(const ProductOperator& h,
                                                    const StabilizerGroup& group,
                                                    const Tolerances& tol) {
    require_group_match(h, group);
    const ProductOperator canon = canonicalize_product(h, tol.eq);
    const std::vector<Matrix> grams = canonical_grams(canon);
    const std::size_t n = group.parties();

    for (std::size_t e = 0; e < group.size(); ++e) {
        std::vector<double> residuals(n);
        for (std::size_t i = 0; i < n; ++i) {
            residuals[i] = commutator_norm(grams[i], group.factor(e, i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (residuals[j] < tol.nz) continue;
            bool rest_commute = true;
            for (std::size_t i = 0; i < n && rest_commute; ++i) {
                if (i != j && residuals[i] >= tol.eq) rest_commute = false;
            }
            if (rest_commute) {
                return ReachabilityCertificate{e, j, residuals};
            }
        }
    }
    return std::nullopt;
}

ReachingConstruction construct_reaching_protocol(const ProductOperator& h,
                                                 const ReachabilityCertificate& cert, double p,
                                                 const StabilizerGroup& group,
                                                 std::shared_ptr<const SeedState> seed,
                                                 const Tolerances& tol) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("mixing weight p must lie strictly inside (0,1)");
    }
    require_group_match(h, group);
    if (cert.symmetry_index >= group.size() || cert.distinguished_party >= group.parties()) {
        throw std::invalid_argument("certificate indices out of range");
    }
    const ProductOperator target = canonicalize_product(h, tol.eq);
    const std::vector<Matrix> grams = canonical_grams(target);
    const std::size_t j = cert.distinguished_party;
    const std::size_t n = group.parties();

    // Revalidate before constructing anything.
    for (std::size_t i = 0; i < n; ++i) {
        const double r = commutator_norm(grams[i], group.factor(cert.symmetry_index, i));
        const bool ok = (i == j) ? (r >= tol.nz) : (r < tol.eq);
        if (!ok) {
            throw std::runtime_error("stale certificate: commutator pattern no longer holds at party " +
                                     std::to_string(i + 1));
        }
    }

    const Matrix s_j = group.factor(cert.symmetry_index, j);
    const Matrix target_gram = grams[j];
    const Matrix source_gram = p * target_gram + (1.0 - p) * s_j.adjoint() * target_gram * s_j;
    const Matrix g_j = matrix_sqrt_psd(source_gram, tol.eq);
    const Matrix g_j_inv = g_j.inverse();
    const Matrix h_j = target.factors[j];

    LoccOutcome keep;
    keep.op = std::sqrt(p) * h_j * g_j_inv;
    keep.child = LoccNode::leaf();

    LoccOutcome swap;
    swap.op = std::sqrt(1.0 - p) * h_j * s_j * g_j_inv;
    swap.child = LoccNode::leaf();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        const Matrix& h_i = target.factors[i];
        const Matrix s_i = group.factor(cert.symmetry_index, i);
        // W^dag with W h_i S^(i) = h_i; unitary because [H_i, S^(i)] = 0.
        Matrix correction = h_i.adjoint().inverse() * s_i * h_i.adjoint();
        if (unitarity_residual(correction) > 1e-6) {
            throw std::runtime_error("stale certificate: correction at party " +
                                     std::to_string(i + 1) + " is not unitary");
        }
        if ((correction - identity(correction.rows())).norm() > 1e-12) {
            swap.corrections[i] = std::move(correction);
        }
    }

    const Matrix povm_sum = keep.op.adjoint() * keep.op + swap.op.adjoint() * swap.op;
    if ((povm_sum - identity(povm_sum.rows())).norm() > 1e-10) {
        throw std::runtime_error("measurement completeness failed in reaching construction");
    }
    if (proportional(swap.op.adjoint() * swap.op, keep.op.adjoint() * keep.op, tol.eq)) {
        throw std::runtime_error("reaching construction produced proportional outcomes");
    }

    ReachingConstruction out;
    out.target = target;
    out.source = target;
    out.source.factors[j] = g_j;
    LoccRound round;
    round.acting_party = j;
    round.outcomes.push_back(std::move(keep));
    round.outcomes.push_back(std::move(swap));
    out.protocol.round = std::move(round);
    if (seed) out.source_state = TrackedState(out.source, std::move(seed), tol.eq);
    return out;
}

namespace {

struct QubitModeContext {
    const StabilizerGroup& group;
    const std::vector<std::size_t>& admissible;
    std::vector<Eigen::Matrix3d> actions;           // per admissible element
    std::vector<Eigen::Vector3d> excluded;          // Bloch points h must avoid
    Eigen::Vector3d g_vec;
};

// Tries candidate Bloch vectors h reaching g through the cyclic subgroup of
// one nontrivial admissible action. Returns the certificate with the best
// nontriviality margin among the candidates, if any clears the threshold.
std::optional<ConvertibilityCertificate> try_cyclic_recipe(const QubitModeContext& ctx,
                                                           std::size_t pivot, std::size_t party,
                                                           const Tolerances& tol) {
    const Eigen::Matrix3d& b = ctx.actions[pivot];

    // Orbit of the action under powers, matched back to admissible elements.
    std::vector<std::size_t> orbit;  // positions within ctx.admissible
    std::vector<Eigen::Matrix3d> powers;
    Eigen::Matrix3d cur = Eigen::Matrix3d::Identity();
    const std::size_t max_order = 4 * ctx.group.size() + 8;
    for (std::size_t k = 0; k < max_order; ++k) {
        if (k > 0 && (cur - Eigen::Matrix3d::Identity()).norm() < 1e-8) break;
        std::size_t match = ctx.admissible.size();
        for (std::size_t a = 0; a < ctx.admissible.size(); ++a) {
            if ((ctx.actions[a] - cur).norm() < 1e-8) {
                match = a;
                break;
            }
        }
        if (match == ctx.admissible.size()) return std::nullopt;  // orbit escapes the admissible set
        orbit.push_back(match);
        powers.push_back(cur);
        cur = b * cur;
    }
    if (orbit.size() < 2 || (cur - Eigen::Matrix3d::Identity()).norm() >= 1e-8) {
        return std::nullopt;
    }
    const std::size_t m = orbit.size();

    Eigen::Matrix3d invariant_proj = Eigen::Matrix3d::Zero();
    for (const auto& pw : powers) invariant_proj += pw;
    invariant_proj /= double(m);

    const Eigen::Vector3d g_inv = invariant_proj * ctx.g_vec;
    const Eigen::Vector3d g_perp = ctx.g_vec - g_inv;
    const double radius_sq = 0.25 - g_inv.squaredNorm();
    if (radius_sq <= 0.0) return std::nullopt;
    const double radius = std::sqrt(radius_sq);
    const double perp_norm = g_perp.norm();

    struct Candidate {
        Eigen::Vector3d h;
        double rho;  // extra weight on the identity component
    };
    std::vector<Candidate> candidates;
    const std::size_t n_scan = ctx.admissible.size() + 4;
    if (perp_norm > 1e-13) {
        std::vector<double> scales;
        for (std::size_t i = 1; i <= n_scan; ++i) {
            const double c = radius * double(i) / double(n_scan + 1);
            if (c > perp_norm * (1.0 + 1e-9)) scales.push_back(c);
        }
        // near the positivity boundary the grid can miss the admissible band
        scales.push_back(0.5 * (perp_norm + radius));
        for (double c : scales) {
            candidates.push_back({g_inv + (c / perp_norm) * g_perp, perp_norm / c});
        }
    } else {
        // g lies in the invariant subspace: the perpendicular component of h
        // is free, sweep directions in the complement of the projector.
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(invariant_proj);
        std::vector<Eigen::Vector3d> comp;
        for (int i = 0; i < 3; ++i) {
            if (es.eigenvalues()(i) < 0.5) comp.push_back(es.eigenvectors().col(i));
        }
        if (comp.empty()) return std::nullopt;
        for (std::size_t i = 1; i <= 3; ++i) {
            const double c = radius * double(i) / 4.0;
            for (std::size_t ang = 0; ang < n_scan; ++ang) {
                const double theta = 2.0 * std::numbers::pi * double(ang) / double(n_scan);
                Eigen::Vector3d w = std::cos(theta) * comp[0];
                if (comp.size() > 1) w += std::sin(theta) * comp[1];
                if (w.norm() < 1e-12) continue;
                w.normalize();
                candidates.push_back({g_inv + c * w, 0.0});
            }
        }
    }

    const double needed_margin = tol.nz / std::sqrt(2.0);
    double best_margin = -1.0;
    std::optional<Candidate> best;
    for (const auto& cand : candidates) {
        if (cand.h.norm() >= 0.5) continue;
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& e : ctx.excluded) margin = std::min(margin, (cand.h - e).norm());
        if (margin > best_margin) {
            best_margin = margin;
            best = cand;
        }
    }
    if (!best || best_margin <= needed_margin) return std::nullopt;

    // Assemble p over the orbit: uniform plus rho extra on the identity power.
    ConvertibilityCertificate cert;
    cert.acting_party = party;
    const double rho = best->rho;
    for (std::size_t k = 0; k < m; ++k) {
        cert.symmetry_indices.push_back(ctx.admissible[orbit[k]]);
        cert.probabilities.push_back((1.0 - rho) / double(m) + (k == 0 ? rho : 0.0));
    }
    cert.target_gram = from_bloch(best->h);
    return cert;
}

}  // namespace

ConvertibilityResult is_convertible(const ProductOperator& g, const StabilizerGroup& group,
                                    std::size_t acting_party,
                                    const ConvertibilitySearchConfig& cfg) {
    require_group_match(g, group);
    if (acting_party >= g.parties()) {
        throw std::invalid_argument("acting party index out of range");
    }
    const Tolerances& tol = cfg.tol;
    const ProductOperator canon = canonicalize_product(g, tol.eq);
    const std::vector<Matrix> grams = canonical_grams(canon);
    const std::size_t j = acting_party;

    ConvertibilityResult result;
    // Condition (i): the symmetry must commute with every spectator Gram.
    for (std::size_t e = 0; e < group.size(); ++e) {
        bool ok = true;
        for (std::size_t k = 0; k < group.parties() && ok; ++k) {
            if (k == j) continue;
            if (commutator_norm(grams[k], group.factor(e, k)) >= tol.eq) ok = false;
        }
        if (ok) result.admissible.push_back(e);
    }
    if (result.admissible.size() < 2) {
        result.exact = true;
        return result;
    }

    const Matrix& g_gram = grams[j];
    const Index d = g_gram.rows();

    // If every admissible symmetry acts as a scalar on party j, the mixing
    // condition forces H = G_j, which the nontriviality clause forbids.
    bool any_nontrivial = false;
    for (std::size_t e : result.admissible) {
        if (!proportional(group.factor(e, j), identity(d), tol.eq)) {
            any_nontrivial = true;
            break;
        }
    }
    if (!any_nontrivial) {
        result.exact = true;
        return result;
    }

    auto finalize = [&](ConvertibilityCertificate cert) {
        // Residuals recorded so protocols built later can revalidate cheaply.
        Matrix mixed = Matrix::Zero(d, d);
        for (std::size_t i = 0; i < cert.symmetry_indices.size(); ++i) {
            const Matrix s = group.factor(cert.symmetry_indices[i], j);
            mixed += cert.probabilities[i] * s.adjoint() * cert.target_gram * s;
        }
        cert.gram_residual = (g_gram - mixed).norm();
        cert.nontriviality_margin = std::numeric_limits<double>::infinity();
        for (std::size_t e : result.admissible) {
            const Matrix s = group.factor(e, j);
            cert.nontriviality_margin = std::min(
                cert.nontriviality_margin, (cert.target_gram - s * g_gram * s.adjoint()).norm());
        }
        return cert;
    };

    if (d == 2) {
        QubitModeContext ctx{group, result.admissible, {}, {}, Eigen::Vector3d::Zero()};
        ctx.g_vec = to_vec3(operator_to_bloch(g_gram, 1e-7));
        for (std::size_t e : result.admissible) {
            ctx.actions.push_back(bloch_action(group.factor(e, j)));
        }
        for (const auto& action : ctx.actions) {
            ctx.excluded.push_back(action.transpose() * ctx.g_vec);
        }
        for (std::size_t a = 0; a < ctx.actions.size(); ++a) {
            if ((ctx.actions[a] - Eigen::Matrix3d::Identity()).norm() < 1e-9) continue;
            auto cert = try_cyclic_recipe(ctx, a, j, tol);
            if (cert) {
                auto full = finalize(std::move(*cert));
                if (full.gram_residual < tol.eq && full.nontriviality_margin > tol.nz) {
                    result.certificate = std::move(full);
                    result.exact = true;
                    return result;
                }
            }
        }
        // A nontrivial admissible action always admits a certificate on a
        // qubit party; fall through to the general search defensively and
        // label the outcome accordingly.
    }

    // General-mode search over probability vectors and symmetry subsets.
    const std::vector<Matrix> basis = hermitian_basis(d);
    const Eigen::VectorXd g_coords = hermitian_coords(g_gram, basis);
    std::mt19937_64 rng(cfg.rng_seed);

    auto try_probability = [&](const std::vector<std::size_t>& subset,
                               const std::vector<double>& p) -> std::optional<ConvertibilityCertificate> {
        Eigen::MatrixXd map(basis.size(), basis.size());
        for (std::size_t b = 0; b < basis.size(); ++b) {
            Matrix mixed = Matrix::Zero(d, d);
            for (std::size_t i = 0; i < subset.size(); ++i) {
                const Matrix s = group.factor(result.admissible[subset[i]], j);
                mixed += p[i] * s.adjoint() * basis[b] * s;
            }
            map.col(b) = hermitian_coords(mixed, basis);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(map);
        Eigen::VectorXd particular = cod.solve(g_coords);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(map);
        lu.setThreshold(1e-10);
        Eigen::MatrixXd kernel = lu.kernel();

        std::vector<Eigen::VectorXd> trials;
        trials.push_back(particular);
        if (kernel.cols() > 0 && kernel.norm() > 1e-12) {
            for (Eigen::Index kcol = 0; kcol < kernel.cols(); ++kcol) {
                for (double t : {0.05, -0.05, 0.15, -0.15, 0.3, -0.3}) {
                    trials.push_back(particular + t * kernel.col(kcol));
                }
            }
            std::normal_distribution<double> gauss(0.0, 0.15);
            for (int extra = 0; extra < 6; ++extra) {
                Eigen::VectorXd mix = particular;
                for (Eigen::Index kcol = 0; kcol < kernel.cols(); ++kcol) {
                    mix += gauss(rng) * kernel.col(kcol);
                }
                trials.push_back(mix);
            }
        }
        for (const auto& coords : trials) {
            if ((map * coords - g_coords).norm() > 1e-9 * std::max(1.0, g_coords.norm())) continue;
            Matrix h = from_hermitian_coords(coords, basis);
            if (positive_definite_margin(h) <= 1e-10) continue;
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t e : result.admissible) {
                const Matrix s = group.factor(e, j);
                margin = std::min(margin, (h - s * g_gram * s.adjoint()).norm());
            }
            if (margin <= tol.nz) continue;
            ConvertibilityCertificate cert;
            cert.acting_party = j;
            for (std::size_t i = 0; i < subset.size(); ++i) {
                cert.symmetry_indices.push_back(result.admissible[subset[i]]);
                cert.probabilities.push_back(p[i]);
            }
            cert.target_gram = std::move(h);
            return cert;
        }
        return std::nullopt;
    };

    const std::size_t ticks = std::max<std::size_t>(2, std::llround(1.0 / cfg.grid_step));
    const std::size_t m_max = std::min(cfg.max_subset, result.admissible.size());
    for (std::size_t m = 2; m <= m_max && !result.certificate; ++m) {
        SubsetEnumerator subsets(result.admissible.size(), m);
        while (subsets.next() && !result.certificate) {
            std::optional<ConvertibilityCertificate> found;
            enumerate_simplex_grid(m, ticks, [&](const std::vector<double>& p) {
                if (found) return;
                if (auto cert = try_probability(subsets.idx, p)) found = std::move(cert);
            });
            if (!found) {
                std::exponential_distribution<double> expo(1.0);
                std::vector<double> p(m);
                for (std::size_t trial = 0; trial < cfg.n_random && !found; ++trial) {
                    double sum = 0.0;
                    for (auto& v : p) {
                        v = expo(rng) + 1e-9;
                        sum += v;
                    }
                    for (auto& v : p) v /= sum;
                    if (auto cert = try_probability(subsets.idx, p)) found = std::move(cert);
                }
            }
            if (found) {
                auto full = finalize(std::move(*found));
                if (full.gram_residual < std::max(tol.eq, 1e-9) &&
                    full.nontriviality_margin > tol.nz) {
                    result.certificate = std::move(full);
                    result.exact = true;
                }
            }
        }
    }
    return result;
}

LoccNode build_convertibility_round(const ProductOperator& g,
                                    const ConvertibilityCertificate& cert,
                                    const StabilizerGroup& group, const Tolerances& tol) {
    require_group_match(g, group);
    const std::size_t j = cert.acting_party;
    if (j >= g.parties()) throw std::invalid_argument("acting party index out of range");
    if (cert.symmetry_indices.size() < 2 ||
        cert.symmetry_indices.size() != cert.probabilities.size()) {
        throw std::invalid_argument("certificate needs at least two weighted symmetries");
    }
    double p_sum = 0.0;
    for (double p : cert.probabilities) {
        if (!(p > 0.0)) throw std::invalid_argument("outcome probabilities must be strictly positive");
        p_sum += p;
    }
    if (std::abs(p_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("outcome probabilities must sum to 1");
    }
    for (std::size_t e : cert.symmetry_indices) {
        if (e >= group.size()) throw std::invalid_argument("certificate symmetry index out of range");
    }

    const ProductOperator canon = canonicalize_product(g, tol.eq);
    const Matrix g_j = canon.factors[j];
    const Matrix g_j_inv = g_j.inverse();
    const Matrix h = matrix_sqrt_psd(cert.target_gram, tol.eq);

    LoccRound round;
    round.acting_party = j;
    for (std::size_t i = 0; i < cert.symmetry_indices.size(); ++i) {
        LoccOutcome outcome;
        const std::size_t e = cert.symmetry_indices[i];
        outcome.op = std::sqrt(cert.probabilities[i]) * h * group.factor(e, j) * g_j_inv;
        outcome.child = LoccNode::leaf();
        for (std::size_t k = 0; k < canon.parties(); ++k) {
            if (k == j) continue;
            Matrix u = canon.factors[k] * group.factor(e, k) * canon.factors[k].inverse();
            if (unitarity_residual(u) > 1e-6) {
                throw std::runtime_error("stale certificate: correction at party " +
                                         std::to_string(k + 1) + " is not unitary");
            }
            if ((u - identity(u.rows())).norm() > 1e-12) outcome.corrections[k] = std::move(u);
        }
        round.outcomes.push_back(std::move(outcome));
    }

    Matrix povm_sum = Matrix::Zero(g_j.rows(), g_j.cols());
    for (const auto& outcome : round.outcomes) povm_sum += outcome.op.adjoint() * outcome.op;
    if ((povm_sum - identity(g_j.rows())).norm() > 1e-10) {
        throw std::runtime_error("stale certificate: measurement completeness failed");
    }

    LoccNode node;
    node.round = std::move(round);
    return node;
}

std::optional<LuWitness> lu_equivalent(const TrackedState& a, const TrackedState& b,
                                       const StabilizerGroup& group, const Tolerances& tol) {
    if (!same_seed(a, b, tol.eq)) {
        throw std::invalid_argument("lu_equivalent: states refer to different seeds");
    }
    if (a.parties() != group.parties()) {
        throw std::invalid_argument("lu_equivalent: group party count mismatch");
    }
    for (std::size_t e = 0; e < group.size(); ++e) {
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < a.parties() && ok; ++i) {
            const Matrix s = group.factor(e, i);
            const double r = (a.gram_of(i) - s.adjoint() * b.gram_of(i) * s).norm();
            worst = std::max(worst, r);
            if (r >= tol.eq) ok = false;
        }
        if (ok) return LuWitness{e, worst};
    }
    return std::nullopt;
}

}  // namespace loccforge
