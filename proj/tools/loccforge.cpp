// loccforge — command-line front end: verify built-in constructions, decide
// reachability/convertibility with certificates, simulate protocol files,
// rebuild the probabilistic-step example, and run sampling experiments.

#include "loccforge/io.hpp"
#include "loccforge/sampler.hpp"
#include "loccforge/transform.hpp"
#include "loccforge/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace loccforge;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct Report {
    std::string command;
    std::string status = "pass";  // pass | fail | not-found | error
    json payload = json::object();
    Tolerances tol;

    json to_json() const {
        return json{{"command", command},
                    {"status", status},
                    {"payload", payload},
                    {"tolerances", {{"tol", tol.eq}, {"nz_threshold", tol.nz}}},
                    {"version", std::string(kVersion)}};
    }

    int exit_code() const {
        if (status == "error") return kExitError;
        if (status == "fail") return kExitFail;
        return kExitPass;  // pass and not-found are expected outcomes
    }
};

void print_text(const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || value.is_array()) {
                std::cout << prefix << key << ":\n";
                print_text(value, prefix + "  ");
            } else {
                std::cout << prefix << key << " = " << value.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (j[i].is_object() || j[i].is_array()) {
                std::cout << prefix << "- [" << i << "]\n";
                print_text(j[i], prefix + "  ");
            } else {
                std::cout << prefix << "- " << j[i].dump() << "\n";
            }
        }
    } else {
        std::cout << prefix << j.dump() << "\n";
    }
}

int emit(const Report& report, const std::string& format) {
    if (format == "json") {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.command << ": " << report.status << "\n";
        print_text(report.payload, "  ");
        std::cout << "  tolerances: tol = " << report.tol.eq
                  << ", nz_threshold = " << report.tol.nz << "\n";
        std::cout << "  version: " << kVersion << "\n";
    }
    return report.exit_code();
}

Tolerances default_tolerances() {
    Tolerances tol;
    if (const char* env = std::getenv("LOCCFORGE_TOL")) {
        try {
            tol.eq = std::stod(env);
        } catch (...) {
            throw std::runtime_error("LOCCFORGE_TOL is not a number");
        }
    }
    return tol;
}

// Group specifiers: "l-state", "pauli:<n>", or a JSON group file path.
StabilizerGroup resolve_group(const std::string& spec, double tol) {
    if (spec == "l-state") return enumerate_l_symmetries();
    if (spec.rfind("pauli:", 0) == 0) {
        const int n = std::stoi(spec.substr(6));
        if (n < 2) throw std::runtime_error("pauli:<n> needs n >= 2");
        return make_pauli_group(static_cast<std::size_t>(n));
    }
    auto group = io::group_from_json(io::load_json_file(spec), GroupMode::Abstract);
    validate_group_structure(group, tol);
    return group;
}

ProductOperator parse_bloch_product(const std::string& text) {
    std::vector<LocalOperator> factors;
    std::stringstream parties(text);
    std::string party;
    while (std::getline(parties, party, ';')) {
        std::stringstream comps(party);
        std::string comp;
        std::vector<double> v;
        while (std::getline(comps, comp, ',')) {
            if (comp.find_first_not_of(" \t") == std::string::npos) continue;
            v.push_back(std::stod(comp));
        }
        if (v.size() != 3) {
            throw std::runtime_error("--bloch: each party needs three components, got '" + party +
                                     "'");
        }
        factors.push_back(bloch_to_operator({v[0], v[1], v[2]}));
    }
    if (factors.size() < 2) throw std::runtime_error("--bloch: need at least two parties");
    return ProductOperator(std::move(factors));
}

ProductOperator load_operator(const std::string& file, const std::string& bloch,
                              const StabilizerGroup& group) {
    if (!file.empty() && !bloch.empty()) {
        throw std::runtime_error("give either an operator file or --bloch, not both");
    }
    if (!file.empty()) {
        auto [dims, op] = io::product_from_json(io::load_json_file(file));
        if (dims != group.party_dims) {
            throw std::runtime_error("operator party dimensions do not match the group");
        }
        return op;
    }
    if (bloch.empty()) throw std::runtime_error("an operator is required (file or --bloch)");
    ProductOperator op = parse_bloch_product(bloch);
    if (op.dims() != group.party_dims) {
        throw std::runtime_error("--bloch party count does not match the group (qubits only)");
    }
    return op;
}

json bloch_json(const Matrix& gram_op) {
    if (gram_op.rows() != 2) return io::matrix_to_json(gram_op);
    const BlochVector v = operator_to_bloch(gram_op, 1e-7);
    return json::array({v.x, v.y, v.z});
}

json leaf_table(const SimulationResult& sim) {
    json leaves = json::array();
    for (const auto& leaf : sim.leaves) {
        json grams = json::array();
        for (std::size_t p = 0; p < leaf.state.parties(); ++p) {
            grams.push_back(bloch_json(leaf.state.gram_of(p)));
        }
        leaves.push_back(json{{"path", leaf.path},
                              {"probability", leaf.probability},
                              {"gram_bloch", std::move(grams)}});
    }
    return leaves;
}

json pruned_table(const SimulationResult& sim) {
    json pruned = json::array();
    for (const auto& branch : sim.pruned) {
        pruned.push_back(json{{"path", branch.path}, {"probability", branch.probability}});
    }
    return pruned;
}

// Independent full-vector evolution used by --cross-check.
struct DirectLeaf {
    Vector vec;  // unnormalized
    double probability;
};

void direct_evolve(const LoccNode& node, const Vector& state,
                   const std::vector<Index>& dims, double probability,
                   std::vector<DirectLeaf>& out) {
    if (node.is_leaf()) {
        out.push_back({state, probability});
        return;
    }
    const LoccRound& round = *node.round;
    for (const auto& outcome : round.outcomes) {
        std::vector<LocalOperator> ops;
        for (std::size_t p = 0; p < dims.size(); ++p) {
            if (p == round.acting_party) {
                ops.push_back(outcome.op);
            } else if (auto it = outcome.corrections.find(p); it != outcome.corrections.end()) {
                ops.push_back(it->second);
            } else {
                ops.push_back(identity(dims[p]));
            }
        }
        Vector next = apply_product(ProductOperator(std::move(ops)), state);
        const double p_rel = next.squaredNorm() / state.squaredNorm();
        if (p_rel < 1e-12) continue;
        direct_evolve(*outcome.child, next, dims, probability * p_rel, out);
    }
}

json cross_check_json(const LoccNode& protocol, const TrackedState& initial,
                      const SimulationResult& sim) {
    std::vector<DirectLeaf> direct;
    direct_evolve(protocol, initial.full_vector(), initial.seed()->party_dims, 1.0, direct);
    double max_prob_diff = 0.0;
    double min_fidelity = 1.0;
    const bool counts_match = direct.size() == sim.leaves.size();
    if (counts_match) {
        for (std::size_t i = 0; i < direct.size(); ++i) {
            max_prob_diff =
                std::max(max_prob_diff, std::abs(direct[i].probability - sim.leaves[i].probability));
            Vector v = direct[i].vec / direct[i].vec.norm();
            min_fidelity =
                std::min(min_fidelity, std::abs(Complex(v.dot(sim.leaves[i].state.full_vector()))));
        }
    }
    return json{{"leaf_count_match", counts_match},
                {"max_probability_difference", max_prob_diff},
                {"min_fidelity", min_fidelity}};
}

json certificate_json(const ReachabilityCertificate& cert) {
    return json{{"symmetry_index", cert.symmetry_index},
                {"distinguished_party", cert.distinguished_party + 1},
                {"commutator_residuals", cert.commuting_residuals}};
}

json certificate_json(const ConvertibilityCertificate& cert) {
    json indices = json::array();
    for (auto e : cert.symmetry_indices) indices.push_back(e);
    return json{{"symmetry_indices", std::move(indices)},
                {"probabilities", cert.probabilities},
                {"target_gram", io::matrix_to_json(cert.target_gram)},
                {"target_gram_bloch", bloch_json(cert.target_gram)},
                {"acting_party", cert.acting_party + 1},
                {"gram_residual", cert.gram_residual},
                {"nontriviality_margin", cert.nontriviality_margin}};
}

struct SeedWithGroup {
    std::shared_ptr<const SeedState> seed;
    std::string group_source;
};

// Assembles a seed for a tracked-state file: the builtin L stabilizer when
// the amplitudes match, an explicit --group, or the identity-only fallback.
SeedWithGroup assemble_seed(const io::TrackedStateFile& file, const std::string& group_spec,
                            double tol) {
    SeedWithGroup out;
    if (!group_spec.empty()) {
        StabilizerGroup group = resolve_group(group_spec, tol);
        out.seed = std::make_shared<const SeedState>(
            make_seed_state(file.party_dims, file.seed_amplitudes, std::move(group), tol));
        out.group_source = group_spec;
        return out;
    }
    const SeedState l = build_l_state();
    if (file.party_dims == l.party_dims &&
        (file.seed_amplitudes - l.amplitudes).norm() < 1e-6) {
        out.seed = std::make_shared<const SeedState>(l);
        out.group_source = "l-state";
        return out;
    }
    std::vector<ProductOperator> only_identity;
    std::vector<LocalOperator> factors;
    for (Index d : file.party_dims) factors.push_back(identity(d));
    only_identity.emplace_back(std::move(factors));
    StabilizerGroup group = make_abstract_group(file.party_dims, std::move(only_identity));
    out.seed = std::make_shared<const SeedState>(
        make_seed_state(file.party_dims, file.seed_amplitudes, std::move(group), tol));
    out.group_source = "identity-only";
    return out;
}

// ---------------------------------------------------------------------------

int cmd_verify_seed(const std::string& builtin, const std::string& state_file,
                    const std::string& group_file, const Tolerances& tol,
                    const std::string& format) {
    Report report;
    report.command = "verify-seed";
    report.tol = tol;
    try {
        StabilizerGroup group;
        SeedState state;
        if (!builtin.empty()) {
            if (builtin != "l-state") throw std::runtime_error("unknown builtin '" + builtin + "'");
            state = build_l_state();
            group = state.stabilizer;
        } else {
            if (state_file.empty() || group_file.empty()) {
                throw std::runtime_error("need --builtin or both --state and --group");
            }
            auto [dims, amps] = io::state_from_json(io::load_json_file(state_file));
            if (std::abs(amps.norm() - 1.0) > 1e-6) {
                throw std::runtime_error("state file: amplitudes are not unit-norm");
            }
            group = io::group_from_json(io::load_json_file(group_file), GroupMode::Concrete);
            validate_group_structure(group, tol.eq);
            state.party_dims = std::move(dims);
            state.amplitudes = std::move(amps);
            state.stabilizer = group;
        }
        const StabilizerReport result = verify_stabilizer(group, state, tol.eq);
        json elements = json::array();
        for (std::size_t e = 0; e < result.elements.size(); ++e) {
            elements.push_back(json{
                {"index", e},
                {"phase", io::complex_to_json(group.elements[e].phase)},
                {"stabilization_residual", result.elements[e].stabilization_residual},
                {"unitarity_residual", result.elements[e].unitarity_residual}});
        }
        report.payload = json{{"n_elements", group.size()},
                              {"elements", std::move(elements)},
                              {"closure_ok", result.closure_ok}};
        report.status = result.passed ? "pass" : "fail";
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

int cmd_check_reachable(const std::string& group_spec, const std::string& h_file,
                        const std::string& bloch, const Tolerances& tol,
                        const std::string& format) {
    Report report;
    report.command = "check-reachable";
    report.tol = tol;
    try {
        const StabilizerGroup group = resolve_group(group_spec, tol.eq);
        const ProductOperator h = load_operator(h_file, bloch, group);
        auto cert = is_reachable(h, group, tol);
        if (cert) {
            report.status = "pass";
            report.payload = json{{"certificate", certificate_json(*cert)}};
        } else {
            report.status = "not-found";
            report.payload = json{{"message", "no symmetry satisfies the commutator pattern"}};
        }
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

int cmd_check_convertible(const std::string& group_spec, const std::string& g_file,
                          const std::string& bloch, int party_1based,
                          const ConvertibilitySearchConfig& cfg, const std::string& format) {
    Report report;
    report.command = "check-convertible";
    report.tol = cfg.tol;
    try {
        const StabilizerGroup group = resolve_group(group_spec, cfg.tol.eq);
        const ProductOperator g = load_operator(g_file, bloch, group);
        if (party_1based < 1 || std::size_t(party_1based) > group.parties()) {
            throw std::runtime_error("--party must be in 1.." + std::to_string(group.parties()));
        }
        auto result = is_convertible(g, group, std::size_t(party_1based - 1), cfg);
        if (result.certificate) {
            report.status = "pass";
            report.payload = json{{"certificate", certificate_json(*result.certificate)},
                                  {"admissible", result.admissible},
                                  {"decision", "exact"}};
        } else {
            report.status = "not-found";
            report.payload = json{{"admissible", result.admissible},
                                  {"decision", result.exact ? "exact" : "search-exhausted"}};
        }
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

int cmd_simulate(const std::string& protocol_file, const std::string& initial_file,
                 const std::string& target_file, const std::string& group_spec, bool cross_check,
                 const Tolerances& tol, const std::string& format) {
    Report report;
    report.command = "simulate";
    report.tol = tol;
    try {
        const LoccNode protocol = io::protocol_from_json(io::load_json_file(protocol_file));
        const io::TrackedStateFile initial_data =
            io::tracked_from_json(io::load_json_file(initial_file));
        SeedWithGroup seeded = assemble_seed(initial_data, group_spec, tol.eq);
        TrackedState initial(initial_data.factors, seeded.seed, tol.eq);

        SimulationResult sim;
        try {
            sim = simulate(protocol, initial, tol.eq);
        } catch (const std::exception& err) {
            report.status = "fail";
            report.payload = json{{"message", err.what()}};
            return emit(report, format);
        }
        const DeterminismClass cls =
            classify_protocol(protocol, initial, seeded.seed->stabilizer, tol.eq);

        report.payload = json{{"leaves", leaf_table(sim)},
                              {"pruned", pruned_table(sim)},
                              {"probability_sum", sim.probability_sum()},
                              {"determinism_class", to_string(cls)},
                              {"group", seeded.group_source}};
        report.status = "pass";

        if (!target_file.empty()) {
            const io::TrackedStateFile target_data =
                io::tracked_from_json(io::load_json_file(target_file));
            if ((target_data.seed_amplitudes - initial_data.seed_amplitudes).norm() > 1e-6) {
                throw std::runtime_error("target file refers to a different seed state");
            }
            TrackedState target(target_data.factors, seeded.seed, tol.eq);
            const DeterminismCheck check = verify_deterministic(sim, target, seeded.seed->stabilizer, tol.eq);
            json witnesses = json::array();
            for (const auto& w : check.witnesses) {
                witnesses.push_back(w.symmetry_index
                                        ? json{{"symmetry_index", *w.symmetry_index},
                                               {"residual", w.residual}}
                                        : json{{"symmetry_index", nullptr}});
            }
            report.payload["target_check"] =
                json{{"passed", check.passed}, {"witnesses", std::move(witnesses)}};
            if (!check.passed) report.status = "fail";
        }
        if (cross_check) {
            report.payload["cross_check"] = cross_check_json(protocol, initial, sim);
        }
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

int cmd_paper_example(double x, const std::string& out_dir, const Tolerances& tol,
                      const std::string& format) {
    Report report;
    report.command = "paper-example";
    report.tol = tol;
    try {
        const StepExample example = build_probabilistic_step_example(x);
        const StabilizerGroup& group = example.seed->stabilizer;

        // (a) the initial state admits no single-round conversion for any party
        bool not_convertible = true;
        json convertibility = json::array();
        for (std::size_t j = 0; j < 4; ++j) {
            ConvertibilitySearchConfig cfg;
            cfg.tol = tol;
            auto result = is_convertible(example.initial.op(), group, j, cfg);
            convertibility.push_back(json{{"party", j + 1},
                                          {"convertible", result.certificate.has_value()},
                                          {"decision", result.exact ? "exact" : "search-exhausted"},
                                          {"admissible_count", result.admissible.size()}});
            if (result.certificate || !result.exact) not_convertible = false;
        }

        // (b) opening-round completeness
        const LoccRound& opening = *example.protocol.round;
        Matrix povm_sum = Matrix::Zero(2, 2);
        for (const auto& outcome : opening.outcomes) povm_sum += outcome.op.adjoint() * outcome.op;
        const double completeness = (povm_sum - identity(2)).norm();

        // (c) four leaves with unit total probability
        const SimulationResult sim = simulate(example.protocol, example.initial, tol.eq);
        const double prob_sum = sim.probability_sum();
        const bool leaves_ok = sim.leaves.size() == 4 && std::abs(prob_sum - 1.0) < 1e-9;

        // (d) every leaf reaches the target with an explicit witness
        const DeterminismCheck target_check =
            verify_deterministic(sim, example.target, group, tol.eq);

        // (e) the opening round is a genuine probabilistic step
        const DeterminismClass cls =
            classify_protocol(example.protocol, example.initial, group, tol.eq);
        const bool class_ok = cls == DeterminismClass::DeterministicWithProbabilisticSteps;

        json witnesses = json::array();
        for (const auto& w : target_check.witnesses) {
            witnesses.push_back(w.symmetry_index ? json(*w.symmetry_index) : json(nullptr));
        }
        report.payload = json{{"x", x},
                              {"initial_not_convertible", not_convertible},
                              {"convertibility", std::move(convertibility)},
                              {"opening_completeness_residual", completeness},
                              {"n_leaves", sim.leaves.size()},
                              {"probability_sum", prob_sum},
                              {"leaves", leaf_table(sim)},
                              {"target_reached", target_check.passed},
                              {"leaf_witnesses", std::move(witnesses)},
                              {"determinism_class", to_string(cls)}};
        const bool all_ok =
            not_convertible && completeness < 1e-12 && leaves_ok && target_check.passed && class_ok;
        report.status = all_ok ? "pass" : "fail";

        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            io::save_json_file(dir / "initial.json", io::tracked_to_json(example.initial));
            io::save_json_file(dir / "target.json", io::tracked_to_json(example.target));
            io::save_json_file(dir / "protocol.json", io::protocol_to_json(example.protocol));
            io::save_json_file(dir / "group.json", io::group_to_json(group));
            io::save_json_file(dir / "summary.json", report.to_json());
            report.payload["output_dir"] = out_dir;
        }
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

int cmd_sample(const std::string& group_spec, const std::string& mode, std::size_t n,
               std::uint64_t seed, int party_1based, bool construct_reachable,
               bool spectators_mixed, const Tolerances& tol, const std::string& format) {
    Report report;
    report.command = "sample";
    report.tol = tol;
    try {
        const StabilizerGroup group = resolve_group(group_spec, tol.eq);
        SampleConfig cfg;
        cfg.n_samples = n;
        cfg.rng_seed = seed;
        cfg.tol = tol;
        cfg.construct_reachable = construct_reachable;

        FractionReport fraction;
        if (mode == "reachable") {
            fraction = reachable_fraction(group, cfg);
        } else if (mode == "convertible") {
            if (party_1based < 1 || std::size_t(party_1based) > group.parties()) {
                throw std::runtime_error("--party must be in 1.." + std::to_string(group.parties()));
            }
            if (spectators_mixed) cfg.randomize_only_party = std::size_t(party_1based - 1);
            fraction = convertible_fraction(group, cfg, std::size_t(party_1based - 1));
        } else {
            throw std::runtime_error("--mode must be 'reachable' or 'convertible'");
        }
        report.payload = json{{"n_samples", fraction.n_samples},
                              {"fraction", fraction.fraction},
                              {"ci_low", fraction.ci_low},
                              {"ci_high", fraction.ci_high},
                              {"rng_seed", fraction.rng_seed},
                              {"tol", fraction.tol},
                              {"nz_threshold", fraction.nz_threshold}};
        report.status = "pass";
    } catch (const std::exception& err) {
        report.status = "error";
        report.payload = json{{"message", err.what()}};
    }
    return emit(report, format);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loccforge: finite-round LOCC transformations in SLOCC classes with finite stabilizers"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "text";
    app.add_option("--format", format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    Tolerances tol;
    try {
        tol = default_tolerances();
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    }

    // verify-seed
    auto* verify = app.add_subcommand("verify-seed", "Verify a stabilizer against a seed state");
    std::string builtin, state_file, group_file;
    verify->add_option("--builtin", builtin, "Built-in seed: l-state");
    verify->add_option("--state", state_file, "State JSON file");
    verify->add_option("--group", group_file, "Group JSON file");
    verify->add_option("--tol", tol.eq, "Equality tolerance");

    // check-reachable
    auto* reach = app.add_subcommand("check-reachable", "Decide reachability of a target operator");
    reach->set_help_flag("--help", "Print this help message and exit");
    std::string reach_group = "l-state", reach_h, reach_bloch;
    reach->add_option("--group", reach_group, "Group: l-state, pauli:<n>, or a JSON file");
    reach->add_option("--h", reach_h, "Target operator JSON file");
    reach->add_option("--bloch", reach_bloch, "Qubit Bloch vectors 'x,y,z; x,y,z; ...'");
    reach->add_option("--tol", tol.eq, "Equality tolerance");
    reach->add_option("--nz", tol.nz, "Nonzero-commutator threshold");

    // check-convertible
    auto* convert = app.add_subcommand("check-convertible", "Decide single-round convertibility");
    std::string conv_group = "l-state", conv_g, conv_bloch;
    int conv_party = 1;
    ConvertibilitySearchConfig search_cfg;
    convert->add_option("--group", conv_group, "Group: l-state, pauli:<n>, or a JSON file");
    convert->add_option("--g", conv_g, "State operator JSON file");
    convert->add_option("--bloch", conv_bloch, "Qubit Bloch vectors 'x,y,z; x,y,z; ...'");
    convert->add_option("--party", conv_party, "Acting party (1-based)")->required();
    convert->add_option("--grid-step", search_cfg.grid_step, "Probability grid step");
    convert->add_option("--max-subset", search_cfg.max_subset, "Largest symmetry subset");
    convert->add_option("--rng-seed", search_cfg.rng_seed, "Search RNG seed");
    convert->add_option("--tol", tol.eq, "Equality tolerance");
    convert->add_option("--nz", tol.nz, "Nonzero threshold");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a protocol file on a tracked state");
    std::string sim_protocol, sim_initial, sim_target, sim_group;
    bool sim_cross_check = false;
    sim->add_option("--protocol", sim_protocol, "Protocol JSON file")->required();
    sim->add_option("--initial", sim_initial, "Initial tracked-state JSON file")->required();
    sim->add_option("--target", sim_target, "Target tracked-state JSON file");
    sim->add_option("--group", sim_group, "Group for LU checks (defaults to l-state when the seed matches)");
    sim->add_flag("--cross-check", sim_cross_check, "Also run direct state-vector evolution");
    sim->add_option("--tol", tol.eq, "Equality tolerance");

    // paper-example
    auto* example = app.add_subcommand("paper-example",
                                       "Rebuild and check the probabilistic-step example");
    double example_x = 0.05;
    std::string example_out;
    example->add_option("--x", example_x, "Bloch parameter x (0 < x < 0.1443)");
    example->add_option("--out", example_out, "Directory for emitted JSON files");
    example->add_option("--tol", tol.eq, "Equality tolerance");

    // sample
    auto* sample = app.add_subcommand("sample", "Monte Carlo fraction experiments");
    std::string sample_group = "l-state", sample_mode = "reachable";
    std::size_t sample_n = 1000;
    std::uint64_t sample_seed = 0;
    int sample_party = 1;
    bool sample_construct = false, sample_spectators_mixed = false;
    sample->add_option("--group", sample_group, "Group: l-state, pauli:<n>, or a JSON file");
    sample->add_option("--mode", sample_mode, "reachable or convertible");
    sample->add_option("--n", sample_n, "Number of samples");
    sample->add_option("--seed", sample_seed, "RNG seed");
    sample->add_option("--party", sample_party, "Acting party for convertible mode (1-based)");
    sample->add_flag("--construct-reachable", sample_construct,
                     "Positive control: draw reachable-by-construction operators");
    sample->add_flag("--spectators-mixed", sample_spectators_mixed,
                     "Sample only the acting party; spectators stay maximally mixed");
    sample->add_option("--tol", tol.eq, "Equality tolerance");
    sample->add_option("--nz", tol.nz, "Nonzero threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitError : kExitPass;
    }

    if (verify->parsed()) return cmd_verify_seed(builtin, state_file, group_file, tol, format);
    if (reach->parsed()) return cmd_check_reachable(reach_group, reach_h, reach_bloch, tol, format);
    if (convert->parsed()) {
        search_cfg.tol = tol;
        return cmd_check_convertible(conv_group, conv_g, conv_bloch, conv_party, search_cfg, format);
    }
    if (sim->parsed()) {
        return cmd_simulate(sim_protocol, sim_initial, sim_target, sim_group, sim_cross_check, tol,
                            format);
    }
    if (example->parsed()) return cmd_paper_example(example_x, example_out, tol, format);
    if (sample->parsed()) {
        return cmd_sample(sample_group, sample_mode, sample_n, sample_seed, sample_party,
                          sample_construct, sample_spectators_mixed, tol, format);
    }
    return kExitError;
}
