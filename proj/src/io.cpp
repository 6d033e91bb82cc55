#include "loccforge/io.hpp"

#include <fstream>
#include <stdexcept>

namespace loccforge::io {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw std::runtime_error(context + ": " + what);
}

const json& field(const json& j, const char* name, const std::string& context) {
    if (!j.is_object()) fail(context, "expected an object");
    auto it = j.find(name);
    if (it == j.end()) fail(context, std::string("missing field '") + name + "'");
    return *it;
}

}  // namespace

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        fail(context, "expected [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) fail(context, "expected a non-empty array of rows");
    const std::size_t n_rows = j.size();
    const std::size_t n_cols = j[0].is_array() ? j[0].size() : 0;
    if (n_cols == 0) fail(context, "expected rows of entries");
    Matrix m(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (!j[i].is_array() || j[i].size() != n_cols) fail(context, "ragged rows");
        for (std::size_t k = 0; k < n_cols; ++k) {
            m(i, k) = complex_from_json(j[i][k], context + "[" + std::to_string(i) + "][" +
                                                     std::to_string(k) + "]");
        }
    }
    return m;
}

namespace {

std::vector<Index> dims_from_json(const json& j, const std::string& context) {
    const json& dims = field(j, "party_dims", context);
    if (!dims.is_array() || dims.size() < 2) fail(context, "party_dims needs >= 2 entries");
    std::vector<Index> out;
    for (const auto& d : dims) {
        if (!d.is_number_integer() || d.get<Index>() < 1) {
            fail(context, "party_dims entries must be positive integers");
        }
        out.push_back(d.get<Index>());
    }
    return out;
}

json amplitudes_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

Vector amplitudes_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) fail(context, "expected a non-empty array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(i) = complex_from_json(j[i], context + "[" + std::to_string(i) + "]");
    }
    return v;
}

json factors_to_json(const ProductOperator& op) {
    json arr = json::array();
    for (const auto& f : op.factors) arr.push_back(matrix_to_json(f));
    return arr;
}

ProductOperator factors_from_json(const json& j, const std::vector<Index>& dims,
                                  const std::string& context) {
    if (!j.is_array() || j.size() != dims.size()) {
        fail(context, "expected one factor per party");
    }
    std::vector<LocalOperator> factors;
    for (std::size_t p = 0; p < j.size(); ++p) {
        Matrix m = matrix_from_json(j[p], context + ", party " + std::to_string(p + 1));
        if (m.rows() != dims[p] || m.cols() != dims[p]) {
            fail(context, "factor dimension mismatch at party " + std::to_string(p + 1));
        }
        factors.push_back(std::move(m));
    }
    return ProductOperator(std::move(factors));
}

}  // namespace

json state_to_json(const std::vector<Index>& party_dims, const Vector& amplitudes) {
    return json{{"party_dims", party_dims}, {"amplitudes", amplitudes_to_json(amplitudes)}};
}

std::pair<std::vector<Index>, Vector> state_from_json(const json& j) {
    const std::string context = "state file";
    auto dims = dims_from_json(j, context);
    Vector amps = amplitudes_from_json(field(j, "amplitudes", context), context + ".amplitudes");
    Index total = 1;
    for (Index d : dims) total *= d;
    if (amps.size() != total) fail(context, "amplitude count does not match party_dims");
    return {std::move(dims), std::move(amps)};
}

json group_to_json(const StabilizerGroup& group) {
    json elements = json::array();
    for (const auto& element : group.elements) {
        elements.push_back(json{{"factors", factors_to_json(element.op)},
                                {"phase", complex_to_json(element.phase)}});
    }
    return json{{"party_dims", group.party_dims}, {"elements", std::move(elements)}};
}

StabilizerGroup group_from_json(const json& j, GroupMode mode) {
    const std::string context = "group file";
    StabilizerGroup group;
    group.party_dims = dims_from_json(j, context);
    group.mode = mode;
    const json& elements = field(j, "elements", context);
    if (!elements.is_array() || elements.empty()) fail(context, "elements must be non-empty");
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const std::string ectx = context + ", element " + std::to_string(e);
        StabilizerElement element;
        element.op = factors_from_json(field(elements[e], "factors", ectx), group.party_dims, ectx);
        element.phase = complex_from_json(field(elements[e], "phase", ectx), ectx + ".phase");
        group.elements.push_back(std::move(element));
    }
    return group;
}

json product_to_json(const std::vector<Index>& party_dims, const ProductOperator& op) {
    return json{{"party_dims", party_dims}, {"factors", factors_to_json(op)}};
}

std::pair<std::vector<Index>, ProductOperator> product_from_json(const json& j) {
    const std::string context = "operator file";
    auto dims = dims_from_json(j, context);
    auto op = factors_from_json(field(j, "factors", context), dims, context);
    return {std::move(dims), std::move(op)};
}

json tracked_to_json(const TrackedState& state) {
    return json{{"party_dims", state.seed()->party_dims},
                {"seed_amplitudes", amplitudes_to_json(state.seed()->amplitudes)},
                {"factors", factors_to_json(state.op())}};
}

TrackedStateFile tracked_from_json(const json& j) {
    const std::string context = "tracked state file";
    TrackedStateFile out;
    out.party_dims = dims_from_json(j, context);
    out.seed_amplitudes =
        amplitudes_from_json(field(j, "seed_amplitudes", context), context + ".seed_amplitudes");
    out.factors = factors_from_json(field(j, "factors", context), out.party_dims, context);
    Index total = 1;
    for (Index d : out.party_dims) total *= d;
    if (out.seed_amplitudes.size() != total) {
        fail(context, "seed amplitude count does not match party_dims");
    }
    return out;
}

namespace {

json node_to_json(const LoccNode& node) {
    if (node.is_leaf()) return json("leaf");
    const LoccRound& round = *node.round;
    json outcomes = json::array();
    for (const auto& outcome : round.outcomes) {
        json corrections = json::object();
        for (const auto& [party, u] : outcome.corrections) {
            corrections[std::to_string(party + 1)] = matrix_to_json(u);
        }
        outcomes.push_back(json{{"operator", matrix_to_json(outcome.op)},
                                {"corrections", std::move(corrections)},
                                {"child", node_to_json(*outcome.child)}});
    }
    return json{{"party", round.acting_party + 1}, {"outcomes", std::move(outcomes)}};
}

LoccNode node_from_json(const json& j, const std::string& context) {
    LoccNode node;
    if (j.is_string() && j.get<std::string>() == "leaf") return node;
    if (!j.is_object()) fail(context, "expected a node object or \"leaf\"");
    const json& party = field(j, "party", context);
    if (!party.is_number_integer() || party.get<int>() < 1) {
        fail(context, "party must be a 1-based integer");
    }
    LoccRound round;
    round.acting_party = static_cast<std::size_t>(party.get<int>() - 1);
    const json& outcomes = field(j, "outcomes", context);
    if (!outcomes.is_array() || outcomes.empty()) fail(context, "outcomes must be non-empty");
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
        const std::string octx = context + ".outcomes[" + std::to_string(o) + "]";
        LoccOutcome outcome;
        outcome.op = matrix_from_json(field(outcomes[o], "operator", octx), octx + ".operator");
        if (outcomes[o].contains("corrections")) {
            const json& corrections = outcomes[o]["corrections"];
            if (!corrections.is_object()) fail(octx, "corrections must be an object");
            for (auto it = corrections.begin(); it != corrections.end(); ++it) {
                int party_1based = 0;
                try {
                    party_1based = std::stoi(it.key());
                } catch (...) {
                    fail(octx, "correction key '" + it.key() + "' is not a party index");
                }
                if (party_1based < 1) fail(octx, "correction party must be 1-based");
                outcome.corrections[static_cast<std::size_t>(party_1based - 1)] =
                    matrix_from_json(it.value(), octx + ".corrections[" + it.key() + "]");
            }
        }
        const json& child = field(outcomes[o], "child", octx);
        outcome.child = std::make_shared<LoccNode>(node_from_json(child, octx + ".child"));
        round.outcomes.push_back(std::move(outcome));
    }
    node.round = std::move(round);
    return node;
}

}  // namespace

json protocol_to_json(const LoccNode& root) { return json{{"node", node_to_json(root)}}; }

LoccNode protocol_from_json(const json& j) {
    return node_from_json(field(j, "node", "protocol file"), "protocol file.node");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace loccforge::io
