// io.hpp — JSON serialization for states, stabilizer groups, product
// operators, tracked states, and protocol trees. Complex numbers are
// [re, im] pairs; party indices in protocol files are 1-based.

#pragma once

#include "loccforge/protocol.hpp"
#include "loccforge/seed_states.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace loccforge::io {

using nlohmann::json;

json complex_to_json(const Complex& z);
Complex complex_from_json(const json& j, const std::string& context);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& context);

// State file: { "party_dims": [...], "amplitudes": [[re,im], ...] }
json state_to_json(const std::vector<Index>& party_dims, const Vector& amplitudes);
std::pair<std::vector<Index>, Vector> state_from_json(const json& j);

// Group file: { "party_dims": [...],
//               "elements": [ { "factors": [matrix, ...], "phase": [re,im] } ] }
json group_to_json(const StabilizerGroup& group);
StabilizerGroup group_from_json(const json& j, GroupMode mode);

// Operator file: { "party_dims": [...], "factors": [matrix, ...] }
json product_to_json(const std::vector<Index>& party_dims, const ProductOperator& op);
std::pair<std::vector<Index>, ProductOperator> product_from_json(const json& j);

// Tracked state file: { "party_dims": [...], "seed_amplitudes": [...],
//                       "factors": [matrix, ...] }
json tracked_to_json(const TrackedState& state);
struct TrackedStateFile {
    std::vector<Index> party_dims;
    Vector seed_amplitudes;
    ProductOperator factors;
};
TrackedStateFile tracked_from_json(const json& j);

// Protocol file: { "node": { "party": <1-based>, "outcomes": [ {
//   "operator": matrix, "corrections": { "<party>": matrix },
//   "child": "leaf" | node } ] } }
json protocol_to_json(const LoccNode& root);
LoccNode protocol_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace loccforge::io
