#pragma once

#include <string>

#include <json.hpp>

#include "rbody/model.hpp"

namespace rbody {

// JSON model description:
//   { "beta": 2, "N": 100, "r": 2 (optional check),
//     "segments": [[-3, -0.1], [0.1, 3]],
//     "filling": [0.5, 0.5] (optional: fixed filling fractions),
//     "potential": { "type": "polynomial_sum",
//                    "terms": [ {"arity": 1, "coeff": -1, "factors": [[0, 0, 1]]}, ... ] }
//              or  { "type": "sinh" | "onmodel" | "qdeformed", "strength", "n", "q", "one_body": [coeffs] },
//     "numerics": { "nodes", "cheb_degree", "segment_nodes", "contour_levels", "quad_tol", "tol_eq", "max_outer" } }
ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ModelConfig& cfg);

// FNV-1a over the canonical dump of the parsed configuration.
std::string config_hash(const nlohmann::json& j);

// Exit codes: 0 ok, 2 configuration (and missing dependencies), 3 numerical failure, 4 verification mismatch.
int exit_code(ErrorKind k);

}  // namespace rbody
