#pragma once

// JSON schema for system definitions (all matrices are nested row arrays):
//
//   {
//     "modes":     [ {"A": [[..]], "B": [[..]], "g": [..]}, ... ],
//     "partition": [ [ {"axis": 0, "op": "<=", "bound": -1.0}, ... ], ... ],
//     "domain":    {"lower": [..], "upper": [..]},
//     "input_box": {"lower": [..], "upper": [..]},
//     "noise_box": {"lower": [..], "upper": [..]}   or one such object per mode,
//     "cost_Q":    [[..]]                           (n_x + n_u + 1 square)
//   }
//
// partition[i] is the conjunction of half-spaces selecting mode i; "op" is one
// of "<=", "<", ">=", ">". An empty list selects the whole space.

#include "json.hpp"

#include "sfa/pwa_model.hpp"

namespace sfa {

Box box_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json box_to_json(const Box& box);

AffineMode mode_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json mode_to_json(const AffineMode& mode);

PwaSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const PwaSystem& system);

// Reads "cost_Q" and factors it.
CostModel cost_from_json(const nlohmann::json& j);

}  // namespace sfa
