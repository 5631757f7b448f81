#pragma once

#include <string>

#include "json.hpp"

#include "sfa/linalg.hpp"

namespace sfa {

// Matrices travel as nested row arrays [[a, b], [c, d]]; vectors as flat arrays.
nlohmann::json matrix_to_json(const Matrix& M);
nlohmann::json vector_to_json(const Vector& v);

// `what` names the field in error messages. A scalar is accepted as a 1x1 matrix.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);
Vector vector_from_json(const nlohmann::json& j, const std::string& what);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j, int indent = 2);

}  // namespace sfa
