#pragma once

#include <string>

#include <json.hpp>

#include "pathsum/matrix_spec.hpp"

namespace pathsum {

// Document shape:
//   { "n": 3, "interval": [0.0, 2.0],
//     "entries": [ {"row": 1, "col": 2, "expr": "t", "force_nonzero": true}, ... ] }
// Rows and columns are 1-based in the file. Validation errors name the
// offending key. force_nonzero overrides the numeric edge test in both
// directions when present.
MatrixSpec matrix_from_json(const nlohmann::json& doc);

MatrixSpec load_matrix_file(const std::string& path);

} // namespace pathsum
