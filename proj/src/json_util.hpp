/*
 Copyright 2026 The ddd-lqr-lab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <json.hpp>

#include <string>

#include "ddd/error.hpp"
#include "ddd/linalg.hpp"

namespace ddd::detail {

using json = nlohmann::json;

/// Accepts a scalar (1x1) or an array of equal-length row arrays.
inline Matrix matrix_from_json(const json& j, const std::string& key) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(ErrorKind::Config, "key '" + key + "': expected a number or array of rows");
  if (j.front().is_number()) {
    // A flat array is a single row.
    Matrix m(1, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
      if (!j[c].is_number()) fail(ErrorKind::Config, "key '" + key + "': non-numeric entry");
      m(0, static_cast<Eigen::Index>(c)) = j[c].get<double>();
    }
    return m;
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(ErrorKind::Config, "key '" + key + "': ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) fail(ErrorKind::Config, "key '" + key + "': non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double number_from_json(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorKind::Config, "key '" + key + "': expected a number");
  return j.get<double>();
}

}  // namespace ddd::detail
