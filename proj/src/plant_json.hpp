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

#include <string>

#include "ddd/lti_lab.hpp"
#include "json_util.hpp"

namespace ddd::detail {

/// Incremental reader of the plant keys shared by every config file.
class PlantParser {
 public:
  explicit PlantParser(std::string where) : where_(std::move(where)) {}

  /// Consumes a plant key; returns false when the key is not a plant key.
  bool accept(const std::string& key, const json& value);

  /// Applies defaults (Q = I, R = I for custom plants) and validates.
  PlantConfig finish();

 private:
  std::string where_;
  PlantConfig cfg_{paper41(), paper_weights()};
  bool have_plant_ = false;
  bool custom_ = false;
  bool have_Q_ = false;
  bool have_R_ = false;
};

}  // namespace ddd::detail
