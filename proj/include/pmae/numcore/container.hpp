// Copyright 2026 The pmae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pmae/numcore/tensor.hpp"

namespace pmae {

/// Binary tensor container:
///
///   8 bytes   magic "PMAECKPT"
///   8 bytes   little-endian u64 header length H
///   H bytes   UTF-8 JSON header; header["tensors"] lists {name, shape}
///   payload   little-endian IEEE-754 doubles for each tensor in header order
///
/// Used for parameter stores and training checkpoints.
struct Container {
  nlohmann::json meta;  // header minus the "tensors" table
  std::vector<std::pair<std::string, Tensor>> tensors;
};

void write_container(std::ostream& out, const nlohmann::json& meta,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors);
Container read_container(std::istream& in);

void write_container_file(const std::string& path, const nlohmann::json& meta,
                          const std::vector<std::pair<std::string, const Tensor*>>& tensors);
Container read_container_file(const std::string& path);

}  // namespace pmae
