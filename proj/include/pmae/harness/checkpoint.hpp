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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmae/harness/config.hpp"
#include "pmae/numcore/optim.hpp"
#include "pmae/numcore/params.hpp"

namespace pmae {

struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

/// Parameters, optimizer moments, config and loop position. All randomness
/// in the loops is derived from (config.seed, epoch, step), so this is the
/// complete RNG state as well.
struct Checkpoint {
  std::string kind = "pretrain";  // "pretrain" | "classifier"
  RunConfig config;
  std::size_t epoch = 0;          // epochs completed
  std::uint64_t step = 0;         // optimizer steps taken
  std::size_t num_classes = 0;    // classifier only
  ParamStore params;
  std::optional<OptimizerState> optimizer;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Copy every tensor of `src` whose name exists in `dst` and passes `keep`;
/// shapes must agree. Returns the number copied.
template <typename Pred>
std::size_t copy_matching(ParamStore& dst, const ParamStore& src, Pred keep) {
  std::size_t copied = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::string& name = src.name(i);
    if (!keep(name) || !dst.contains(name)) continue;
    Tensor& target = dst[name];
    if (target.shape() != src.value(i).shape()) {
      throw ShapeError("checkpoint tensor '" + name + "' has shape " + shape_str(src.value(i).shape()) +
                       ", model expects " + shape_str(target.shape()));
    }
    target = src.value(i);
    ++copied;
  }
  return copied;
}

}  // namespace pmae
