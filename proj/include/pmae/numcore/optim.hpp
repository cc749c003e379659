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
#include <vector>

#include "pmae/numcore/params.hpp"

namespace pmae {

struct AdamWConfig {
  double weight_decay = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AdamW with decoupled weight decay:
///   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
class AdamW {
 public:
  AdamW(const ParamStore& store, AdamWConfig config);

  void step(ParamStore& store, const ParamGrads& grads, double lr);

  const AdamWConfig& config() const noexcept { return config_; }
  std::uint64_t steps() const noexcept { return step_; }

  std::vector<Tensor>& first_moments() noexcept { return m_; }
  std::vector<Tensor>& second_moments() noexcept { return v_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

  /// Restore a saved state; moment shapes must match the current store.
  void restore(std::uint64_t step, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  AdamWConfig config_;
  std::uint64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

/// Linear warmup from 0 to lr_max over `warmup_steps`, then cosine decay to
/// lr_min at `total_steps`.
double cosine_lr(std::uint64_t step, std::uint64_t total_steps, double lr_max, double lr_min,
                 std::uint64_t warmup_steps);

}  // namespace pmae
