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

#include "pmae/numcore/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pmae {

AdamW::AdamW(const ParamStore& store, AdamWConfig config) : config_(config) {
  m_.reserve(store.size());
  v_.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    m_.emplace_back(store.value(i).shape(), 0.0);
    v_.emplace_back(store.value(i).shape(), 0.0);
  }
}

void AdamW::step(ParamStore& store, const ParamGrads& grads, double lr) {
  if (grads.grads.size() != store.size() || m_.size() != store.size()) {
    throw ShapeError("adamw: parameter count mismatch");
  }
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (grads.grads[i].shape() != store.value(i).shape()) {
      throw ShapeError("adamw: gradient for '" + store.name(i) + "' has shape " + shape_str(grads.grads[i].shape()) +
                       ", parameter has " + shape_str(store.value(i).shape()));
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < store.size(); ++i) {
    double* p = store.value(i).data();
    const double* g = grads.grads[i].data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t j = 0; j < store.value(i).numel(); ++j) {
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p[j] -= lr * (m_hat / (std::sqrt(v_hat) + config_.eps) + config_.weight_decay * p[j]);
    }
  }
}

void AdamW::restore(std::uint64_t step, std::vector<Tensor> m, std::vector<Tensor> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) throw ShapeError("adamw: restored state size mismatch");
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (m[i].shape() != m_[i].shape() || v[i].shape() != v_[i].shape()) {
      throw ShapeError("adamw: restored moment shape mismatch at index " + std::to_string(i));
    }
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

double cosine_lr(std::uint64_t step, std::uint64_t total_steps, double lr_max, double lr_min,
                 std::uint64_t warmup_steps) {
  if (warmup_steps >= total_steps) {
    throw std::invalid_argument("cosine_lr: warmup_steps (" + std::to_string(warmup_steps) +
                                ") must be below total_steps (" + std::to_string(total_steps) + ")");
  }
  if (step > total_steps) throw std::invalid_argument("cosine_lr: step beyond total_steps");
  if (step < warmup_steps) return lr_max * static_cast<double>(step) / static_cast<double>(warmup_steps);
  const double t = static_cast<double>(step - warmup_steps);
  const double span = static_cast<double>(total_steps - warmup_steps);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * t / span));
}

}  // namespace pmae
