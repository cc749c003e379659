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

#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pmae/numcore/rng.hpp"
#include "pmae/numcore/tensor.hpp"

namespace pmae {

/// Named trainable tensors in registration order.
///
/// Tensors live in a deque so references handed to a Graph stay valid while
/// further parameters are registered.
class ParamStore {
 public:
  /// Register a new parameter; throws if the name is taken.
  std::size_t add(std::string name, Tensor init);

  std::size_t size() const noexcept { return values_.size(); }
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  const std::string& name(std::size_t i) const { return names_.at(i); }
  Tensor& value(std::size_t i) { return values_.at(i); }
  const Tensor& value(std::size_t i) const { return values_.at(i); }
  Tensor& operator[](std::string_view name) { return values_[index_of(name)]; }
  const Tensor& operator[](std::string_view name) const { return values_[index_of(name)]; }

  std::size_t total_elements() const;

  /// Bit-exact binary round trip (checkpoint container, parameters only).
  std::string serialize() const;
  static ParamStore deserialize(std::string_view bytes);

  friend bool operator==(const ParamStore& a, const ParamStore& b);

 private:
  std::vector<std::string> names_;
  std::deque<Tensor> values_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Weight initializers.
Tensor init_truncated_normal(Rng& rng, Shape shape, double stddev = 0.02);
Tensor init_constant(Shape shape, double value);

/// Gradient buffers aligned with a ParamStore's registration order.
struct ParamGrads {
  std::vector<Tensor> grads;

  static ParamGrads zeros_like(const ParamStore& store);
  void zero();
  /// this += other, elementwise in registration order.
  void accumulate(const ParamGrads& other);
  void scale(double factor);
  bool all_finite() const;
};

}  // namespace pmae
