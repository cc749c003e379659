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
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmae/numcore/params.hpp"
#include "pmae/numcore/tensor.hpp"

namespace pmae {

class Graph;

/// Handle to a value recorded on a Graph.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
  bool valid() const noexcept { return graph_ != nullptr; }
  Graph& graph() const { return *graph_; }
  std::size_t id() const noexcept { return id_; }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

/// Backward rule for one op. `input_grads[i]` is null when input i needs no
/// gradient; otherwise the rule adds its contribution into it.
using BackwardFn =
    std::function<void(const Tensor& output, const Tensor& grad_output, std::span<Tensor* const> input_grads)>;

/// Append-only tape of one forward pass.
///
/// A graph is single-use: backward() consumes it. Graphs are independent of
/// each other and may be built concurrently on separate threads.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);

  /// Free leaf that requires grad but is not a stored parameter; its gradient
  /// is read back with grad() after backward().
  Var variable(Tensor value);

  /// Leaf bound to a stored parameter (no copy). Repeated calls with the same
  /// parameter return the same leaf.
  Var parameter(const ParamStore& store, std::string_view name);
  Var parameter(const ParamStore& store, std::size_t index);

  /// Record an op result. Finite-checks the value; the node keeps a backward
  /// rule only if some input requires grad.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward, std::string_view op);

  /// Reverse-mode sweep from a scalar loss. Gradients of stored parameters are
  /// added into `grads` (which must be aligned with the graph's store).
  void backward(const Var& loss, ParamGrads& grads);

  /// Convenience: fresh zero-initialized gradients for every parameter (empty
  /// when the graph holds no parameters).
  ParamGrads backward(const Var& loss);

  bool consumed() const noexcept { return consumed_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient of any recorded value after backward(); zeros if none flowed.
  const Tensor& grad(const Var& v) const;

 private:
  friend class Var;

  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    std::ptrdiff_t param = -1;
    std::string_view op;

    const Tensor& val() const { return external ? *external : value; }
  };

  const Node& node(const Var& v) const;

  std::deque<Node> nodes_;
  std::deque<Tensor> grads_;
  std::unordered_map<std::size_t, std::size_t> param_nodes_;
  const ParamStore* store_ = nullptr;
  bool consumed_ = false;
};

}  // namespace pmae
