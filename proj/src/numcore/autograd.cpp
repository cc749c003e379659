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

#include "pmae/numcore/autograd.hpp"

#include <stdexcept>
#include <string>

namespace pmae {

const Tensor& Var::value() const { return graph_->node(*this).val(); }

bool Var::requires_grad() const { return graph_->node(*this).requires_grad; }

const Graph::Node& Graph::node(const Var& v) const {
  if (v.graph_ != this) throw std::logic_error("graph: value belongs to a different graph");
  return nodes_[v.id_];
}

Var Graph::constant(Tensor value) {
  if (!value.all_finite()) throw NumericalError("graph: non-finite constant");
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.op = "constant";
  return Var(this, nodes_.size() - 1);
}

Var Graph::variable(Tensor value) {
  if (!value.all_finite()) throw NumericalError("graph: non-finite variable");
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = true;
  n.op = "variable";
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(const ParamStore& store, std::string_view name) {
  return parameter(store, store.index_of(name));
}

Var Graph::parameter(const ParamStore& store, std::size_t index) {
  if (store_ == nullptr) store_ = &store;
  if (store_ != &store) throw std::logic_error("graph: parameters must come from a single store");
  if (auto it = param_nodes_.find(index); it != param_nodes_.end()) return Var(this, it->second);
  Node& n = nodes_.emplace_back();
  n.external = &store.value(index);
  n.requires_grad = true;
  n.param = static_cast<std::ptrdiff_t>(index);
  n.op = "parameter";
  param_nodes_.emplace(index, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::vector<Var> inputs, BackwardFn backward, std::string_view op) {
  if (consumed_) throw std::logic_error("graph: cannot record after backward");
  if (!value.all_finite()) {
    throw NumericalError(std::string("non-finite value produced by ") + std::string(op) + " with shape " +
                         shape_str(value.shape()));
  }
  Node n;
  n.value = std::move(value);
  n.op = op;
  n.inputs.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.graph_ != this) throw std::logic_error("graph: input from a different graph in " + std::string(op));
    n.inputs.push_back(in.id_);
    n.requires_grad = n.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

ParamGrads Graph::backward(const Var& loss) {
  ParamGrads grads = store_ ? ParamGrads::zeros_like(*store_) : ParamGrads{};
  backward(loss, grads);
  return grads;
}

void Graph::backward(const Var& loss, ParamGrads& grads) {
  if (consumed_) throw std::logic_error("backward: graph already consumed");
  const Node& root = node(loss);
  if (root.val().numel() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " + shape_str(root.val().shape()));
  }
  if (store_ != nullptr && grads.grads.size() != store_->size()) {
    throw ShapeError("backward: gradient buffer does not match the parameter store");
  }
  consumed_ = true;
  grads_.assign(nodes_.size(), Tensor());
  grads_[loss.id_] = Tensor(root.val().shape(), 1.0);

  std::vector<Tensor*> input_grads;
  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (grads_[id].empty() || !n.requires_grad) continue;
    if (n.param >= 0) {
      Tensor& dst = grads.grads[static_cast<std::size_t>(n.param)];
      const Tensor& src = grads_[id];
      for (std::size_t i = 0; i < src.numel(); ++i) dst[i] += src[i];
      continue;
    }
    if (!n.backward) continue;
    input_grads.assign(n.inputs.size(), nullptr);
    for (std::size_t i = 0; i < n.inputs.size(); ++i) {
      const std::size_t in = n.inputs[i];
      if (!nodes_[in].requires_grad) continue;
      const Tensor& in_value = nodes_[in].val();
      if (grads_[in].numel() != in_value.numel() || grads_[in].shape() != in_value.shape()) {
        grads_[in] = Tensor(in_value.shape(), 0.0);
      }
      input_grads[i] = &grads_[in];
    }
    n.backward(n.val(), grads_[id], input_grads);
  }
}

const Tensor& Graph::grad(const Var& v) const {
  static const Tensor kEmpty;
  if (v.id_ >= grads_.size()) return kEmpty;
  return grads_[v.id_];
}

}  // namespace pmae
