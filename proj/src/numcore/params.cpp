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

#include "pmae/numcore/params.hpp"

#include <sstream>
#include <stdexcept>

#include "pmae/numcore/container.hpp"

namespace pmae {

std::size_t ParamStore::add(std::string name, Tensor init) {
  if (index_.contains(name)) throw std::invalid_argument("param store: duplicate parameter '" + name + "'");
  const std::size_t i = values_.size();
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return i;
}

bool ParamStore::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t ParamStore::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("param store: unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const Tensor& t : values_) n += t.numel();
  return n;
}

std::string ParamStore::serialize() const {
  std::vector<std::pair<std::string, const Tensor*>> table;
  for (std::size_t i = 0; i < size(); ++i) table.emplace_back(names_[i], &values_[i]);
  std::ostringstream os(std::ios::binary);
  write_container(os, {{"kind", "param_store"}}, table);
  return os.str();
}

ParamStore ParamStore::deserialize(std::string_view bytes) {
  std::istringstream is(std::string(bytes), std::ios::binary);
  Container c = read_container(is);
  ParamStore store;
  for (auto& [name, t] : c.tensors) store.add(name, std::move(t));
  return store;
}

bool operator==(const ParamStore& a, const ParamStore& b) {
  if (a.names_ != b.names_) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.values_[i] == b.values_[i])) return false;
  }
  return true;
}

Tensor init_truncated_normal(Rng& rng, Shape shape, double stddev) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.truncated_normal(stddev);
  return t;
}

Tensor init_constant(Shape shape, double value) { return Tensor(std::move(shape), value); }

ParamGrads ParamGrads::zeros_like(const ParamStore& store) {
  ParamGrads g;
  g.grads.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) g.grads.emplace_back(store.value(i).shape(), 0.0);
  return g;
}

void ParamGrads::zero() {
  for (Tensor& t : grads) t.fill(0.0);
}

void ParamGrads::accumulate(const ParamGrads& other) {
  if (other.grads.size() != grads.size()) throw ShapeError("param grads: size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].numel() != other.grads[i].numel()) throw ShapeError("param grads: shape mismatch");
    double* dst = grads[i].data();
    const double* src = other.grads[i].data();
    for (std::size_t j = 0; j < grads[i].numel(); ++j) dst[j] += src[j];
  }
}

void ParamGrads::scale(double factor) {
  for (Tensor& t : grads) {
    for (double& v : t.values()) v *= factor;
  }
}

bool ParamGrads::all_finite() const {
  for (const Tensor& t : grads) {
    if (!t.all_finite()) return false;
  }
  return true;
}

}  // namespace pmae
