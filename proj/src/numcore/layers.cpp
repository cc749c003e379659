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

#include "pmae/numcore/layers.hpp"

#include "pmae/numcore/ops.hpp"

namespace pmae {

LinearLayer LinearLayer::create(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t in_dim,
                                std::size_t out_dim) {
  LinearLayer l;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.weight = store.add(prefix + ".weight", init_truncated_normal(rng, Shape{in_dim, out_dim}));
  l.bias = store.add(prefix + ".bias", init_constant(Shape{out_dim}, 0.0));
  return l;
}

Var LinearLayer::operator()(Graph& g, const ParamStore& store, const Var& x) const {
  return ops::linear(x, g.parameter(store, weight), g.parameter(store, bias));
}

LayerNormLayer LayerNormLayer::create(ParamStore& store, const std::string& prefix, std::size_t dim) {
  LayerNormLayer l;
  l.gain = store.add(prefix + ".gain", init_constant(Shape{dim}, 1.0));
  l.bias = store.add(prefix + ".bias", init_constant(Shape{dim}, 0.0));
  return l;
}

Var LayerNormLayer::operator()(Graph& g, const ParamStore& store, const Var& x) const {
  return ops::layer_norm(x, g.parameter(store, gain), g.parameter(store, bias), 1e-5);
}

}  // namespace pmae
