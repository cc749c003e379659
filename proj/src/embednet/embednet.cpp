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

#include "pmae/embednet/embednet.hpp"

#include <stdexcept>
#include <string>

#include "pmae/numcore/ops.hpp"

namespace pmae {

void TokenSequence::validate() const {
  if (!tokens.valid()) throw std::invalid_argument("token sequence: no tokens");
  if (tokens.rows() != roles.size() || centers.rows() != roles.size() || centers.cols() != 3) {
    throw ShapeError("token sequence: " + std::to_string(tokens.rows()) + " tokens, centers " +
                     shape_str(centers.shape()) + ", " + std::to_string(roles.size()) + " roles");
  }
}

PointNetEmbed::PointNetEmbed(ParamStore& store, Rng& rng, const std::string& prefix, PointNetWidths w,
                             std::size_t out_dim)
    : local1_(LinearLayer::create(store, rng, prefix + ".local1", 3, w.hidden1)),
      local2_(LinearLayer::create(store, rng, prefix + ".local2", w.hidden1, w.hidden2)),
      global1_(LinearLayer::create(store, rng, prefix + ".global1", 2 * w.hidden2, w.hidden3)),
      global2_(LinearLayer::create(store, rng, prefix + ".global2", w.hidden3, out_dim)),
      norm1_(LayerNormLayer::create(store, prefix + ".norm1", w.hidden1)),
      norm2_(LayerNormLayer::create(store, prefix + ".norm2", w.hidden3)),
      out_dim_(out_dim) {}

Var PointNetEmbed::forward(Graph& g, const ParamStore& store, const Tensor& patches) const {
  if (patches.rank() != 3 || patches.dim(2) != 3 || patches.dim(1) == 0) {
    throw ShapeError("pointnet_embed: expected v x k x 3 patches with k >= 1, got " + shape_str(patches.shape()));
  }
  const std::size_t v = patches.dim(0), k = patches.dim(1);
  const Var pts = g.constant(patches.reshaped(Shape{v * k, 3}));
  const Var local = local2_(g, store, ops::gelu(norm1_(g, store, local1_(g, store, pts))));
  const Var pooled = ops::max_pool_rows(local, k);

  std::vector<std::size_t> owner(v * k);
  for (std::size_t i = 0; i < v * k; ++i) owner[i] = i / k;
  const Var parts[] = {ops::gather_rows(pooled, owner), local};
  const Var joint = ops::concat_cols(parts);
  const Var feat = global2_(g, store, ops::gelu(norm2_(g, store, global1_(g, store, joint))));
  return ops::max_pool_rows(feat, k);
}

PositionalEmbed::PositionalEmbed(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t hidden,
                                 std::size_t out_dim)
    : fc1_(LinearLayer::create(store, rng, prefix + ".fc1", 3, hidden)),
      fc2_(LinearLayer::create(store, rng, prefix + ".fc2", hidden, out_dim)) {}

Var PositionalEmbed::forward(Graph& g, const ParamStore& store, const Tensor& centers) const {
  if (centers.rank() != 2 || centers.cols() != 3) {
    throw ShapeError("positional_embed: centers must be count x 3, got " + shape_str(centers.shape()));
  }
  return fc2_(g, store, ops::gelu(fc1_(g, store, g.constant(centers))));
}

MaskToken::MaskToken(ParamStore& store, Rng& rng, const std::string& name, std::size_t dim)
    : param_(store.add(name, init_truncated_normal(rng, Shape{1, dim}))) {}

Var MaskToken::expand(Graph& g, const ParamStore& store, std::size_t count) const {
  const std::vector<std::size_t> zeros(count, 0);
  return ops::gather_rows(g.parameter(store, param_), zeros);
}

}  // namespace pmae
