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

#include <string>
#include <vector>

#include "pmae/numcore/layers.hpp"

namespace pmae {

enum class TokenRole { Visible, Mask, Encoded, Decoded };

/// Token embeddings with their aligned patch centers.
struct TokenSequence {
  Var tokens;      // count x C
  Tensor centers;  // count x 3
  std::vector<TokenRole> roles;

  std::size_t size() const noexcept { return roles.size(); }
  /// Throws unless tokens, centers and roles agree on the count.
  void validate() const;
};

/// Widths of the mini PointNet: 3 -> h1 -> h2, max-pool, concat [global, local]
/// (2*h2) -> h3 -> C, max-pool.
struct PointNetWidths {
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 256;
  std::size_t hidden3 = 512;
};

/// Permutation-invariant patch embedding.
class PointNetEmbed {
 public:
  PointNetEmbed() = default;
  PointNetEmbed(ParamStore& store, Rng& rng, const std::string& prefix, PointNetWidths widths, std::size_t out_dim);

  /// v x k x 3 center-normalized patches -> v x C tokens.
  Var forward(Graph& g, const ParamStore& store, const Tensor& patches) const;

  std::size_t out_dim() const noexcept { return out_dim_; }

 private:
  LinearLayer local1_, local2_, global1_, global2_;
  LayerNormLayer norm1_, norm2_;
  std::size_t out_dim_ = 0;
};

/// Center coordinates -> C via 3 -> hidden -> C with GELU in between.
class PositionalEmbed {
 public:
  PositionalEmbed() = default;
  PositionalEmbed(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t hidden, std::size_t out_dim);

  Var forward(Graph& g, const ParamStore& store, const Tensor& centers) const;

 private:
  LinearLayer fc1_, fc2_;
};

/// The single learnable C-vector substituted for every masked patch.
class MaskToken {
 public:
  MaskToken() = default;
  MaskToken(ParamStore& store, Rng& rng, const std::string& name, std::size_t dim);

  /// count x C, every row the shared token. Gradients from all rows sum into it.
  Var expand(Graph& g, const ParamStore& store, std::size_t count) const;

  std::size_t param_index() const noexcept { return param_; }

 private:
  std::size_t param_ = 0;
};

}  // namespace pmae
