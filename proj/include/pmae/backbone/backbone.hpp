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
#include <string>
#include <vector>

#include "pmae/embednet/embednet.hpp"
#include "pmae/geometry/geometry.hpp"
#include "pmae/masking/masking.hpp"
#include "pmae/numcore/layers.hpp"

namespace pmae {

/// Where mask tokens enter the autoencoder. `Encoder` is the ablation in which
/// mask tokens (with encoder positional embeddings) join the encoder input and
/// the decoder is bypassed.
enum class MaskTokenPlacement { Decoder, Encoder };

MaskTokenPlacement parse_placement(const std::string& text);
std::string to_string(MaskTokenPlacement placement);

struct BackboneConfig {
  std::size_t embed_dim = 384;
  std::size_t encoder_depth = 12;
  std::size_t decoder_depth = 4;
  std::size_t heads = 6;
  double mlp_ratio = 4.0;
  MaskTokenPlacement placement = MaskTokenPlacement::Decoder;
  PointNetWidths pointnet{};
  std::size_t pos_hidden = 128;
  double attn_dropout = 0.0;
  double mlp_dropout = 0.0;

  void validate() const;
};

/// Pre-norm Transformer block with the positional embedding added at the
/// attention input:
///   x <- x + MHSA(LN(x + pe));  x <- x + MLP(LN(x))
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t dim, std::size_t heads,
                   double mlp_ratio);

  Var forward(Graph& g, const ParamStore& store, const Var& x, const Var& pe, const ForwardContext& ctx) const;

  const LinearLayer& attn_proj() const noexcept { return proj_; }
  const LinearLayer& mlp_out() const noexcept { return fc2_; }

 private:
  std::size_t dim_ = 0;
  std::size_t heads_ = 0;
  LayerNormLayer norm1_, norm2_;
  LinearLayer qkv_, proj_, fc1_, fc2_;
};

/// A stack of blocks followed by a final layer norm.
class TransformerStack {
 public:
  TransformerStack() = default;
  TransformerStack(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t depth, std::size_t dim,
                   std::size_t heads, double mlp_ratio);

  Var forward(Graph& g, const ParamStore& store, Var x, const Var& pe, const ForwardContext& ctx) const;

  std::size_t depth() const noexcept { return blocks_.size(); }
  const TransformerBlock& block(std::size_t i) const { return blocks_.at(i); }

 private:
  std::vector<TransformerBlock> blocks_;
  LayerNormLayer norm_;
};

/// Everything one masked-reconstruction forward pass produces.
struct PretrainOutput {
  Var loss;              // mean per-patch Chamfer (raw, not x1000)
  Var predicted;         // mn x k x 3
  Var encoded;           // encoder output for the tokens it saw
  Var decoder_input;     // concat(T_e, T_m); invalid in encoder placement
  Var decoded_masked;    // H_m (or encoder outputs at mask slots)
  PatchSet patches;
  MaskSpec mask;
  SplitPatches split;
};

/// The masked autoencoder: patch embedding, two positional MLPs, shared mask
/// token, asymmetric encoder/decoder and the FC reconstruction head.
class PointMae {
 public:
  /// Registers parameters in `store` under fixed hierarchical names. Without
  /// `with_reconstruction` only the patch embedding, encoder positional MLP
  /// and encoder are created (the part kept for downstream tasks).
  PointMae(ParamStore& store, Rng& rng, const BackboneConfig& config, std::size_t points_per_patch,
           bool with_reconstruction = true);

  const BackboneConfig& config() const noexcept { return config_; }
  std::size_t points_per_patch() const noexcept { return k_; }

  /// pointnet_embed: v x k x 3 -> v x C.
  Var embed(Graph& g, const ParamStore& store, const Tensor& patches) const;
  /// positional_embed for the encoder or decoder parameter set.
  Var positional(Graph& g, const ParamStore& store, const Tensor& centers, bool decoder_side) const;
  /// expand_mask_tokens: count x C copies of the shared token.
  Var mask_tokens(Graph& g, const ParamStore& store, std::size_t count) const;

  /// Encoder over a token sequence. In decoder placement any Mask-role token
  /// is rejected, so the encoder never sees masked patches.
  TokenSequence encode(Graph& g, const ParamStore& store, const TokenSequence& input,
                       const ForwardContext& ctx) const;

  /// Decoder over concat(T_e, T_m) with decoder positional embeddings for
  /// `centers_all` (visible centers first, then masked). Returns H_m.
  Var decode(Graph& g, const ParamStore& store, const Var& encoded, const Var& mask_tokens,
             const Tensor& centers_all, const ForwardContext& ctx) const;

  /// FC C -> 3k and reshape to mn x k x 3.
  Var predict(Graph& g, const ParamStore& store, const Var& decoded) const;

  /// Patchify, mask, embed, encode, decode, predict, Chamfer against the
  /// masked ground truth. All randomness derives from `seed`.
  PretrainOutput pretrain_forward(Graph& g, const ParamStore& store, const PointCloud& cloud, std::size_t n,
                                  double ratio, MaskType mask_type, std::uint64_t seed,
                                  const ForwardContext& ctx) const;

  /// Same pipeline on an already built patch set and mask.
  PretrainOutput pretrain_forward(Graph& g, const ParamStore& store, PatchSet patches, MaskSpec mask,
                                  const ForwardContext& ctx) const;

  /// Encoder features for every patch (no masking): n x C.
  Var encode_all(Graph& g, const ParamStore& store, const PatchSet& patches, const ForwardContext& ctx) const;

  const TransformerStack& encoder() const noexcept { return encoder_; }
  const TransformerStack& decoder() const noexcept { return decoder_; }
  const MaskToken& mask_token() const noexcept { return mask_token_; }

 private:
  BackboneConfig config_;
  std::size_t k_;
  bool with_reconstruction_;
  PointNetEmbed pointnet_;
  PositionalEmbed pe_encoder_;
  PositionalEmbed pe_decoder_;
  MaskToken mask_token_;
  TransformerStack encoder_;
  TransformerStack decoder_;
  LinearLayer head_;
};

}  // namespace pmae
