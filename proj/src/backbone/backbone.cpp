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

#include "pmae/backbone/backbone.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pmae/numcore/ops.hpp"

namespace pmae {

MaskTokenPlacement parse_placement(const std::string& text) {
  if (text == "decoder") return MaskTokenPlacement::Decoder;
  if (text == "encoder") return MaskTokenPlacement::Encoder;
  throw std::invalid_argument("unknown mask token placement '" + text + "' (expected decoder|encoder)");
}

std::string to_string(MaskTokenPlacement placement) {
  return placement == MaskTokenPlacement::Decoder ? "decoder" : "encoder";
}

void BackboneConfig::validate() const {
  if (embed_dim == 0 || heads == 0 || embed_dim % heads != 0) {
    throw std::invalid_argument("backbone: embed_dim " + std::to_string(embed_dim) + " not divisible by heads " +
                                std::to_string(heads));
  }
  if (encoder_depth < 1 || decoder_depth < 1) throw std::invalid_argument("backbone: depths must be >= 1");
  if (!(mlp_ratio > 0.0)) throw std::invalid_argument("backbone: mlp_ratio must be positive");
  if (pointnet.hidden1 == 0 || pointnet.hidden2 == 0 || pointnet.hidden3 == 0 || pos_hidden == 0) {
    throw std::invalid_argument("backbone: hidden widths must be positive");
  }
  if (attn_dropout < 0.0 || attn_dropout >= 1.0 || mlp_dropout < 0.0 || mlp_dropout >= 1.0) {
    throw std::invalid_argument("backbone: dropout rates must lie in [0, 1)");
  }
}

TransformerBlock::TransformerBlock(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t dim,
                                   std::size_t heads, double mlp_ratio)
    : dim_(dim),
      heads_(heads),
      norm1_(LayerNormLayer::create(store, prefix + ".norm1", dim)),
      norm2_(LayerNormLayer::create(store, prefix + ".norm2", dim)),
      qkv_(LinearLayer::create(store, rng, prefix + ".attn.qkv", dim, 3 * dim)),
      proj_(LinearLayer::create(store, rng, prefix + ".attn.proj", dim, dim)),
      fc1_(LinearLayer::create(store, rng, prefix + ".mlp.fc1", dim,
                               static_cast<std::size_t>(std::llround(mlp_ratio * static_cast<double>(dim))))),
      fc2_(LinearLayer::create(store, rng, prefix + ".mlp.fc2", fc1_.out_dim, dim)) {}

Var TransformerBlock::forward(Graph& g, const ParamStore& store, const Var& x, const Var& pe,
                              const ForwardContext& ctx) const {
  if (x.shape() != pe.shape() || x.cols() != dim_) {
    throw ShapeError("transformer_block: tokens " + shape_str(x.shape()) + " vs positional " + shape_str(pe.shape()) +
                     " (dim " + std::to_string(dim_) + ")");
  }
  auto drop = [&](const Var& v, double p) {
    return (ctx.training && p > 0.0) ? ops::dropout(v, p, true, *ctx.rng) : v;
  };

  const Var h = norm1_(g, store, ops::add(x, pe));
  const Var qkv = qkv_(g, store, h);
  const std::size_t dh = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  heads.reserve(heads_);
  for (std::size_t i = 0; i < heads_; ++i) {
    const Var q = ops::slice_cols(qkv, i * dh, dh);
    const Var k = ops::slice_cols(qkv, dim_ + i * dh, dh);
    const Var v = ops::slice_cols(qkv, 2 * dim_ + i * dh, dh);
    const Var att = drop(ops::softmax(ops::scale(ops::matmul(q, ops::transpose(k)), scale)), ctx.attn_dropout);
    heads.push_back(ops::matmul(att, v));
  }
  const Var attn = drop(proj_(g, store, ops::concat_cols(heads)), ctx.mlp_dropout);
  const Var x1 = ops::add(x, attn);
  const Var mlp = drop(fc2_(g, store, drop(ops::gelu(fc1_(g, store, norm2_(g, store, x1))), ctx.mlp_dropout)),
                       ctx.mlp_dropout);
  return ops::add(x1, mlp);
}

TransformerStack::TransformerStack(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t depth,
                                   std::size_t dim, std::size_t heads, double mlp_ratio) {
  for (std::size_t i = 0; i < depth; ++i) {
    blocks_.emplace_back(store, rng, prefix + ".blocks." + std::to_string(i), dim, heads, mlp_ratio);
  }
  norm_ = LayerNormLayer::create(store, prefix + ".norm", dim);
}

Var TransformerStack::forward(Graph& g, const ParamStore& store, Var x, const Var& pe,
                              const ForwardContext& ctx) const {
  for (const TransformerBlock& b : blocks_) x = b.forward(g, store, x, pe, ctx);
  return norm_(g, store, x);
}

PointMae::PointMae(ParamStore& store, Rng& rng, const BackboneConfig& config, std::size_t points_per_patch,
                   bool with_reconstruction)
    : config_(config), k_(points_per_patch), with_reconstruction_(with_reconstruction) {
  config_.validate();
  if (k_ == 0) throw std::invalid_argument("backbone: points per patch must be positive");
  const std::size_t c = config_.embed_dim;
  pointnet_ = PointNetEmbed(store, rng, "embed", config_.pointnet, c);
  pe_encoder_ = PositionalEmbed(store, rng, "pe_encoder", config_.pos_hidden, c);
  encoder_ = TransformerStack(store, rng, "encoder", config_.encoder_depth, c, config_.heads, config_.mlp_ratio);
  if (!with_reconstruction_) return;
  pe_decoder_ = PositionalEmbed(store, rng, "pe_decoder", config_.pos_hidden, c);
  mask_token_ = MaskToken(store, rng, "mask_token", c);
  decoder_ = TransformerStack(store, rng, "decoder", config_.decoder_depth, c, config_.heads, config_.mlp_ratio);
  head_ = LinearLayer::create(store, rng, "head", c, 3 * k_);
}

Var PointMae::embed(Graph& g, const ParamStore& store, const Tensor& patches) const {
  return pointnet_.forward(g, store, patches);
}

Var PointMae::positional(Graph& g, const ParamStore& store, const Tensor& centers, bool decoder_side) const {
  if (decoder_side && !with_reconstruction_) throw std::logic_error("backbone: model has no decoder");
  return (decoder_side ? pe_decoder_ : pe_encoder_).forward(g, store, centers);
}

Var PointMae::mask_tokens(Graph& g, const ParamStore& store, std::size_t count) const {
  if (!with_reconstruction_) throw std::logic_error("backbone: model has no mask token");
  return mask_token_.expand(g, store, count);
}

TokenSequence PointMae::encode(Graph& g, const ParamStore& store, const TokenSequence& input,
                               const ForwardContext& ctx) const {
  input.validate();
  if (config_.placement == MaskTokenPlacement::Decoder) {
    for (TokenRole r : input.roles) {
      if (r == TokenRole::Mask) {
        throw std::invalid_argument("encode: mask tokens may not enter the encoder in decoder placement");
      }
    }
  }
  const Var pe = positional(g, store, input.centers, false);
  TokenSequence out{encoder_.forward(g, store, input.tokens, pe, ctx), input.centers,
                    std::vector<TokenRole>(input.size(), TokenRole::Encoded)};
  return out;
}

Var PointMae::decode(Graph& g, const ParamStore& store, const Var& encoded, const Var& mask_tokens,
                     const Tensor& centers_all, const ForwardContext& ctx) const {
  const std::size_t ne = encoded.rows(), nm = mask_tokens.rows();
  if (centers_all.rank() != 2 || centers_all.cols() != 3 || centers_all.rows() != ne + nm) {
    throw ShapeError("decode: " + std::to_string(ne) + " encoded + " + std::to_string(nm) +
                     " mask tokens but centers " + shape_str(centers_all.shape()));
  }
  const Var pe = positional(g, store, centers_all, true);
  const Var parts[] = {encoded, mask_tokens};
  const Var x = decoder_.forward(g, store, ops::concat_rows(parts), pe, ctx);
  std::vector<std::size_t> mask_rows(nm);
  std::iota(mask_rows.begin(), mask_rows.end(), ne);
  return ops::gather_rows(x, mask_rows);
}

Var PointMae::predict(Graph& g, const ParamStore& store, const Var& decoded) const {
  if (!with_reconstruction_) throw std::logic_error("backbone: model has no prediction head");
  if (decoded.cols() != config_.embed_dim) {
    throw ShapeError("predict: expected mn x " + std::to_string(config_.embed_dim) + ", got " +
                     shape_str(decoded.shape()));
  }
  const Var flat = head_(g, store, decoded);
  return ops::reshape(flat, Shape{decoded.rows(), k_, 3});
}

PretrainOutput PointMae::pretrain_forward(Graph& g, const ParamStore& store, const PointCloud& cloud, std::size_t n,
                                          double ratio, MaskType mask_type, std::uint64_t seed,
                                          const ForwardContext& ctx) const {
  PatchSet patches = build_patches(cloud, n, k_, derive_seed(seed, 1));
  MaskSpec mask = make_mask(mask_type, patches.centers, ratio, derive_seed(seed, 2));
  return pretrain_forward(g, store, std::move(patches), std::move(mask), ctx);
}

PretrainOutput PointMae::pretrain_forward(Graph& g, const ParamStore& store, PatchSet patches, MaskSpec mask,
                                          const ForwardContext& ctx) const {
  if (patches.k != k_) {
    throw ShapeError("pretrain_forward: patches hold " + std::to_string(patches.k) + " points, model expects " +
                     std::to_string(k_));
  }
  PretrainOutput out;
  out.split = split_patches(patches, mask);
  const PatchSubset& vis = out.split.visible;
  const PatchSubset& msk = out.split.masked;

  const Var visible_tokens = embed(g, store, vis.patches);
  const Var mask_tok = mask_tokens(g, store, msk.size());
  const Var centers_parts[] = {g.constant(vis.centers), g.constant(msk.centers)};
  Tensor centers_all = ops::concat_rows(centers_parts).value();

  if (config_.placement == MaskTokenPlacement::Decoder) {
    TokenSequence seq{visible_tokens, vis.centers, std::vector<TokenRole>(vis.size(), TokenRole::Visible)};
    out.encoded = encode(g, store, seq, ctx).tokens;
    const Var parts[] = {out.encoded, mask_tok};
    out.decoder_input = ops::concat_rows(parts);
    out.decoded_masked = decode(g, store, out.encoded, mask_tok, centers_all, ctx);
  } else {
    const Var parts[] = {visible_tokens, mask_tok};
    std::vector<TokenRole> roles(vis.size(), TokenRole::Visible);
    roles.resize(vis.size() + msk.size(), TokenRole::Mask);
    TokenSequence seq{ops::concat_rows(parts), centers_all, std::move(roles)};
    out.encoded = encode(g, store, seq, ctx).tokens;
    std::vector<std::size_t> mask_rows(msk.size());
    std::iota(mask_rows.begin(), mask_rows.end(), vis.size());
    out.decoded_masked = ops::gather_rows(out.encoded, mask_rows);
  }
  out.predicted = predict(g, store, out.decoded_masked);
  out.loss = batch_chamfer(out.predicted, msk.patches);
  out.patches = std::move(patches);
  out.mask = std::move(mask);
  return out;
}

Var PointMae::encode_all(Graph& g, const ParamStore& store, const PatchSet& patches,
                         const ForwardContext& ctx) const {
  TokenSequence seq{embed(g, store, patches.patches), patches.centers,
                    std::vector<TokenRole>(patches.n, TokenRole::Visible)};
  return encode(g, store, seq, ctx).tokens;
}

}  // namespace pmae
