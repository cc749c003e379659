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

#include "pmae/numcore/autograd.hpp"
#include "pmae/numcore/params.hpp"
#include "pmae/numcore/rng.hpp"

namespace pmae {

/// Parameters for y = x W + b; W is truncated-normal(0.02), b zeros.
struct LinearLayer {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;

  static LinearLayer create(ParamStore& store, Rng& rng, const std::string& prefix, std::size_t in_dim,
                            std::size_t out_dim);
  Var operator()(Graph& g, const ParamStore& store, const Var& x) const;
};

/// Last-axis layer norm with unit gain / zero bias at init, eps 1e-5.
struct LayerNormLayer {
  std::size_t gain = 0;
  std::size_t bias = 0;

  static LayerNormLayer create(ParamStore& store, const std::string& prefix, std::size_t dim);
  Var operator()(Graph& g, const ParamStore& store, const Var& x) const;
};

/// Per-forward settings shared by every layer.
struct ForwardContext {
  bool training = false;
  double attn_dropout = 0.0;
  double mlp_dropout = 0.0;
  Rng* rng = nullptr;  // required when a dropout rate is non-zero in training
};

}  // namespace pmae
