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

#include <cstddef>
#include <span>
#include <vector>

#include "pmae/numcore/autograd.hpp"
#include "pmae/numcore/rng.hpp"

// Differentiable op catalog. Unless stated otherwise an op views its inputs
// as matrices (rows x last-dim) and throws ShapeError naming itself and the
// offending shapes on mismatch.

namespace pmae::ops {

Var matmul(const Var& a, const Var& b);

/// Elementwise a + b. `b` may also be a row vector (numel == a.cols()) that is
/// broadcast over every row of `a`.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double value);

Var reshape(const Var& a, Shape shape);
Var transpose(const Var& a);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(const Var& a, std::span<const std::size_t> indices);
Var slice_cols(const Var& a, std::size_t start, std::size_t count);

Var softmax(const Var& a);
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
Var gelu(const Var& a);

/// x (r x in) * weight (in x out) + bias (out).
Var linear(const Var& x, const Var& weight, const Var& bias);

/// Mean or sum of every element, as a scalar.
Var mean(const Var& a);
Var sum(const Var& a);
/// Column means over all rows: r x c -> 1 x c.
Var mean_rows(const Var& a);
/// Column-wise max over consecutive groups of `group` rows:
/// (g * group) x c -> g x c. Ties resolve to the lowest row.
Var max_pool_rows(const Var& a, std::size_t group);

/// Elementwise min; ties route the gradient to `a`.
Var minimum(const Var& a, const Var& b);

/// Pairwise squared Euclidean distances between rows: ra x d, rb x d -> ra x rb.
Var squared_distances(const Var& a, const Var& b);

/// Inverted dropout. Identity when not training or p == 0.
Var dropout(const Var& a, double p, bool training, Rng& rng);

/// Mean softmax cross-entropy of r x K logits against r class labels.
Var cross_entropy(const Var& logits, std::span<const std::size_t> labels);

}  // namespace pmae::ops
