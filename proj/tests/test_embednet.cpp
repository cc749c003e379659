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

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "pmae/embednet/embednet.hpp"
#include "pmae/numcore/ops.hpp"
#include "test_util.hpp"

using namespace pmae;
using pmae::testing::max_abs_diff;
using pmae::testing::random_tensor;

namespace {

Tensor permute_within_patches(const Tensor& patches, Rng& rng) {
  const std::size_t v = patches.shape()[0], k = patches.shape()[1];
  Tensor out(patches.shape());
  for (std::size_t i = 0; i < v; ++i) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t j = k; j > 1; --j) std::swap(perm[j - 1], perm[rng.uniform_index(j)]);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t d = 0; d < 3; ++d) out[(i * k + j) * 3 + d] = patches[(i * k + perm[j]) * 3 + d];
  }
  return out;
}

}  // namespace

TEST_CASE("pointnet embedding maps v x k x 3 to v x C") {
  ParamStore store;
  Rng rng(1);
  const PointNetEmbed net(store, rng, "embed", {8, 16, 24}, 12);
  CHECK(net.out_dim() == 12);
  Graph g;
  const Var out = net.forward(g, store, random_tensor(rng, Shape{5, 7, 3}));
  CHECK(out.shape() == Shape{5, 12});
  CHECK_THROWS_AS(net.forward(g, store, random_tensor(rng, Shape{5, 7})), ShapeError);
}

TEST_CASE("pointnet embedding is invariant to point order within a patch") {
  ParamStore store;
  Rng rng(2);
  const PointNetEmbed net(store, rng, "embed", {8, 16, 24}, 12);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor patches = random_tensor(rng, Shape{4, 9, 3});
    Graph g1, g2;
    const Tensor a = net.forward(g1, store, patches).value();
    const Tensor b = net.forward(g2, store, permute_within_patches(patches, rng)).value();
    CHECK(max_abs_diff(a, b) < 1e-12);
  }
}

TEST_CASE("pointnet tokens depend only on their own patch") {
  ParamStore store;
  Rng rng(3);
  const PointNetEmbed net(store, rng, "embed", {8, 16, 24}, 12);
  Tensor patches = random_tensor(rng, Shape{3, 6, 3});
  Graph g1;
  const Tensor before = net.forward(g1, store, patches).value();
  for (std::size_t j = 0; j < 6 * 3; ++j) patches[2 * 18 + j] += 0.5;
  Graph g2;
  const Tensor after = net.forward(g2, store, patches).value();
  for (std::size_t i = 0; i < 2 * 12; ++i) CHECK(before[i] == after[i]);
  CHECK(max_abs_diff(before, after) > 1e-6);
}

TEST_CASE("positional embedding maps centers to C") {
  ParamStore store;
  Rng rng(4);
  const PositionalEmbed pe(store, rng, "pe", 10, 12);
  Graph g;
  const Var out = pe.forward(g, store, random_tensor(rng, Shape{6, 3}));
  CHECK(out.shape() == Shape{6, 12});
  ParamGrads grads = g.backward(ops::sum(out));
  for (const Tensor& t : grads.grads) CHECK(t.numel() > 0);
  CHECK(std::any_of(grads.grads.front().values().begin(), grads.grads.front().values().end(),
                    [](double v) { return v != 0.0; }));
}

TEST_CASE("mask token copies share one parameter and its gradient is the sum") {
  ParamStore store;
  Rng rng(5);
  const MaskToken token(store, rng, "mask_token", 4);
  Graph g;
  const Var rows = token.expand(g, store, 3);
  CHECK(rows.shape() == Shape{3, 4});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(rows.value().at(i, j) == store.value(token.param_index())[j]);

  const Tensor w = random_tensor(rng, Shape{3, 4});
  ParamGrads grads = g.backward(ops::sum(ops::mul(rows, g.constant(w))));
  const Tensor& gt = grads.grads[token.param_index()];
  for (std::size_t j = 0; j < 4; ++j) CHECK(gt[j] == doctest::Approx(w.at(0, j) + w.at(1, j) + w.at(2, j)).epsilon(1e-14));

  Graph g0;
  CHECK(token.expand(g0, store, 0).shape() == Shape{0, 4});
}

TEST_CASE("token sequence validation") {
  Graph g;
  TokenSequence seq{g.constant(Tensor(Shape{2, 4})), Tensor(Shape{2, 3}), {TokenRole::Visible, TokenRole::Mask}};
  CHECK_NOTHROW(seq.validate());
  seq.roles.pop_back();
  CHECK_THROWS(seq.validate());
  seq.roles.push_back(TokenRole::Visible);
  seq.centers = Tensor(Shape{3, 3});
  CHECK_THROWS(seq.validate());
}
