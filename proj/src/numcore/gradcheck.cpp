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

#include "pmae/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "pmae/numcore/ops.hpp"

namespace pmae {
namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// Weighted scalar reduction of the op output with a fixed weight tensor.
double weighted_loss_value(const GradcheckCase& c, const std::vector<Tensor>& inputs, const Tensor& weight) {
  Graph g;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(g.constant(t));
  const Var out = c.apply(vars);
  double s = 0.0;
  for (std::size_t i = 0; i < out.value().numel(); ++i) s += out.value()[i] * weight[i];
  return s;
}

}  // namespace

double gradient_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

GradcheckResult run_gradcheck(const GradcheckCase& c, std::uint64_t seed, const GradcheckOptions& options) {
  GradcheckResult result{c.name, options.trials, 0.0, true};
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    std::vector<Tensor> inputs = c.make_inputs(rng);

    Graph g;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(g.variable(t));
    const Var out = c.apply(vars);
    Tensor weight = random_tensor(rng, out.shape(), 0.5, 1.5);
    const Var loss = ops::sum(ops::mul(out, g.constant(weight)));
    g.backward(loss);

    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const Tensor& analytic = g.grad(vars[k]);
      for (std::size_t i = 0; i < inputs[k].numel(); ++i) {
        std::vector<Tensor> plus = inputs;
        std::vector<Tensor> minus = inputs;
        plus[k][i] += options.eps;
        minus[k][i] -= options.eps;
        const double numeric =
            (weighted_loss_value(c, plus, weight) - weighted_loss_value(c, minus, weight)) / (2.0 * options.eps);
        const double a = analytic.numel() ? analytic[i] : 0.0;
        result.max_rel_error = std::max(result.max_rel_error, gradient_relative_error(a, numeric));
      }
    }
  }
  result.passed = result.max_rel_error < options.tolerance;
  return result;
}

std::vector<GradcheckCase> numcore_gradcheck_cases() {
  using Inputs = std::vector<Tensor>;
  std::vector<GradcheckCase> cases;
  auto add_case = [&](std::string name, std::function<Inputs(Rng&)> make, std::function<Var(std::span<const Var>)> f) {
    cases.push_back({std::move(name), std::move(make), std::move(f)});
  };

  add_case(
      "matmul", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {4, 5})}; },
      [](std::span<const Var> v) { return ops::matmul(v[0], v[1]); });
  add_case(
      "add", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::add(v[0], v[1]); });
  add_case(
      "add_broadcast_row", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {4})}; },
      [](std::span<const Var> v) { return ops::add(v[0], v[1]); });
  add_case(
      "sub", [](Rng& r) { return Inputs{random_tensor(r, {2, 3}), random_tensor(r, {2, 3})}; },
      [](std::span<const Var> v) { return ops::sub(v[0], v[1]); });
  add_case(
      "mul", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::mul(v[0], v[1]); });
  add_case(
      "scale", [](Rng& r) { return Inputs{random_tensor(r, {3, 3})}; },
      [](std::span<const Var> v) { return ops::scale(v[0], -1.7); });
  add_case(
      "add_scalar", [](Rng& r) { return Inputs{random_tensor(r, {3, 3})}; },
      [](std::span<const Var> v) { return ops::add_scalar(v[0], 0.3); });
  add_case(
      "reshape", [](Rng& r) { return Inputs{random_tensor(r, {2, 6})}; },
      [](std::span<const Var> v) { return ops::reshape(v[0], {4, 3}); });
  add_case(
      "transpose", [](Rng& r) { return Inputs{random_tensor(r, {2, 5})}; },
      [](std::span<const Var> v) { return ops::transpose(v[0]); });
  add_case(
      "concat_rows", [](Rng& r) { return Inputs{random_tensor(r, {2, 3}), random_tensor(r, {4, 3})}; },
      [](std::span<const Var> v) { return ops::concat_rows(v); });
  add_case(
      "concat_cols", [](Rng& r) { return Inputs{random_tensor(r, {3, 2}), random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::concat_cols(v); });
  add_case(
      "gather_rows", [](Rng& r) { return Inputs{random_tensor(r, {4, 3})}; },
      [](std::span<const Var> v) {
        static const std::vector<std::size_t> idx = {2, 0, 2, 3, 1, 2};
        return ops::gather_rows(v[0], idx);
      });
  add_case(
      "slice_cols", [](Rng& r) { return Inputs{random_tensor(r, {3, 6})}; },
      [](std::span<const Var> v) { return ops::slice_cols(v[0], 2, 3); });
  add_case(
      "softmax", [](Rng& r) { return Inputs{random_tensor(r, {3, 5}, -2.0, 2.0)}; },
      [](std::span<const Var> v) { return ops::softmax(v[0]); });
  add_case(
      "layer_norm",
      [](Rng& r) { return Inputs{random_tensor(r, {3, 6}), random_tensor(r, {6}, 0.5, 1.5), random_tensor(r, {6})}; },
      [](std::span<const Var> v) { return ops::layer_norm(v[0], v[1], v[2]); });
  add_case(
      "gelu", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}, -3.0, 3.0)}; },
      [](std::span<const Var> v) { return ops::gelu(v[0]); });
  add_case(
      "linear",
      [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {4, 5}), random_tensor(r, {5})}; },
      [](std::span<const Var> v) { return ops::linear(v[0], v[1], v[2]); });
  add_case(
      "mean", [](Rng& r) { return Inputs{random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::mean(v[0]); });
  add_case(
      "sum", [](Rng& r) { return Inputs{random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::sum(v[0]); });
  add_case(
      "mean_rows", [](Rng& r) { return Inputs{random_tensor(r, {5, 3})}; },
      [](std::span<const Var> v) { return ops::mean_rows(v[0]); });
  add_case(
      "max_pool_rows", [](Rng& r) { return Inputs{random_tensor(r, {8, 3})}; },
      [](std::span<const Var> v) { return ops::max_pool_rows(v[0], 4); });
  add_case(
      "minimum", [](Rng& r) { return Inputs{random_tensor(r, {3, 4}), random_tensor(r, {3, 4})}; },
      [](std::span<const Var> v) { return ops::minimum(v[0], v[1]); });
  add_case(
      "squared_distances", [](Rng& r) { return Inputs{random_tensor(r, {4, 3}), random_tensor(r, {5, 3})}; },
      [](std::span<const Var> v) { return ops::squared_distances(v[0], v[1]); });
  add_case(
      "dropout", [](Rng& r) { return Inputs{random_tensor(r, {4, 5})}; },
      [](std::span<const Var> v) {
        Rng mask_rng(1234);
        return ops::dropout(v[0], 0.3, true, mask_rng);
      });
  add_case(
      "cross_entropy", [](Rng& r) { return Inputs{random_tensor(r, {4, 3}, -2.0, 2.0)}; },
      [](std::span<const Var> v) {
        static const std::vector<std::size_t> labels = {0, 2, 1, 2};
        return ops::cross_entropy(v[0], labels);
      });
  return cases;
}

}  // namespace pmae
