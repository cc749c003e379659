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

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pmae/harness/experiments.hpp"
#include "pmae/numcore/ops.hpp"

namespace pmae {

namespace {

void partial_shuffle(std::vector<std::size_t>& v, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count && i + 1 < v.size(); ++i) {
    std::swap(v[i], v[i + rng.uniform_index(v.size() - i)]);
  }
}

}  // namespace

FewshotResult fewshot_eval(const RunConfig& config, const std::optional<Checkpoint>& encoder,
                           const std::vector<LabeledCloud>& pool, const FewshotOptions& opt) {
  if (opt.n_way == 0 || opt.m_shot == 0 || opt.runs == 0 || opt.test_per_class == 0) {
    throw std::invalid_argument("fewshot: n_way, m_shot, runs and test_per_class must be positive");
  }
  std::size_t num_classes = 0;
  for (const auto& item : pool) num_classes = std::max(num_classes, item.label + 1);
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < pool.size(); ++i) by_class[pool[i].label].push_back(i);

  const std::size_t need = opt.m_shot + opt.test_per_class;
  std::vector<std::size_t> eligible;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (by_class[c].empty()) continue;
    if (by_class[c].size() < need) {
      throw std::invalid_argument("fewshot: class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                                  " items, needs " + std::to_string(need) + " (m_shot + test_per_class)");
    }
    eligible.push_back(c);
  }
  if (eligible.size() < opt.n_way) {
    throw std::invalid_argument("fewshot: " + std::to_string(opt.n_way) + "-way needs that many classes, pool has " +
                                std::to_string(eligible.size()));
  }

  // Frozen encoder; the model's own head is unused.
  ParamStore enc_store;
  const ClassifierModel model(enc_store, config, 1);
  if (encoder) load_encoder_weights(enc_store, *encoder, 1, false);

  std::vector<std::optional<Tensor>> feature_cache(pool.size());
  auto feature = [&](std::size_t i) -> const Tensor& {
    if (!feature_cache[i]) {
      Graph g;
      feature_cache[i] = model.features(g, enc_store, pool[i].cloud, eval_fps_seed(pool[i])).value();
    }
    return *feature_cache[i];
  };

  FewshotResult result;
  for (std::size_t run = 0; run < opt.runs; ++run) {
    Rng rng(derive_seed(opt.seed, run));
    std::vector<std::size_t> classes = eligible;
    partial_shuffle(classes, opt.n_way, rng);
    classes.resize(opt.n_way);

    std::vector<std::size_t> support, support_labels, query, query_labels;
    for (std::size_t w = 0; w < opt.n_way; ++w) {
      std::vector<std::size_t> items = by_class[classes[w]];
      partial_shuffle(items, need, rng);
      for (std::size_t j = 0; j < need; ++j) {
        (j < opt.m_shot ? support : query).push_back(items[j]);
        (j < opt.m_shot ? support_labels : query_labels).push_back(w);
      }
    }

    // Stack features; fresh 2-layer head per run.
    const std::size_t dim = feature(support[0]).numel();
    auto stack = [&](const std::vector<std::size_t>& idx) {
      Tensor x(Shape{idx.size(), dim});
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const Tensor& f = feature(idx[r]);
        std::copy(f.values().begin(), f.values().end(), x.values().begin() + static_cast<std::ptrdiff_t>(r * dim));
      }
      return x;
    };
    const Tensor xs = stack(support);
    const Tensor xq = stack(query);

    ParamStore head;
    Rng init(derive_seed(opt.seed, run, 1));
    const LinearLayer fc1 = LinearLayer::create(head, init, "cls.fc1", dim, config.cls_hidden);
    const LinearLayer fc2 = LinearLayer::create(head, init, "cls.fc2", config.cls_hidden, opt.n_way);
    auto forward = [&](Graph& g, const Tensor& x) { return fc2(g, head, ops::gelu(fc1(g, head, g.constant(x)))); };

    AdamW adam(head, AdamWConfig{config.weight_decay});
    for (std::size_t s = 0; s < config.fewshot_steps; ++s) {
      Graph g;
      const Var loss = ops::cross_entropy(forward(g, xs), support_labels);
      adam.step(head, g.backward(loss), config.fewshot_lr);
    }

    Graph g;
    const Tensor logits = forward(g, xq).value();
    std::size_t correct = 0;
    for (std::size_t r = 0; r < query.size(); ++r) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < opt.n_way; ++c) {
        if (logits.at(r, c) > logits.at(r, best)) best = c;
      }
      correct += best == query_labels[r] ? 1 : 0;
    }
    result.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(query.size()));
  }

  const double n = static_cast<double>(result.accuracies.size());
  result.mean = std::accumulate(result.accuracies.begin(), result.accuracies.end(), 0.0) / n;
  double var = 0.0;
  for (double a : result.accuracies) var += (a - result.mean) * (a - result.mean);
  result.stddev = std::sqrt(var / n);
  return result;
}

}  // namespace pmae
