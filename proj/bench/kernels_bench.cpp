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

// Parallel kernels against their serial twins. Thread count follows
// OMP_NUM_THREADS; with one thread the pairs should be close.

#include <benchmark/benchmark.h>

#include <vector>

#include "pmae/geometry/geometry.hpp"
#include "pmae/numcore/kernels.hpp"
#include "pmae/numcore/rng.hpp"

namespace {

using namespace pmae;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

PointCloud random_cloud(std::size_t p, std::uint64_t seed) {
  const std::vector<double> v = random_values(3 * p, seed);
  PointCloud c;
  for (std::size_t i = 0; i < p; ++i) c.push_back({v[3 * i], v[3 * i + 1], v[3 * i + 2]});
  return c;
}

template <auto Fn>
void bm_matmul(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t k = m, n = m;
  const auto a = random_values(m * k, 1), b = random_values(k * n, 2);
  std::vector<double> c(m * n);
  for (auto _ : state) {
    Fn(a, b, c, m, k, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * k * n));
}

template <auto Fn>
void bm_squared_distances(benchmark::State& state) {
  const auto r = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(r * 3, 3), b = random_values(r * 3, 4);
  std::vector<double> out(r * r);
  for (auto _ : state) {
    Fn(a, b, out, r, r, 3);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void bm_fps(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(cloud, 64, 0));
}

template <auto Fn>
void bm_knn(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const PointCloud cloud = random_cloud(p, 6);
  const auto idx = farthest_point_sampling_from(cloud, 64, 0);
  Tensor centers(Shape{64, 3});
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t d = 0; d < 3; ++d) centers.at(i, d) = cloud.point(idx[i])[d];
  for (auto _ : state) benchmark::DoNotOptimize(Fn(cloud, centers, 32));
}

template <auto Fn>
void bm_chamfer(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 32;
  const auto pred = random_values(count * k * 3, 7), gt = random_values(count * k * 3, 8);
  std::vector<double> values(count);
  std::vector<std::size_t> p2g(count * k), g2p(count * k);
  for (auto _ : state) {
    Fn(pred, gt, count, k, k, values, p2g, g2p);
    benchmark::DoNotOptimize(values.data());
  }
}

}  // namespace

BENCHMARK(bm_matmul<pmae::kernels::matmul>)->Name("matmul/parallel")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<pmae::kernels::serial::matmul>)->Name("matmul/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<pmae::kernels::matmul_nt>)->Name("matmul_nt/parallel")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<pmae::kernels::serial::matmul_nt>)->Name("matmul_nt/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<pmae::kernels::matmul_tn>)->Name("matmul_tn/parallel")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_matmul<pmae::kernels::serial::matmul_tn>)->Name("matmul_tn/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bm_squared_distances<pmae::kernels::squared_distances>)->Name("sqdist/parallel")->Arg(256)->Arg(1024);
BENCHMARK(bm_squared_distances<pmae::kernels::serial::squared_distances>)->Name("sqdist/serial")->Arg(256)->Arg(1024);
BENCHMARK(bm_fps<pmae::farthest_point_sampling_from>)->Name("fps/parallel")->Arg(1024)->Arg(8192);
BENCHMARK(bm_fps<pmae::serial::farthest_point_sampling_from>)->Name("fps/serial")->Arg(1024)->Arg(8192);
BENCHMARK(bm_knn<pmae::knn>)->Name("knn/parallel")->Arg(1024)->Arg(8192);
BENCHMARK(bm_knn<pmae::serial::knn>)->Name("knn/serial")->Arg(1024)->Arg(8192);
BENCHMARK(bm_chamfer<pmae::kernels::chamfer_batch>)->Name("chamfer/parallel")->Arg(16)->Arg(64);
BENCHMARK(bm_chamfer<pmae::kernels::serial::chamfer_batch>)->Name("chamfer/serial")->Arg(16)->Arg(64);

BENCHMARK_MAIN();
