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

#include "pmae/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pmae/numcore/kernels.hpp"
#include "pmae/numcore/rng.hpp"

namespace pmae {

PointCloud::PointCloud(std::vector<Point3> points, std::optional<std::size_t> lbl) : label(lbl) {
  coords_.reserve(points.size() * 3);
  for (const Point3& p : points) push_back(p);
}

void PointCloud::set_point(std::size_t i, const Point3& p) {
  coords_[3 * i] = p[0];
  coords_[3 * i + 1] = p[1];
  coords_[3 * i + 2] = p[2];
}

void PointCloud::push_back(const Point3& p) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
    throw std::invalid_argument("point cloud: non-finite coordinate");
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

Tensor PointCloud::to_tensor() const {
  return Tensor(Shape{size(), 3}, std::vector<double>(coords_.begin(), coords_.end()));
}

namespace {

void check_sample_count(const char* op, const PointCloud& cloud, std::size_t count, const char* what) {
  if (cloud.empty()) throw std::invalid_argument(std::string(op) + ": empty point cloud");
  if (count == 0 || count > cloud.size()) {
    throw std::invalid_argument(std::string(op) + ": " + what + "=" + std::to_string(count) + " must be in [1, " +
                                std::to_string(cloud.size()) + "]");
  }
}

template <typename Relax>
std::vector<std::size_t> fps_impl(const PointCloud& cloud, std::size_t n, std::size_t first, Relax relax) {
  check_sample_count("farthest_point_sampling", cloud, n, "n");
  if (first >= cloud.size()) throw std::invalid_argument("farthest_point_sampling: first index out of range");
  std::vector<double> min_dist(cloud.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> picked;
  picked.reserve(n);
  std::size_t current = first;
  for (std::size_t s = 0; s < n; ++s) {
    picked.push_back(current);
    if (s + 1 == n) break;
    const Point3 q = cloud.point(current);
    current = relax(cloud.coords(), std::span<const double, 3>(q), std::span<double>(min_dist));
  }
  return picked;
}

void nearest_k(const PointCloud& cloud, const double* center, std::size_t k, std::size_t* out) {
  const std::size_t p = cloud.size();
  std::vector<std::pair<double, std::size_t>> d(p);
  const auto xyz = cloud.coords();
  for (std::size_t i = 0; i < p; ++i) {
    const double dx = xyz[3 * i] - center[0];
    const double dy = xyz[3 * i + 1] - center[1];
    const double dz = xyz[3 * i + 2] - center[2];
    d[i] = {dx * dx + dy * dy + dz * dz, i};
  }
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  for (std::size_t j = 0; j < k; ++j) out[j] = d[j].second;
}

void check_knn(const PointCloud& cloud, const Tensor& centers, std::size_t k) {
  check_sample_count("knn", cloud, k, "k");
  if (centers.numel() % 3 != 0 || centers.cols() != 3) {
    throw ShapeError("knn: centers must be n x 3, got " + shape_str(centers.shape()));
  }
}

}  // namespace

std::vector<std::size_t> farthest_point_sampling_from(const PointCloud& cloud, std::size_t n, std::size_t first) {
  return fps_impl(cloud, n, first, [](auto pts, auto q, auto md) { return kernels::fps_relax_argmax(pts, q, md); });
}

std::vector<std::size_t> farthest_point_sampling(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  check_sample_count("farthest_point_sampling", cloud, n, "n");
  Rng rng(seed);
  return farthest_point_sampling_from(cloud, n, rng.uniform_index(cloud.size()));
}

std::vector<std::size_t> knn(const PointCloud& cloud, const Tensor& centers, std::size_t k) {
  check_knn(cloud, centers, k);
  const std::size_t n = centers.rows();
  std::vector<std::size_t> out(n * k);
#pragma omp parallel for schedule(static) if (n * cloud.size() >= 4096)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n); ++c) {
    nearest_k(cloud, centers.data() + 3 * c, k, out.data() + c * k);
  }
  return out;
}

namespace serial {

std::vector<std::size_t> farthest_point_sampling_from(const PointCloud& cloud, std::size_t n, std::size_t first) {
  return fps_impl(cloud, n, first,
                  [](auto pts, auto q, auto md) { return kernels::serial::fps_relax_argmax(pts, q, md); });
}

std::vector<std::size_t> knn(const PointCloud& cloud, const Tensor& centers, std::size_t k) {
  check_knn(cloud, centers, k);
  const std::size_t n = centers.rows();
  std::vector<std::size_t> out(n * k);
  for (std::size_t c = 0; c < n; ++c) nearest_k(cloud, centers.data() + 3 * c, k, out.data() + c * k);
  return out;
}

}  // namespace serial

PatchSet build_patches(const PointCloud& cloud, std::size_t n, std::size_t k, std::uint64_t seed) {
  PatchSet ps;
  ps.n = n;
  ps.k = k;
  ps.center_indices = farthest_point_sampling(cloud, n, seed);
  ps.centers = Tensor(Shape{n, 3});
  for (std::size_t i = 0; i < n; ++i) {
    const Point3 c = cloud.point(ps.center_indices[i]);
    for (int d = 0; d < 3; ++d) ps.centers[3 * i + d] = c[d];
  }
  ps.point_indices = knn(cloud, ps.centers, k);
  ps.patches = Tensor(Shape{n, k, 3});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const Point3 q = cloud.point(ps.point_index(i, j));
      for (int d = 0; d < 3; ++d) ps.patches[(i * k + j) * 3 + d] = q[d] - ps.centers[3 * i + d];
    }
  }
  return ps;
}

namespace {

struct ChamferDims {
  std::size_t count, a, b;
};

ChamferDims chamfer_dims(const Shape& pred, const Shape& gt) {
  auto fail = [&](const std::string& why) {
    throw ShapeError("batch_chamfer: " + why + " (pred " + shape_str(pred) + ", gt " + shape_str(gt) + ")");
  };
  if (pred.size() != 3 || gt.size() != 3 || pred[2] != 3 || gt[2] != 3) fail("expected count x points x 3 stacks");
  if (pred[0] != gt[0]) fail("patch count mismatch");
  if (pred[0] > 0 && (pred[1] == 0 || gt[1] == 0)) fail("empty point set");
  return {pred[0], pred[1], gt[1]};
}

Var chamfer_stack(const Var& pred, const Tensor& gt, const ChamferDims dims) {
  const auto [count, a, b] = dims;
  std::vector<double> values(count);
  std::vector<std::size_t> p2g(count * a), g2p(count * b);
  kernels::chamfer_batch(pred.value().values(), gt.values(), count, a, b, values, p2g, g2p);
  double total = 0.0;
  for (double v : values) total += v;
  const double inv_count = 1.0 / static_cast<double>(count);
  const Tensor* pp = &pred.value();
  return pred.graph().record(
      Tensor::scalar(total * inv_count), {pred},
      [pp, gt, count, a, b, inv_count, p2g = std::move(p2g), g2p = std::move(g2p)](
          const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        Tensor& dp = *in[0];
        const Tensor& P = *pp;
        const double wa = 2.0 * g[0] * inv_count / static_cast<double>(a);
        const double wb = 2.0 * g[0] * inv_count / static_cast<double>(b);
        for (std::size_t s = 0; s < count; ++s) {
          const std::size_t pbase = s * a, gbase = s * b;
          for (std::size_t i = 0; i < a; ++i) {
            const std::size_t j = p2g[pbase + i];
            for (int d = 0; d < 3; ++d)
              dp[(pbase + i) * 3 + d] += wa * (P[(pbase + i) * 3 + d] - gt[(gbase + j) * 3 + d]);
          }
          for (std::size_t j = 0; j < b; ++j) {
            const std::size_t i = g2p[gbase + j];
            for (int d = 0; d < 3; ++d)
              dp[(pbase + i) * 3 + d] += wb * (P[(pbase + i) * 3 + d] - gt[(gbase + j) * 3 + d]);
          }
        }
      },
      "chamfer");
}

}  // namespace

double chamfer_l2(const Tensor& pred, const Tensor& gt) {
  if (pred.numel() == 0 || gt.numel() == 0) throw std::invalid_argument("chamfer_l2: empty point set");
  if (pred.cols() != 3 || gt.cols() != 3) {
    throw ShapeError("chamfer_l2: expected a x 3 and b x 3, got " + shape_str(pred.shape()) + " and " +
                     shape_str(gt.shape()));
  }
  const std::size_t a = pred.rows(), b = gt.rows();
  double value = 0.0;
  std::vector<std::size_t> p2g(a), g2p(b);
  kernels::chamfer_batch(pred.values(), gt.values(), 1, a, b, std::span<double>(&value, 1), p2g, g2p);
  return value;
}

Var chamfer_l2(const Var& pred, const Tensor& gt) {
  if (pred.value().numel() == 0 || gt.numel() == 0) throw std::invalid_argument("chamfer_l2: empty point set");
  if (pred.cols() != 3 || gt.cols() != 3) {
    throw ShapeError("chamfer_l2: expected a x 3 and b x 3, got " + shape_str(pred.shape()) + " and " +
                     shape_str(gt.shape()));
  }
  return chamfer_stack(pred, gt, {1, pred.rows(), gt.rows()});
}

Var batch_chamfer(const Var& pred_patches, const Tensor& gt_patches) {
  const ChamferDims dims = chamfer_dims(pred_patches.shape(), gt_patches.shape());
  if (dims.count == 0) return pred_patches.graph().constant(Tensor::scalar(0.0));
  return chamfer_stack(pred_patches, gt_patches, dims);
}

std::vector<GradcheckCase> geometry_gradcheck_cases() {
  auto random_tensor = [](Rng& rng, Shape shape) {
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  std::vector<GradcheckCase> cases;
  cases.push_back({"chamfer_l2",
                   [=](Rng& rng) {
                     const std::size_t a = 1 + rng.uniform_index(12);
                     return std::vector<Tensor>{random_tensor(rng, Shape{a, 3})};
                   },
                   [=](std::span<const Var> x) {
                     Rng fixed(4242);
                     return chamfer_l2(x[0], random_tensor(fixed, Shape{7, 3}));
                   }});
  cases.push_back({"batch_chamfer",
                   [=](Rng& rng) { return std::vector<Tensor>{random_tensor(rng, Shape{3, 5, 3})}; },
                   [=](std::span<const Var> x) {
                     Rng fixed(4343);
                     return batch_chamfer(x[0], random_tensor(fixed, Shape{3, 6, 3}));
                   }});
  return cases;
}

}  // namespace pmae
