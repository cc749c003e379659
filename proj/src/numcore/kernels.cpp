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

#include "pmae/numcore/kernels.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pmae::kernels {
namespace {

// Below this much work a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

bool worth_parallel(std::size_t work) { return work >= kParallelWork; }

using Index = std::ptrdiff_t;

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate) {
  const double* __restrict pa = a.data();
  const double* __restrict pb = b.data();
  double* __restrict pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(m * k * n))
  for (Index i = 0; i < static_cast<Index>(m); ++i) {
    double* crow = pc + i * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0);
    const double* arow = pa + i * k;
    std::size_t p = 0;
    // Four rows of b per pass; additions into crow[j] keep the p order.
    for (; p + 4 <= k; p += 4) {
      const double a0 = arow[p], a1 = arow[p + 1], a2 = arow[p + 2], a3 = arow[p + 3];
      const double* b0 = pb + p * n;
      const double* b1 = b0 + n;
      const double* b2 = b1 + n;
      const double* b3 = b2 + n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = (((crow[j] + a0 * b0[j]) + a1 * b1[j]) + a2 * b2[j]) + a3 * b3[j];
    }
    for (; p < k; ++p) {
      const double av = arow[p];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
  const double* __restrict pa = a.data();
  const double* __restrict pb = b.data();
  double* __restrict pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(m * k * n))
  for (Index i = 0; i < static_cast<Index>(m); ++i) {
    const double* arow = pa + i * k;
    double* crow = pc + i * n;
    std::size_t j = 0;
    // Four output columns at a time; each sum still runs p = 0..k-1 in order.
    for (; j + 4 <= n; j += 4) {
      const double* b0 = pb + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      double s0 = accumulate ? crow[j] : 0.0;
      double s1 = accumulate ? crow[j + 1] : 0.0;
      double s2 = accumulate ? crow[j + 2] : 0.0;
      double s3 = accumulate ? crow[j + 3] : 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = arow[p];
        s0 += av * b0[p];
        s1 += av * b1[p];
        s2 += av * b2[p];
        s3 += av * b3[p];
      }
      crow[j] = s0;
      crow[j + 1] = s1;
      crow[j + 2] = s2;
      crow[j + 3] = s3;
    }
    for (; j < n; ++j) {
      const double* brow = pb + j * k;
      double s = accumulate ? crow[j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = s;
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
  const double* __restrict pa = a.data();
  const double* __restrict pb = b.data();
  double* __restrict pc = c.data();
#pragma omp parallel for schedule(static) if (worth_parallel(m * k * n))
  for (Index i = 0; i < static_cast<Index>(m); ++i) {
    double* crow = pc + i * n;
    if (!accumulate) std::fill(crow, crow + n, 0.0);
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const double a0 = pa[p * m + i], a1 = pa[(p + 1) * m + i], a2 = pa[(p + 2) * m + i], a3 = pa[(p + 3) * m + i];
      const double* b0 = pb + p * n;
      const double* b1 = b0 + n;
      const double* b2 = b1 + n;
      const double* b3 = b2 + n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = (((crow[j] + a0 * b0[j]) + a1 * b1[j]) + a2 * b2[j]) + a3 * b3[j];
    }
    for (; p < k; ++p) {
      const double av = pa[p * m + i];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void squared_distances(std::span<const double> a, std::span<const double> b, std::span<double> out,
                       std::size_t ra, std::size_t rb, std::size_t d) {
#pragma omp parallel for schedule(static) if (worth_parallel(ra * rb * d))
  for (Index i = 0; i < static_cast<Index>(ra); ++i) {
    for (std::size_t j = 0; j < rb; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = a[i * d + t] - b[j * d + t];
        s += diff * diff;
      }
      out[i * rb + j] = s;
    }
  }
}

std::size_t fps_relax_argmax(std::span<const double> points, std::span<const double, 3> query,
                             std::span<double> min_dist) {
  const std::size_t p = min_dist.size();
  std::size_t best = 0;
  double best_d = -1.0;
#pragma omp parallel if (worth_parallel(p * 8))
  {
    std::size_t local_best = 0;
    double local_d = -1.0;
#pragma omp for schedule(static) nowait
    for (Index i = 0; i < static_cast<Index>(p); ++i) {
      const double dx = points[i * 3] - query[0];
      const double dy = points[i * 3 + 1] - query[1];
      const double dz = points[i * 3 + 2] - query[2];
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > local_d) {
        local_d = min_dist[i];
        local_best = static_cast<std::size_t>(i);
      }
    }
#pragma omp critical(pmae_fps_argmax)
    {
      if (local_d > best_d || (local_d == best_d && local_best < best)) {
        best_d = local_d;
        best = local_best;
      }
    }
  }
  return best;
}

namespace {

double chamfer_pair(const double* pred, const double* gt, std::size_t a, std::size_t b, std::size_t* pred_to_gt,
                    std::size_t* gt_to_pred) {
  std::vector<double> col_min(b, std::numeric_limits<double>::infinity());
  double row_sum = 0.0;
  for (std::size_t i = 0; i < a; ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b; ++j) {
      const double dx = pred[i * 3] - gt[j * 3];
      const double dy = pred[i * 3 + 1] - gt[j * 3 + 1];
      const double dz = pred[i * 3 + 2] - gt[j * 3 + 2];
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < row_min) {
        row_min = d;
        arg = j;
      }
      if (d < col_min[j]) {
        col_min[j] = d;
        gt_to_pred[j] = i;
      }
    }
    pred_to_gt[i] = arg;
    row_sum += row_min;
  }
  double col_sum = 0.0;
  for (std::size_t j = 0; j < b; ++j) col_sum += col_min[j];
  return row_sum / static_cast<double>(a) + col_sum / static_cast<double>(b);
}

}  // namespace

void chamfer_batch(std::span<const double> pred, std::span<const double> gt, std::size_t count, std::size_t a,
                   std::size_t b, std::span<double> values, std::span<std::size_t> pred_to_gt,
                   std::span<std::size_t> gt_to_pred) {
#pragma omp parallel for schedule(static) if (worth_parallel(count * a * b * 3))
  for (Index s = 0; s < static_cast<Index>(count); ++s) {
    values[s] = chamfer_pair(pred.data() + s * a * 3, gt.data() + s * b * 3, a, b, pred_to_gt.data() + s * a,
                             gt_to_pred.data() + s * b);
  }
}

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      c[i * n + j] = s;
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
      c[i * n + j] = s;
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[p * m + i] * b[p * n + j];
      c[i * n + j] = s;
    }
  }
}

void squared_distances(std::span<const double> a, std::span<const double> b, std::span<double> out,
                       std::size_t ra, std::size_t rb, std::size_t d) {
  for (std::size_t i = 0; i < ra; ++i) {
    for (std::size_t j = 0; j < rb; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = a[i * d + t] - b[j * d + t];
        s += diff * diff;
      }
      out[i * rb + j] = s;
    }
  }
}

std::size_t fps_relax_argmax(std::span<const double> points, std::span<const double, 3> query,
                             std::span<double> min_dist) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < min_dist.size(); ++i) {
    const double dx = points[i * 3] - query[0];
    const double dy = points[i * 3 + 1] - query[1];
    const double dz = points[i * 3 + 2] - query[2];
    const double d = dx * dx + dy * dy + dz * dz;
    if (d < min_dist[i]) min_dist[i] = d;
    if (min_dist[i] > best_d) {
      best_d = min_dist[i];
      best = i;
    }
  }
  return best;
}

void chamfer_batch(std::span<const double> pred, std::span<const double> gt, std::size_t count, std::size_t a,
                   std::size_t b, std::span<double> values, std::span<std::size_t> pred_to_gt,
                   std::span<std::size_t> gt_to_pred) {
  for (std::size_t s = 0; s < count; ++s) {
    values[s] = chamfer_pair(pred.data() + s * a * 3, gt.data() + s * b * 3, a, b, pred_to_gt.data() + s * a,
                             gt_to_pred.data() + s * b);
  }
}

}  // namespace serial
}  // namespace pmae::kernels
