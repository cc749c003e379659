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

// Dense inner loops shared by the autodiff ops and the geometry module.
//
// Every kernel in `pmae::kernels` has a plain serial twin in
// `pmae::kernels::serial`. The parallel versions split work only across
// independent output rows, so both produce bit-identical results; the serial
// versions are kept as test references and benchmark baselines.

namespace pmae::kernels {

/// C (+)= A * B with A m x k, B k x n, C m x n.
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate = false);

/// C (+)= A * B^T with A m x k, B n x k.
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate = false);

/// C (+)= A^T * B with A k x m, B k x n.
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate = false);

/// out[i, j] = ||a_i - b_j||^2 for rows of A (ra x d) and B (rb x d).
void squared_distances(std::span<const double> a, std::span<const double> b, std::span<double> out,
                       std::size_t ra, std::size_t rb, std::size_t d);

/// One FPS relaxation: min_dist[i] = min(min_dist[i], ||p_i - q||^2) over
/// p x 3 points, then return the index of the largest min_dist (lowest index on
/// ties).
std::size_t fps_relax_argmax(std::span<const double> points, std::span<const double, 3> query,
                             std::span<double> min_dist);

/// Per-pair l2 Chamfer over `count` aligned set pairs of a and b 3-D points.
/// Writes each pair's value and the nearest-neighbour index maps used by the
/// backward pass (lowest index on ties).
void chamfer_batch(std::span<const double> pred, std::span<const double> gt, std::size_t count, std::size_t a,
                   std::size_t b, std::span<double> values, std::span<std::size_t> pred_to_gt,
                   std::span<std::size_t> gt_to_pred);

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate = false);
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate = false);
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate = false);
void squared_distances(std::span<const double> a, std::span<const double> b, std::span<double> out,
                       std::size_t ra, std::size_t rb, std::size_t d);
std::size_t fps_relax_argmax(std::span<const double> points, std::span<const double, 3> query,
                             std::span<double> min_dist);
void chamfer_batch(std::span<const double> pred, std::span<const double> gt, std::size_t count, std::size_t a,
                   std::size_t b, std::span<double> values, std::span<std::size_t> pred_to_gt,
                   std::span<std::size_t> gt_to_pred);

}  // namespace serial

/// Number of OpenMP threads kernels may use (1 without OpenMP).
int max_threads();

}  // namespace pmae::kernels
