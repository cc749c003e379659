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

// Brute-force reference implementations used only by tests.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "pmae/geometry/geometry.hpp"

namespace pmae::oracle {

inline double dist2(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// Greedy max-min selection, recomputing every point's distance to the whole
/// selected set at each step.
inline std::vector<std::size_t> fps(const PointCloud& cloud, std::size_t n, std::size_t first) {
  std::vector<std::size_t> chosen{first};
  while (chosen.size() < n) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t c : chosen) d = std::min(d, dist2(cloud.point(i), cloud.point(c)));
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

/// Full stable sort of all points by distance.
inline std::vector<std::size_t> knn(const PointCloud& cloud, const Point3& center, std::size_t k) {
  std::vector<std::size_t> idx(cloud.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist2(cloud.point(a), center) < dist2(cloud.point(b), center);
  });
  idx.resize(k);
  return idx;
}

/// O(ab) double loop.
inline double chamfer(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  double sa = 0.0, sb = 0.0;
  for (const Point3& p : a) {
    double m = std::numeric_limits<double>::infinity();
    for (const Point3& q : b) m = std::min(m, dist2(p, q));
    sa += m;
  }
  for (const Point3& q : b) {
    double m = std::numeric_limits<double>::infinity();
    for (const Point3& p : a) m = std::min(m, dist2(p, q));
    sb += m;
  }
  return sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size());
}

inline std::vector<Point3> rows(const Tensor& t) {
  std::vector<Point3> out(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) out[i] = {t.at(i, 0), t.at(i, 1), t.at(i, 2)};
  return out;
}

}  // namespace pmae::oracle
