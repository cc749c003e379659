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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pmae/dataio/dataio.hpp"
#include "pmae/numcore/rng.hpp"

namespace pmae {

ShapeFamily parse_family(const std::string& name) {
  for (ShapeFamily f : kAllFamilies)
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown shape family '" + name + "'");
}

std::string to_string(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::Sphere: return "sphere";
    case ShapeFamily::Cube: return "cube";
    case ShapeFamily::Cylinder: return "cylinder";
    case ShapeFamily::Torus: return "torus";
    case ShapeFamily::Cone: return "cone";
    case ShapeFamily::Plane: return "plane";
  }
  throw std::invalid_argument("invalid shape family");
}

namespace {

constexpr double kPi = std::numbers::pi;

Point3 disk_point(Rng& rng, double radius, double z) {
  const double r = radius * std::sqrt(rng.uniform());
  const double t = 2.0 * kPi * rng.uniform();
  return {r * std::cos(t), r * std::sin(t), z};
}

Point3 sample_sphere(Rng& rng, double radius) {
  double x, y, z, norm;
  do {
    x = rng.normal();
    y = rng.normal();
    z = rng.normal();
    norm = std::sqrt(x * x + y * y + z * z);
  } while (norm < 1e-12);
  return {radius * x / norm, radius * y / norm, radius * z / norm};
}

// Each family is centered on the origin by construction.
struct Sampler {
  ShapeFamily family;
  double a = 0, b = 0, c = 0;

  static Sampler draw(ShapeFamily family, Rng& rng) {
    Sampler s{family};
    switch (family) {
      case ShapeFamily::Sphere: s.a = rng.uniform(0.5, 1.5); break;
      case ShapeFamily::Cube:
        s.a = rng.uniform(0.6, 1.4);
        s.b = rng.uniform(0.6, 1.4);
        s.c = rng.uniform(0.6, 1.4);
        break;
      case ShapeFamily::Cylinder:
        s.a = rng.uniform(0.3, 0.7);
        s.b = rng.uniform(0.8, 2.0);
        break;
      case ShapeFamily::Torus:
        s.a = rng.uniform(0.6, 1.0);
        s.b = rng.uniform(0.15, 0.35);
        break;
      case ShapeFamily::Cone:
        s.a = rng.uniform(0.4, 0.8);
        s.b = rng.uniform(0.8, 1.6);
        break;
      case ShapeFamily::Plane:
        s.a = rng.uniform(0.5, 1.5);
        s.b = rng.uniform(0.5, 1.5);
        break;
    }
    return s;
  }

  Point3 sample(Rng& rng) const {
    switch (family) {
      case ShapeFamily::Sphere: return sample_sphere(rng, a);
      case ShapeFamily::Cube: {
        // Pick a face pair by area, then a side and a uniform point on it.
        const double areas[3] = {b * c, a * c, a * b};
        const double u = rng.uniform() * (areas[0] + areas[1] + areas[2]);
        const int axis = u < areas[0] ? 0 : (u < areas[0] + areas[1] ? 1 : 2);
        const double ext[3] = {a, b, c};
        Point3 p{};
        for (int d = 0; d < 3; ++d) p[d] = (rng.uniform() - 0.5) * ext[d];
        p[axis] = (rng.uniform() < 0.5 ? -0.5 : 0.5) * ext[axis];
        return p;
      }
      case ShapeFamily::Cylinder: {
        const double lateral = 2.0 * kPi * a * b;
        const double cap = kPi * a * a;
        const double u = rng.uniform() * (lateral + 2.0 * cap);
        if (u < lateral) {
          const double t = 2.0 * kPi * rng.uniform();
          return {a * std::cos(t), a * std::sin(t), (rng.uniform() - 0.5) * b};
        }
        return disk_point(rng, a, u < lateral + cap ? -0.5 * b : 0.5 * b);
      }
      case ShapeFamily::Torus: {
        // Accept the tube angle with density proportional to the local ring radius.
        double v;
        do {
          v = 2.0 * kPi * rng.uniform();
        } while (rng.uniform() * (a + b) > a + b * std::cos(v));
        const double t = 2.0 * kPi * rng.uniform();
        const double ring = a + b * std::cos(v);
        return {ring * std::cos(t), ring * std::sin(t), b * std::sin(v)};
      }
      case ShapeFamily::Cone: {
        const double lateral = kPi * a * std::sqrt(a * a + b * b);
        const double base = kPi * a * a;
        if (rng.uniform() * (lateral + base) < lateral) {
          const double t = std::sqrt(rng.uniform());
          const double ang = 2.0 * kPi * rng.uniform();
          return {a * t * std::cos(ang), a * t * std::sin(ang), 0.5 * b - b * t};
        }
        return disk_point(rng, a, -0.5 * b);
      }
      case ShapeFamily::Plane: return {(rng.uniform() - 0.5) * a, (rng.uniform() - 0.5) * b, 0.0};
    }
    return {};
  }
};

std::size_t family_index(ShapeFamily f) {
  return static_cast<std::size_t>(std::find(kAllFamilies.begin(), kAllFamilies.end(), f) - kAllFamilies.begin());
}

}  // namespace

PointCloud gen_synthetic(const SyntheticSpec& spec) {
  if (spec.points == 0) throw std::invalid_argument("gen_synthetic: points must be positive");
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("gen_synthetic: noise must be non-negative");
  Rng rng(spec.seed);
  const Sampler sampler = Sampler::draw(spec.family, rng);
  std::vector<Point3> pts(spec.points);
  for (Point3& p : pts) {
    p = sampler.sample(rng);
    if (spec.noise > 0.0)
      for (double& v : p) v += spec.noise * rng.normal();
  }
  // Shapes are generated around the origin, so only the scale is normalized
  // here; a sampled centroid shift would break exact sphere radii.
  double max_norm = 0.0;
  for (const Point3& p : pts) max_norm = std::max(max_norm, std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
  for (Point3& p : pts)
    for (double& v : p) v /= max_norm;
  return PointCloud(std::move(pts), family_index(spec.family));
}

PointCloud normalize_cloud(PointCloud cloud) {
  if (cloud.empty()) throw std::invalid_argument("normalize_cloud: empty cloud");
  const std::size_t p = cloud.size();
  Point3 centroid{0, 0, 0};
  for (std::size_t i = 0; i < p; ++i) {
    const Point3 q = cloud.point(i);
    for (int d = 0; d < 3; ++d) centroid[d] += q[d];
  }
  for (double& v : centroid) v /= static_cast<double>(p);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    Point3 q = cloud.point(i);
    for (int d = 0; d < 3; ++d) q[d] -= centroid[d];
    max_norm = std::max(max_norm, std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]));
    cloud.set_point(i, q);
  }
  if (max_norm > 0.0) {
    for (double& v : cloud.coords()) v /= max_norm;
  }
  return cloud;
}

PointCloud apply_similarity(const PointCloud& cloud, double scale, const Point3& translation) {
  PointCloud out = cloud;
  for (std::size_t i = 0; i < out.size(); ++i) {
    Point3 q = out.point(i);
    for (int d = 0; d < 3; ++d) q[d] = scale * q[d] + translation[d];
    out.set_point(i, q);
  }
  return out;
}

PointCloud augment(const PointCloud& cloud, std::uint64_t seed, const AugmentRanges& ranges) {
  Rng rng(seed);
  const double scale = rng.uniform(ranges.scale_min, ranges.scale_max);
  Point3 t{};
  for (double& v : t) v = rng.uniform(-ranges.translate, ranges.translate);
  return apply_similarity(cloud, scale, t);
}

DatasetSplit make_synthetic_dataset(const DatasetSpec& spec) {
  if (spec.num_classes == 0 || spec.num_classes > kAllFamilies.size()) {
    throw std::invalid_argument("dataset: num_classes must be in [1, " + std::to_string(kAllFamilies.size()) + "]");
  }
  DatasetSplit split;
  split.num_classes = spec.num_classes;
  const std::size_t counts[4] = {spec.train_per_class, spec.val_per_class, spec.test_per_class,
                                 spec.pretrain_per_class};
  std::vector<LabeledCloud>* parts[4] = {&split.train, &split.val, &split.test, &split.pretrain};
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < counts[s]; ++i) {
      for (std::size_t c = 0; c < spec.num_classes; ++c) {
        const std::uint64_t seed = derive_seed(spec.seed, s + 1, (c << 32) | i);
        SyntheticSpec item{kAllFamilies[c], spec.points, spec.noise, seed};
        parts[s]->push_back({gen_synthetic(item), c, seed});
      }
    }
  }
  return split;
}

const std::vector<LabeledCloud>& pretraining_pool(const DatasetSplit& split) {
  return split.pretrain.empty() ? split.train : split.pretrain;
}

}  // namespace pmae
